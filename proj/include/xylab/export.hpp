#pragma once

#include <string>

#include "xylab/config.hpp"
#include "xylab/ldp.hpp"
#include "xylab/sampler.hpp"
#include "xylab/scan.hpp"

namespace xylab {

// Report writers. Every file embeds the library version and the resolved
// config; nothing embeds a timestamp, so identical runs are byte-identical.
// Each writer returns the path it wrote.

std::string write_eigensystem_json(const EigenSystem& es, const ExperimentConfig& cfg,
                                   const std::string& dir);

std::string write_subaction_json(const Subaction& sub, const UniquenessReport& uq,
                                 const ExperimentConfig& cfg, const std::string& dir);

std::string write_scan_table(const ScanResult& scan, const ExperimentConfig& cfg, const std::string& dir,
                             bool as_json);

std::string write_scan_report_json(const ScanResult& scan, const SelectionReport& sel,
                                   const FiberMassReport& fm, const ExperimentConfig& cfg,
                                   const std::string& dir);

/// stem distinguishes the files of one set, e.g. "mu_arcF" or "op_arcF".
std::string write_ldp_json(const LdpReport& rep, const std::string& stem, const ExperimentConfig& cfg,
                           const std::string& dir);

/// The combined (c, n, value) grid of both runs; measure rows leave n blank.
std::string write_ldp_grid(const LdpReport& mu, const LdpReport& op, const std::string& stem,
                           const ExperimentConfig& cfg, const std::string& dir, bool as_json);

std::string write_chain(const Chain& chain, const ExperimentConfig& cfg, const std::string& dir,
                        bool as_json);

std::string write_sample_report_json(const Chain& chain, const BirkhoffReport& bk,
                                     const MarginalReport& mg, double stationarity,
                                     const ExperimentConfig& cfg, const std::string& dir);

}  // namespace xylab
