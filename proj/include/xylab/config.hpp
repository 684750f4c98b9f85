#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "xylab/arcset.hpp"
#include "xylab/grid.hpp"
#include "xylab/maxplus.hpp"
#include "xylab/potential.hpp"
#include "xylab/sampler.hpp"
#include "xylab/scan.hpp"
#include "xylab/sequence.hpp"
#include "xylab/transfer.hpp"

namespace xylab {

/// Invalid experiment file: unknown key, missing field, out-of-range value.
/// The message names the offending key path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One experiment, fully resolved: every field has its final value and
/// `resolved_json` is the canonical re-serialization embedded in every output
/// file, so a report always carries the exact configuration that produced it.
struct ExperimentConfig {
    Potential potential = Potential::cosine();
    int n_nodes = 128;
    ShiftMetric metric{0.5};

    std::vector<double> c_schedule = default_c_schedule();
    std::vector<int> n_schedule = {5, 10, 20};
    EigenOptions eig;
    MaxPlusOptions maxplus;

    std::vector<ArcSet> sets;
    std::vector<BasePoint> probes;

    double ldp_cap = 50.0;
    int ldp_rate_depth = -1;
    std::vector<double> scan_eps_list = {0.05, 0.1, 0.2};

    ChainConfig sampler;
    bool has_sampler = false;
    double sampler_c = 0.0;  // 0 means the last scheduled c

    std::string resolved_json;
};

/// Parse and validate an experiment from JSON text. Unknown keys are an error.
ExperimentConfig parse_config(const std::string& json_text);

/// Read the file, then parse_config. I/O failures become ConfigError.
ExperimentConfig load_config(const std::string& path);

}  // namespace xylab
