#include "xylab/export.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "xylab/version.hpp"

namespace xylab {

namespace {

using nlohmann::json;

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

json with_header(const ExperimentConfig& cfg) {
    json j;
    j["version"] = version;
    j["config"] = json::parse(cfg.resolved_json);
    return j;
}

std::string write_text(const std::string& dir, const std::string& name, const std::string& body) {
    std::filesystem::create_directories(dir);
    std::filesystem::path p = std::filesystem::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("export: cannot write '" + p.string() + "'");
    out << body;
    return p.string();
}

std::string write_json(const std::string& dir, const std::string& name, const json& j) {
    return write_text(dir, name, j.dump(2) + "\n");
}

std::string csv_header(const ExperimentConfig& cfg) {
    return std::string("# xylab ") + version + "\n# config " + cfg.resolved_json + "\n";
}

json slopes_json(const std::vector<SlopePoint>& pts) {
    json arr = json::array();
    for (const auto& p : pts) {
        json e;
        e["c"] = p.c;
        if (p.n >= 0)
            e["n"] = p.n;
        else
            e["n"] = nullptr;
        e["value"] = p.value;
        arr.push_back(e);
    }
    return arr;
}

}  // namespace

std::string write_eigensystem_json(const EigenSystem& es, const ExperimentConfig& cfg,
                                   const std::string& dir) {
    json j = with_header(cfg);
    j["c"] = es.c;
    j["log_beta_c"] = es.log_beta;
    j["residual"] = es.residual;
    j["nodes"] = es.grid.nodes;
    json h = json::array(), nu = json::array();
    for (double v : es.log_h) h.push_back(std::exp(v));
    for (double v : es.log_nu) nu.push_back(std::exp(v));
    j["h"] = h;
    j["nu"] = nu;
    j["mu_marginal"] = es.mu_marginal;
    return write_json(dir, "eig_c" + fmt(es.c, "%.12g") + ".json", j);
}

std::string write_subaction_json(const Subaction& sub, const UniquenessReport& uq,
                                 const ExperimentConfig& cfg, const std::string& dir) {
    json j = with_header(cfg);
    j["beta_f"] = sub.beta_f;
    j["nodes"] = sub.grid.nodes;
    j["V"] = sub.V;
    j["residual"] = sub.span_residual;
    j["degenerate"] = uq.degenerate;
    j["recurrent_class"] = uq.recurrent_states;
    return write_json(dir, "subaction.json", j);
}

std::string write_scan_table(const ScanResult& scan, const ExperimentConfig& cfg, const std::string& dir,
                             bool as_json) {
    if (as_json) {
        json j = with_header(cfg);
        json rows = json::array();
        for (const auto& r : scan.records) {
            json e;
            e["c"] = r.c;
            e["log_beta_c"] = r.log_beta;
            e["beta_estimate"] = r.beta_estimate;
            e["eps_c"] = r.eps_c;
            e["eps_c_over_c"] = r.eps_c / r.c;
            e["delta_sup_over_c"] = r.delta_sup / r.c;
            e["f_mean"] = r.f_mean;
            e["W1"] = r.w1_to_limit;
            rows.push_back(e);
        }
        j["rows"] = rows;
        return write_json(dir, "scan_table.json", j);
    }
    std::string body = csv_header(cfg);
    body += "c,log_beta_c,beta_estimate,eps_c,eps_c_over_c,delta_sup_over_c,f_mean,W1\n";
    for (const auto& r : scan.records) {
        body += fmt(r.c) + "," + fmt(r.log_beta) + "," + fmt(r.beta_estimate) + "," + fmt(r.eps_c) + "," +
                fmt(r.eps_c / r.c) + "," + fmt(r.delta_sup / r.c) + "," + fmt(r.f_mean) + "," +
                fmt(r.w1_to_limit) + "\n";
    }
    return write_text(dir, "scan.csv", body);
}

std::string write_scan_report_json(const ScanResult& scan, const SelectionReport& sel,
                                   const FiberMassReport& fm, const ExperimentConfig& cfg,
                                   const std::string& dir) {
    json j = with_header(cfg);
    j["selection"] = {{"f_mean_nondecreasing", sel.f_mean_nondecreasing},
                      {"f_mean_gap", sel.f_mean_gap},
                      {"w1_decreasing_tail", sel.w1_decreasing_tail},
                      {"w1_final", sel.w1_final},
                      {"degenerate", sel.degenerate},
                      {"findings", sel.findings}};
    json entries = json::array();
    for (const auto& e : fm.entries)
        entries.push_back({{"eps", e.eps},
                           {"c0", e.c0},
                           {"psi", e.psi},
                           {"min_mass", e.min_mass},
                           {"max_mass", e.max_mass},
                           {"min_node_mass", e.min_node_mass},
                           {"bound_holds", e.bound_holds}});
    j["fiber_mass"] = {{"entries", entries}};
    j["uniqueness"] = {{"degenerate", scan.uniqueness.degenerate},
                       {"n_sink_classes", scan.uniqueness.n_sink_classes},
                       {"detail", scan.uniqueness.detail}};
    j["notes"] = scan.notes;
    return write_json(dir, "scan_report.json", j);
}

std::string write_ldp_json(const LdpReport& rep, const std::string& stem, const ExperimentConfig& cfg,
                           const std::string& dir) {
    json j = with_header(cfg);
    j["set"] = rep.set_name;
    j["rate_lower_bound"] = rep.rate_lower_bound;
    j["exact"] = rep.rate_exact;
    j["slopes"] = slopes_json(rep.slopes);
    if (!rep.diagonal.empty()) j["diagonal"] = slopes_json(rep.diagonal);
    j["fit"] = rep.fit_slope;
    j["fit_intercept"] = rep.fit_intercept;
    j["residual"] = rep.fit_residual;
    j["agreement"] = rep.agreement_rel_gap;
    j["notes"] = rep.notes;
    return write_json(dir, "ldp_" + stem + ".json", j);
}

std::string write_ldp_grid(const LdpReport& mu, const LdpReport& op, const std::string& stem,
                           const ExperimentConfig& cfg, const std::string& dir, bool as_json) {
    if (as_json) {
        json j = with_header(cfg);
        j["mu"] = slopes_json(mu.slopes);
        j["operator"] = slopes_json(op.slopes);
        return write_json(dir, "ldp_grid_" + stem + ".json", j);
    }
    std::string body = csv_header(cfg);
    body += "c,n,value\n";
    for (const auto& p : mu.slopes) body += fmt(p.c) + ",," + fmt(p.value) + "\n";
    for (const auto& p : op.slopes)
        body += fmt(p.c) + "," + std::to_string(p.n) + "," + fmt(p.value) + "\n";
    return write_text(dir, "ldp_grid_" + stem + ".csv", body);
}

std::string write_chain(const Chain& chain, const ExperimentConfig& cfg, const std::string& dir,
                        bool as_json) {
    if (as_json) {
        json j = with_header(cfg);
        j["seed"] = chain.seed;
        j["angles"] = chain.angles;
        j["notes"] = chain.notes;
        return write_json(dir, "chain.json", j);
    }
    std::string body = csv_header(cfg);
    body += "angle\n";
    for (double a : chain.angles) body += fmt(a) + "\n";
    return write_text(dir, "chain.csv", body);
}

std::string write_sample_report_json(const Chain& chain, const BirkhoffReport& bk,
                                     const MarginalReport& mg, double stationarity,
                                     const ExperimentConfig& cfg, const std::string& dir) {
    json j = with_header(cfg);
    j["seed"] = chain.seed;
    j["samples"] = mg.samples;
    j["birkhoff"] = {{"average", bk.average},
                     {"reference", bk.reference},
                     {"std_error", bk.std_error},
                     {"z_score", bk.z_score},
                     {"terms", bk.terms}};
    j["marginal_w1"] = mg.w1;
    j["stationarity_residual"] = stationarity;
    j["thresholds"] = {{"birkhoff_z", 3.0}, {"w1_scaling", {1.4, 2.8}}};
    j["notes"] = chain.notes;
    return write_json(dir, "sample_report.json", j);
}

}  // namespace xylab
