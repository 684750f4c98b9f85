#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "xylab/export.hpp"
#include "xylab/version.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "csv";
    int threads = 0;
};

void add_common_flags(CLI::App* cmd, Options* opt) {
    cmd->add_option("--config", opt->config_path, "experiment file (JSON)")->required();
    cmd->add_option("--out", opt->out_dir, "output directory");
    cmd->add_option("--format", opt->format, "table format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", opt->threads, "worker threads (0 = library default)");
}

void run_eig(const xylab::ExperimentConfig& cfg, const Options& opt) {
    auto grid = xylab::FiberGrid::uniform(cfg.n_nodes);
    for (double c : cfg.c_schedule) {
        auto es = xylab::leading_eigensystem(xylab::build_kernel(cfg.potential, c, grid), cfg.eig);
        std::string path = xylab::write_eigensystem_json(es, cfg, opt.out_dir);
        std::printf("eig c=%g -> %s\n", c, path.c_str());
    }
}

void run_subaction(const xylab::ExperimentConfig& cfg, const Options& opt) {
    auto grid = xylab::FiberGrid::uniform(cfg.n_nodes);
    auto sub = xylab::solve_maxplus(cfg.potential, grid, cfg.maxplus);
    auto uq = xylab::uniqueness_probe(sub);
    std::string path = xylab::write_subaction_json(sub, uq, cfg, opt.out_dir);
    std::printf("subaction beta_f=%.12g degenerate=%d -> %s\n", sub.beta_f, uq.degenerate ? 1 : 0,
                path.c_str());
}

void run_scan(const xylab::ExperimentConfig& cfg, const Options& opt) {
    if (cfg.c_schedule.size() < 3)
        throw xylab::ConfigError("config: 'c_schedule' needs at least 3 temperatures for the scan command");
    auto grid = xylab::FiberGrid::uniform(cfg.n_nodes);
    xylab::ScanOptions so;
    so.c_schedule = cfg.c_schedule;
    so.eig = cfg.eig;
    so.maxplus = cfg.maxplus;
    auto scan = xylab::run_scan(cfg.potential, grid, so);
    auto sel = xylab::selection_report(scan);
    std::vector<xylab::BasePoint> probes = cfg.probes;
    if (probes.empty()) probes.push_back(xylab::BasePoint::constant(2.0));
    auto fm = xylab::fiber_mass_check(cfg.potential, scan.sub, scan.records, cfg.scan_eps_list, probes);
    std::string table = xylab::write_scan_table(scan, cfg, opt.out_dir, opt.format == "json");
    std::string report = xylab::write_scan_report_json(scan, sel, fm, cfg, opt.out_dir);
    std::printf("scan %zu temperatures -> %s, %s\n", scan.records.size(), table.c_str(), report.c_str());
}

void run_ldp(const xylab::ExperimentConfig& cfg, const Options& opt) {
    if (cfg.sets.empty()) throw xylab::ConfigError("config: 'sets' is required for the ldp command");
    auto grid = xylab::FiberGrid::uniform(cfg.n_nodes);
    xylab::LdpOptions lo;
    lo.eig = cfg.eig;
    lo.maxplus = cfg.maxplus;
    lo.rate_depth = cfg.ldp_rate_depth;
    xylab::BasePoint probe = cfg.probes.empty() ? xylab::BasePoint::constant(1.0) : cfg.probes.front();
    for (const auto& set : cfg.sets) {
        auto mu = xylab::empirical_mu_rate(cfg.potential, grid, set, cfg.c_schedule, lo);
        auto op = xylab::empirical_operator_rate(cfg.potential, grid, set, probe, cfg.c_schedule,
                                                 cfg.n_schedule, lo);
        xylab::write_ldp_json(mu, "mu_" + set.name, cfg, opt.out_dir);
        xylab::write_ldp_json(op, "op_" + set.name, cfg, opt.out_dir);
        std::string gridfile =
            xylab::write_ldp_grid(mu, op, set.name, cfg, opt.out_dir, opt.format == "json");
        std::printf("ldp set=%s rate=%.12g fit=%.12g agreement=%.3g -> %s\n", set.name.c_str(),
                    mu.rate_lower_bound, mu.fit_slope, mu.agreement_rel_gap, gridfile.c_str());
    }
}

void run_sample(const xylab::ExperimentConfig& cfg, const Options& opt) {
    if (!cfg.has_sampler) throw xylab::ConfigError("config: 'sampler' is required for the sample command");
    auto grid = xylab::FiberGrid::uniform(cfg.n_nodes);
    double c = cfg.sampler_c > 0.0 ? cfg.sampler_c : cfg.c_schedule.back();
    auto es = xylab::leading_eigensystem(xylab::build_kernel(cfg.potential, c, grid), cfg.eig);
    auto chain = xylab::sample_chain(es, cfg.sampler);
    auto bk = xylab::birkhoff_check(chain, cfg.potential, es);
    auto mg = xylab::empirical_vs_marginal(chain, es);
    double st = xylab::stationarity_residual(es);
    std::string chainfile = xylab::write_chain(chain, cfg, opt.out_dir, opt.format == "json");
    std::string report = xylab::write_sample_report_json(chain, bk, mg, st, cfg, opt.out_dir);
    std::printf("sample n=%zu w1=%.6g z=%.3g -> %s, %s\n", chain.angles.size(), mg.w1, bk.z_score,
                chainfile.c_str(), report.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("xylab ") + xylab::version +
                 ": transfer-operator laboratory for circle-fiber shifts"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* cmd_eig = app.add_subcommand("eig", "leading eigendata per scheduled temperature");
    CLI::App* cmd_sub = app.add_subcommand("subaction", "zero-temperature calibrated subaction");
    CLI::App* cmd_scan = app.add_subcommand("scan", "temperature scan with selection diagnostics");
    CLI::App* cmd_ldp = app.add_subcommand("ldp", "decay rates of the configured sets");
    CLI::App* cmd_sample = app.add_subcommand("sample", "stationary chain with validation report");
    CLI::App* cmd_all = app.add_subcommand("all", "every stage the config supports");
    for (CLI::App* c : {cmd_eig, cmd_sub, cmd_scan, cmd_ldp, cmd_sample, cmd_all})
        add_common_flags(c, &opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and friends exit 0 through CLI11; genuine usage errors are
        // config-class failures.
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

#ifdef _OPENMP
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
#endif

    try {
        xylab::ExperimentConfig cfg = xylab::load_config(opt.config_path);
        if (cmd_eig->parsed()) run_eig(cfg, opt);
        if (cmd_sub->parsed()) run_subaction(cfg, opt);
        if (cmd_scan->parsed()) run_scan(cfg, opt);
        if (cmd_ldp->parsed()) run_ldp(cfg, opt);
        if (cmd_sample->parsed()) run_sample(cfg, opt);
        if (cmd_all->parsed()) {
            run_eig(cfg, opt);
            run_subaction(cfg, opt);
            run_scan(cfg, opt);
            if (!cfg.sets.empty()) run_ldp(cfg, opt);
            if (cfg.has_sampler) run_sample(cfg, opt);
        }
    } catch (const xylab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const xylab::NonConvergenceError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const xylab::DegeneratePotentialError& e) {
        std::fprintf(stderr, "hypothesis guard: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
