#include "xylab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "xylab/kernels.hpp"

namespace xylab {

namespace {

// Inverse-CDF draw over cells, reusing the selecting uniform for the position
// within the cell: conditional on the cell, (u - C_lo)/(C_hi - C_lo) is again
// uniform, so one draw yields both without correlation artifacts.
int draw_cell(const std::vector<double>& cdf, double u, double* frac) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    int j = static_cast<int>(it - cdf.begin());
    if (j >= static_cast<int>(cdf.size())) j = static_cast<int>(cdf.size()) - 1;
    double lo = (j == 0) ? 0.0 : cdf[static_cast<size_t>(j - 1)];
    double hi = cdf[static_cast<size_t>(j)];
    *frac = (hi > lo) ? (u - lo) / (hi - lo) : 0.5;
    if (*frac >= 1.0) *frac = std::nextafter(1.0, 0.0);
    return j;
}

double jittered_angle(const FiberGrid& grid, int node, double frac) {
    double h = grid.cell_width();
    return wrap_angle(grid.nodes[static_cast<size_t>(node)] - 0.5 * h + frac * h);
}

}  // namespace

Chain sample_chain(const EigenSystem& es, const ChainConfig& cfg) {
    if (es.ss.window() != 1)
        throw std::invalid_argument("sample_chain: only single-node windows are samplable (arity <= 2)");
    if (cfg.length <= 0) throw std::invalid_argument("sample_chain: length must be positive");
    if (cfg.burn_in < 0 || cfg.burn_in >= cfg.length)
        throw std::invalid_argument("sample_chain: need length > burn_in >= 0");

    const long S = es.ss.n_states();
    const int L = es.ss.n_letters();

    // Per-state transition CDFs and the stationary start CDF.
    std::vector<std::vector<double>> row_cdf(static_cast<size_t>(S));
    long degenerate_rows = 0;
    for (long s = 0; s < S; ++s) {
        auto& cdf = row_cdf[static_cast<size_t>(s)];
        cdf.resize(static_cast<size_t>(L));
        double acc = 0.0;
        int occupied = 0;
        for (int j = 0; j < L; ++j) {
            double p = std::exp(es.log_transition[static_cast<size_t>(s) * L + j]);
            if (p > 0.0) ++occupied;
            acc += p;
            cdf[static_cast<size_t>(j)] = acc;
        }
        for (auto& v : cdf) v /= acc;
        cdf.back() = 1.0;
        if (occupied <= 1) ++degenerate_rows;
    }
    std::vector<double> start_cdf(static_cast<size_t>(S));
    {
        double acc = 0.0;
        for (long s = 0; s < S; ++s) {
            acc += es.mu_state[static_cast<size_t>(s)];
            start_cdf[static_cast<size_t>(s)] = acc;
        }
        for (auto& v : start_cdf) v /= acc;
        start_cdf.back() = 1.0;
    }

    Chain chain;
    chain.seed = cfg.seed;
    if (degenerate_rows > 0)
        chain.notes.push_back(std::to_string(degenerate_rows) +
                              " transition rows put all mass on a single cell");

    SplitMix64 rng(cfg.seed);
    const long total = cfg.length + cfg.burn_in;
    std::vector<double> generated(static_cast<size_t>(total));

    long state;
    if (cfg.start == ChainConfig::Start::FixedState) {
        state = es.grid.nearest_node(cfg.start_angle);
        generated[0] = wrap_angle(cfg.start_angle);
        double snap = es.grid.snap_distance(cfg.start_angle);
        if (snap > 0.0)
            chain.notes.push_back("start state snapped by " + std::to_string(snap) + " rad");
    } else {
        double frac;
        state = draw_cell(start_cdf, rng.uniform(), &frac);
        generated[0] = jittered_angle(es.grid, static_cast<int>(state), frac);
    }

    for (long t = 1; t < total; ++t) {
        double frac;
        int j = draw_cell(row_cdf[static_cast<size_t>(state)], rng.uniform(), &frac);
        generated[static_cast<size_t>(t)] = jittered_angle(es.grid, j, frac);
        state = es.ss.next_state(j, state);
    }

    // The prepend chain writes coordinates from the tail inward; reversing
    // restores coordinate order and leaves the burn-in at the dropped end.
    chain.angles.resize(static_cast<size_t>(cfg.length));
    for (long i = 0; i < cfg.length; ++i)
        chain.angles[static_cast<size_t>(i)] = generated[static_cast<size_t>(total - 1 - i)];
    return chain;
}

BirkhoffReport birkhoff_check(const Chain& chain, const Potential& f, const EigenSystem& es) {
    const int k = f.arity();
    const long M = static_cast<long>(chain.angles.size());
    const long terms = M - k + 1;
    if (terms < 64) throw std::invalid_argument("birkhoff_check: chain too short for batch means");

    BirkhoffReport rep;
    rep.terms = terms;
    rep.reference = f_mean(es, f);

    const int n_batches = 32;
    std::vector<double> batch_mean(n_batches, 0.0);
    std::vector<long> batch_count(n_batches, 0);
    double sum = 0.0;
    double args[3];
    for (long t = 0; t < terms; ++t) {
        for (int i = 0; i < k; ++i) args[i] = chain.angles[static_cast<size_t>(t + i)];
        double v = f(std::span<const double>(args, static_cast<size_t>(k)));
        sum += v;
        int b = static_cast<int>(t * n_batches / terms);
        batch_mean[static_cast<size_t>(b)] += v;
        batch_count[static_cast<size_t>(b)] += 1;
    }
    rep.average = sum / static_cast<double>(terms);

    double var = 0.0;
    for (int b = 0; b < n_batches; ++b) {
        batch_mean[static_cast<size_t>(b)] /= static_cast<double>(batch_count[static_cast<size_t>(b)]);
        double d = batch_mean[static_cast<size_t>(b)] - rep.average;
        var += d * d;
    }
    var /= (n_batches - 1);
    rep.std_error = std::sqrt(var / n_batches);
    rep.z_score = (rep.std_error > 0.0) ? (rep.average - rep.reference) / rep.std_error : 0.0;
    return rep;
}

MarginalReport empirical_vs_marginal(const Chain& chain, const EigenSystem& es) {
    MarginalReport rep;
    rep.samples = static_cast<long>(chain.angles.size());
    CircleDistribution emp = CircleDistribution::samples(chain.angles);
    CircleDistribution ref = CircleDistribution::cell_masses(es.grid, es.mu_marginal);
    rep.w1 = w1_circle(emp, ref);
    return rep;
}

double stationarity_residual(const EigenSystem& es) {
    const long S = es.ss.n_states();
    std::vector<double> log_mu(static_cast<size_t>(S)), pushed(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s) log_mu[static_cast<size_t>(s)] = std::log(es.mu_state[static_cast<size_t>(s)]);
    lse_apply_adjoint(es.log_transition, es.ss, log_mu, pushed);
    double worst = 0.0;
    for (long s = 0; s < S; ++s)
        worst = std::max(worst,
                         std::fabs(std::exp(pushed[static_cast<size_t>(s)]) - es.mu_state[static_cast<size_t>(s)]));
    return worst;
}

double box_frequency(const std::vector<double>& angles, const ArcSet& set) {
    set.validate();
    const int d = std::max(set.depth(), 1);
    const long M = static_cast<long>(angles.size());
    if (M < d) throw std::invalid_argument("box_frequency: chain shorter than the set depth");

    struct View {
        const double* p;
        double coordinate(size_t j) const { return p[j]; }
    };
    long hits = 0;
    const long windows = M - d + 1;
    for (long t = 0; t < windows; ++t)
        if (set.contains(View{angles.data() + t})) ++hits;
    return static_cast<double>(hits) / static_cast<double>(windows);
}

}  // namespace xylab
