#include "xylab/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xylab {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
    double m = neg_inf;
    for (double x : v)
        if (x > m) m = x;
    if (m == neg_inf) return neg_inf;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace

LogKernel build_kernel(const Potential& f, double c, const FiberGrid& grid) {
    LogKernel k;
    k.grid = grid;
    k.ss = StateSpace::make(grid, f.arity());
    k.c = c;
    k.potential_name = f.name();
    fill_log_kernel(f, c, grid, k.ss, k.table);
    // Nyquist-style guard: a mode of frequency m needs comfortably more than 2m
    // nodes before the uniform-grid quadrature is trustworthy.
    k.resolution_warning = f.max_frequency() > 0 && grid.n_nodes < 8 * f.max_frequency();
    return k;
}

EigenSystem leading_eigensystem(const LogKernel& kernel, const EigenOptions& opt) {
    const StateSpace& ss = kernel.ss;
    const long S = ss.n_states();
    const double log_S = std::log(static_cast<double>(S));

    EigenSystem es;
    es.grid = kernel.grid;
    es.ss = ss;
    es.c = kernel.c;
    es.potential_name = kernel.potential_name;

    // Forward iteration in the log domain: v <- log(Lv) - lb, lb chosen so the
    // uniform-measure integral of h stays 1. The sup change of v equals the
    // eigen-residual of the previous iterate, so the loop exits on the residual.
    std::vector<double> v(static_cast<size_t>(S), 0.0), lv;
    double lb = 0.0;
    int it = 0;
    double change = std::numeric_limits<double>::infinity();
    double lb_change = std::numeric_limits<double>::infinity();
    for (; it < opt.max_iter; ++it) {
        lse_apply(kernel.table, ss, v, lv);
        double lb_new = log_sum_exp(lv) - log_S;
        for (long s = 0; s < S; ++s) lv[static_cast<size_t>(s)] -= lb_new;
        change = sup_abs_diff(lv, v);
        lb_change = std::fabs(lb_new - lb);
        lb = lb_new;
        v.swap(lv);
        if (change < opt.tol && lb_change < opt.tol && it > 0) break;
    }
    if (change >= opt.tol || lb_change >= opt.tol)
        throw NonConvergenceError("leading eigensystem did not converge (c=" + std::to_string(kernel.c) +
                                      ", residual=" + std::to_string(change) + ")",
                                  change, it);
    es.log_beta = lb;
    es.log_h = v;
    es.iterations = it + 1;

    // Exit residual of the final iterate.
    lse_apply(kernel.table, ss, v, lv);
    double res = 0.0;
    for (long s = 0; s < S; ++s) res = std::max(res, std::fabs(lv[static_cast<size_t>(s)] - lb - v[static_cast<size_t>(s)]));
    es.residual = res;

    // Adjoint iteration for nu: u <- log(L* u), recentered so logsumexp(u) = 0.
    std::vector<double> u(static_cast<size_t>(S), -log_S), lu;
    double lb_adj = 0.0;
    int it2 = 0;
    for (; it2 < opt.max_iter; ++it2) {
        lse_apply_adjoint(kernel.table, ss, u, lu);
        double norm = log_sum_exp(lu);
        lb_adj = norm;
        for (long s = 0; s < S; ++s) lu[static_cast<size_t>(s)] -= norm;
        double ch = sup_abs_diff(lu, u);
        u.swap(lu);
        if (ch < opt.tol && it2 > 0) break;
        if (it2 + 1 == opt.max_iter)
            throw NonConvergenceError("adjoint eigensystem did not converge (c=" + std::to_string(kernel.c) + ")",
                                      ch, it2);
    }
    es.log_nu = u;
    es.adjoint_gap = std::fabs(lb_adj - lb);

    // Gibbs state mu ~ h nu and its first-coordinate marginal.
    std::vector<double> log_mu(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s) log_mu[static_cast<size_t>(s)] = v[static_cast<size_t>(s)] + u[static_cast<size_t>(s)];
    double z = log_sum_exp(log_mu);
    es.mu_state.resize(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s) es.mu_state[static_cast<size_t>(s)] = std::exp(log_mu[static_cast<size_t>(s)] - z);
    es.mu_marginal.assign(static_cast<size_t>(ss.n_nodes()), 0.0);
    for (long s = 0; s < S; ++s) es.mu_marginal[static_cast<size_t>(ss.first_node(s))] += es.mu_state[static_cast<size_t>(s)];

    // Normalized log transition kernel: log((1/n) e^{g}) = K + v(next) - v(s) - lb.
    const int L = ss.n_letters();
    es.log_transition.resize(static_cast<size_t>(S) * L);
    for (long s = 0; s < S; ++s)
        for (int j = 0; j < L; ++j)
            es.log_transition[static_cast<size_t>(s) * L + j] =
                kernel.table[static_cast<size_t>(s) * L + j] + v[static_cast<size_t>(ss.next_state(j, s))] -
                v[static_cast<size_t>(s)] - lb;
    return es;
}

double log_gibbs_cylinder(const EigenSystem& es, const ArcSet& set) {
    set.validate();
    const StateSpace& ss = es.ss;
    const long S = ss.n_states();
    const int d = set.depth();
    std::vector<double> w(static_cast<size_t>(S), 0.0), tmp;
    for (int j = 0; j < d; ++j) {
        auto mask = set.node_mask(j, es.grid);
        lse_apply_letter_masked(es.log_transition, ss, mask, w, tmp);
        w.swap(tmp);
    }
    std::vector<double> terms(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s)
        terms[static_cast<size_t>(s)] =
            (es.mu_state[static_cast<size_t>(s)] > 0.0 ? std::log(es.mu_state[static_cast<size_t>(s)]) : neg_inf) +
            w[static_cast<size_t>(s)];
    return log_sum_exp(terms);
}

double gibbs_cylinder(const EigenSystem& es, const ArcSet& set) {
    double lv = log_gibbs_cylinder(es, set);
    return lv == neg_inf ? 0.0 : std::exp(lv);
}

PointValue apply_ln_indicator(const EigenSystem& es, const BasePoint& x, const ArcSet& set, int n) {
    set.validate();
    const int d = set.depth();
    if (n < d) throw std::invalid_argument("apply_ln_indicator: n must be at least the set depth");
    const StateSpace& ss = es.ss;
    const long S = ss.n_states();
    std::vector<double> w(static_cast<size_t>(S), 0.0), tmp;
    for (int j = 0; j < d; ++j) {
        auto mask = set.node_mask(j, es.grid);
        lse_apply_letter_masked(es.log_transition, ss, mask, w, tmp);
        w.swap(tmp);
    }
    for (int j = d; j < n; ++j) {
        lse_apply(es.log_transition, ss, w, tmp);
        w.swap(tmp);
    }
    PointValue pv;
    int idx[2];
    pv.snap_distance = 0.0;
    for (int i = 0; i < ss.window(); ++i) {
        double a = x.coordinate(static_cast<size_t>(i));
        idx[i] = es.grid.nearest_node(a);
        pv.snap_distance = std::max(pv.snap_distance, es.grid.snap_distance(a));
    }
    pv.log_value = w[static_cast<size_t>(ss.state_of_nodes(idx))];
    return pv;
}

double f_mean(const EigenSystem& es, const Potential& f) {
    if (f.arity() != es.ss.arity())
        throw std::invalid_argument("f_mean: potential arity does not match the eigensystem");
    std::vector<double> fv;
    fill_value_table(f, es.grid, es.ss, fv);
    const long S = es.ss.n_states();
    const int L = es.ss.n_letters();
    double acc = 0.0;
    for (long s = 0; s < S; ++s) {
        double row = 0.0;
        for (int j = 0; j < L; ++j)
            row += std::exp(es.log_transition[static_cast<size_t>(s) * L + j]) * fv[static_cast<size_t>(s) * L + j];
        acc += es.mu_state[static_cast<size_t>(s)] * row;
    }
    return acc;
}

std::vector<double> log_iterated_apply(const LogKernel& kernel, int n) {
    std::vector<double> w(static_cast<size_t>(kernel.ss.n_states()), 0.0), tmp;
    for (int i = 0; i < n; ++i) {
        lse_apply(kernel.table, kernel.ss, w, tmp);
        w.swap(tmp);
    }
    return w;
}

}  // namespace xylab
