#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "xylab/arcset.hpp"
#include "xylab/grid.hpp"
#include "xylab/kernels.hpp"
#include "xylab/potential.hpp"
#include "xylab/sequence.hpp"
#include "xylab/statespace.hpp"

namespace xylab {

struct NonConvergenceError : std::runtime_error {
    NonConvergenceError(const std::string& what, double res, int iters)
        : std::runtime_error(what), residual(res), iterations(iters) {}
    double residual;
    int iterations;
};

/// Discretized weighted transfer operator at inverse temperature c:
/// (Lw)(s) = sum_j (1/n) exp(c f(a_j, s)) w(next(j, s)), stored in the log domain.
struct LogKernel {
    FiberGrid grid;
    StateSpace ss;
    double c = 1.0;
    std::string potential_name;
    std::vector<double> table;  // [s * n_letters + j] = -log n + c f
    bool resolution_warning = false;
};

LogKernel build_kernel(const Potential& f, double c, const FiberGrid& grid);

struct EigenOptions {
    double tol = 1e-12;     // stop when both log beta increment and log h sup-change fall below
    int max_iter = 100000;  // power-iteration budget
};

/// Leading eigendata of a kernel: log beta, log h (sup of log-change below tol),
/// adjoint eigenmeasure nu, Gibbs state masses mu ~ h*nu, and the normalized
/// log transition kernel whose rows logsumexp to 0 by construction.
struct EigenSystem {
    FiberGrid grid;
    StateSpace ss;
    double c = 1.0;
    std::string potential_name;

    double log_beta = 0.0;
    std::vector<double> log_h;           // per state, normalized: logsumexp(log_h) - log n_states = 0
    std::vector<double> log_nu;          // per state, logsumexp = 0 (nu is a probability measure)
    std::vector<double> mu_state;        // per state, sums to 1
    std::vector<double> mu_marginal;     // per node (first window coordinate), sums to 1
    std::vector<double> log_transition;  // [s*L+j] = log((1/n) e^{g(j,s)}), rows logsumexp to 0

    double residual = 0.0;     // sup_s |log(Lh)(s) - log beta - log h(s)| at exit
    double adjoint_gap = 0.0;  // |log beta from the adjoint iteration - log_beta|
    int iterations = 0;

    /// g_c(j,s) = c f + log h(next) - log h(s) - log beta, recovered from the
    /// normalized kernel.
    double log_g(long s, int j) const {
        return log_transition[static_cast<size_t>(s) * ss.n_letters() + j] +
               std::log(static_cast<double>(ss.n_letters()));
    }
};

EigenSystem leading_eigensystem(const LogKernel& kernel, const EigenOptions& opt = {});

/// log mu_c(A) for an arc-constrained set A, evaluated at grid resolution by the
/// masked chain w <- L_g(mask_j w), j = 0..depth-1, then integrating against the
/// state marginal. Returns -inf when the set misses every grid node.
double log_gibbs_cylinder(const EigenSystem& es, const ArcSet& set);
double gibbs_cylinder(const EigenSystem& es, const ArcSet& set);

struct PointValue {
    double log_value = 0.0;
    double snap_distance = 0.0;  // radians, max over window coordinates
};

/// log (L_g^n 1_A)(x): depth(A) masked applications followed by n - depth plain
/// ones, evaluated at the grid state nearest to x's leading window. Requires
/// n >= depth(A).
PointValue apply_ln_indicator(const EigenSystem& es, const BasePoint& x, const ArcSet& set, int n);

/// Mean of f under the Gibbs state: sum_s mu(s) sum_j p(j|s) f(a_j, s).
double f_mean(const EigenSystem& es, const Potential& f);

/// log(L^n 1) per state for the raw (unnormalized) kernel.
std::vector<double> log_iterated_apply(const LogKernel& kernel, int n);

}  // namespace xylab
