#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "xylab/arcset.hpp"
#include "xylab/grid.hpp"
#include "xylab/maxplus.hpp"
#include "xylab/potential.hpp"
#include "xylab/sequence.hpp"
#include "xylab/transfer.hpp"

namespace xylab {

/// Raised by rate computations whose hypotheses require a unique maximizing
/// measure when the tied-argmax digraph says it is not.
struct DegeneratePotentialError : std::runtime_error {
    explicit DegeneratePotentialError(const std::string& what) : std::runtime_error(what) {}
};

/// Per-window-coordinate Lipschitz bounds of the interpolated subaction
/// (largest adjacent-node difference over the cell width).
std::vector<double> v_node_lipschitz(const Subaction& sub);

/// R_minus = f + V - V(sigma .) - beta(f) <= 0 as an evaluable potential of
/// arity window + 1, with V interpolated between grid nodes. The Lipschitz
/// data combines f's bounds with v_node_lipschitz, so holder_seminorm(theta)
/// of the result bounds |R|_theta including the interpolation kinks.
Potential r_minus_potential(const Potential& f, const Subaction& sub);

/// Partial sums of the transition cost R_plus = -R_minus >= 0 along the orbit
/// of one point. `value` is always a valid lower bound for the infinite sum;
/// `exact` certifies it as the full value (the tail was verified to run along
/// a zero-cost cycle for one whole period past the head).
struct RateEvaluation {
    enum class Kind { Finite, DivergentAbove };

    BasePoint point;
    std::vector<double> partial_sums;  // n-term sums, n = 1..N
    Kind kind = Kind::Finite;          // DivergentAbove once a partial sum exceeds cap
    double value = 0.0;                // last partial sum
    bool exact = false;
    double cap = 50.0;
    double snap_distance = 0.0;  // radians, max over the coordinates read
};

RateEvaluation rate_partial(const BasePoint& x, const Subaction& sub, const Potential& f, int n_terms,
                            double cap = 50.0);

/// Infimum of the total cost over the set: min-plus value iteration over the
/// constrained coordinates, closed by the exact least tail cost to a zero-cost
/// cycle. rate is +inf when the constraints exclude every grid word.
struct SetRate {
    double rate = 0.0;
    bool exact = false;
};

SetRate set_rate_inf(const ArcSet& set, const Subaction& sub, int depth, long budget = 1'000'000'000);

struct LdpOptions {
    EigenOptions eig;
    MaxPlusOptions maxplus;
    int rate_depth = -1;  // horizon for set_rate_inf; -1 means the set's own depth
};

/// One measured decay point: value = (1/c) log of the measured mass, n = -1
/// for Gibbs-measure points and the iterate count for operator points.
struct SlopePoint {
    double c = 0.0;
    int n = -1;
    double value = 0.0;
};

/// Decay-rate comparison for one arc set: the grid rate bound against
/// least-squares slopes of the measured log-masses over the schedule tail.
struct LdpReport {
    std::string set_name;
    double rate_lower_bound = 0.0;
    bool rate_exact = false;

    std::vector<SlopePoint> slopes;    // every measured (c[, n]) point
    std::vector<SlopePoint> diagonal;  // operator runs: the (c, n(c)) diagonal actually fitted

    double fit_slope = 0.0;      // LS slope of log mass against c over the tail of the schedule
    double fit_intercept = 0.0;
    double fit_residual = 0.0;   // max |log mass - fit| over the fitted points
    double agreement_rel_gap = 0.0;  // |fit_slope + rate| / rate (absolute gap when rate ~ 0)
    std::vector<std::string> notes;
};

/// Decay of mu_c(set) along the schedule. Throws DegeneratePotentialError when
/// the maximizing measure is not unique (hypothesis guard).
LdpReport empirical_mu_rate(const Potential& f, const FiberGrid& grid, const ArcSet& set,
                            const std::vector<double>& c_schedule, const LdpOptions& opt = {});

/// Decay of (L_g^n 1_set)(x) over the (c, n) grid; the fit runs along the
/// diagonal n(c) = max(depth, ceil(c/5)). Same degeneracy guard.
LdpReport empirical_operator_rate(const Potential& f, const FiberGrid& grid, const ArcSet& set,
                                  const BasePoint& x, const std::vector<double>& c_schedule,
                                  const std::vector<int>& n_schedule, const LdpOptions& opt = {});

/// Lower-semicontinuity check of the partial costs along a sequence of points
/// approaching z: each probe must satisfy
///   R_plus^N(z_j) >= R_plus^N(z) - |R|_theta * sum_t d(sigma^t z_j, sigma^t z) - slack.
struct LscReport {
    double limit_value = 0.0;          // R_plus^N at z
    std::vector<double> probe_values;  // R_plus^N at each z_j
    std::vector<double> tolerances;    // Holder modulus per probe
    std::vector<std::uint8_t> ok;
    bool all_ok = false;
    double min_tail_value = 0.0;  // min probe value over the last half of the sequence
    double holder_norm = 0.0;     // the |R|_theta bound used
    double slack = 1e-9;
};

LscReport lsc_probe(const Subaction& sub, const Potential& f, const BasePoint& z,
                    const std::vector<BasePoint>& approach_seq, int n_terms, const ShiftMetric& metric = ShiftMetric(0.5));

/// Samples of (1/c) log (L_{cR}^n 1)(x) - n eps_c / c (the calibrated-defect
/// cancellation), over a (c, n, probe) grid. `raw` keeps the uncorrected
/// (1/c) log value for the fixed-offset differences.
struct CancellationSample {
    double c = 0.0;
    int n = 0;
    int probe = 0;
    double value = 0.0;
    double raw = 0.0;
    double snap_distance = 0.0;
};

struct CancellationReport {
    std::vector<CancellationSample> samples;
    std::vector<CancellationSample> fixed_gaps;  // value = |raw(n_next) - raw(n)| per consecutive pair
    double diag_max_abs = 0.0;                   // max |value| at the largest scheduled (c, n)
    std::vector<std::string> notes;
};

CancellationReport beta_cancellation_check(const Potential& f, const FiberGrid& grid,
                                           const std::vector<double>& c_schedule,
                                           const std::vector<int>& n_schedule,
                                           const std::vector<BasePoint>& probes, const LdpOptions& opt = {});

}  // namespace xylab
