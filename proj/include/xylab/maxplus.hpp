#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "xylab/grid.hpp"
#include "xylab/potential.hpp"
#include "xylab/statespace.hpp"

namespace xylab {

struct MaxPlusOptions {
    double tol = 1e-12;      // span of successive differences at which RVI stops
    int max_sweeps = 100000;
    double tie_tol = 1e-9;   // letters within this of the row max count as tied
    bool cross_check = false;  // verify beta against the argmax policy's cycle means
};

/// Calibrated subaction data for the zero-temperature problem
/// max_{z in sigma^{-1} x} [f(z) + V(z)] = beta + V(x):
/// V is normalized to 0 at the all-zeros window (the node nearest angle 0), and
/// cost[s,j] = beta + V(s) - V(next(j,s)) - f(a_j, s) >= 0 is the transition
/// cost of the forward step next(j,s) -> s. Calibration means every state has a
/// zero-cost incoming forward edge.
struct Subaction {
    FiberGrid grid;
    StateSpace ss;
    std::string potential_name;

    double beta_f = 0.0;
    std::vector<double> V;                        // per state, V[0] = 0
    std::vector<double> cost;                     // [s*L+j], >= -calibration slack
    std::vector<std::vector<int>> tied_letters;   // per state, maximizers within tie_tol
    double calibration_residual = 0.0;            // sup_s |min_j cost[s,j]|
    double min_cost = 0.0;                        // most negative table entry (roundoff scale)
    double span_residual = 0.0;                   // final RVI span
    double policy_gap = -1.0;                     // cross-check result, -1 when not run
    int sweeps = 0;
    double tie_tol = 1e-9;

    /// Multilinear interpolation of V at off-grid window coordinates (angles).
    double interpolate_V(const double* angles) const;
};

Subaction solve_maxplus(const Potential& f, const FiberGrid& grid, const MaxPlusOptions& opt = {});

/// Sink-class analysis of the tied-argmax digraph (edges s -> next(j,s) for tied
/// j). The maximizing set is degenerate when the digraph has more than one sink
/// strongly connected component, or a tie inside a sink component.
struct UniquenessReport {
    bool degenerate = false;
    int n_sink_classes = 0;
    bool tie_in_sink = false;
    std::vector<long> recurrent_states;  // union of sink components, sorted
    std::string detail;
};

UniquenessReport uniqueness_probe(const Subaction& sub);

/// Best average of f over periodic grid orbits of period <= max_period, by
/// exhaustive search (cyclic windows). Throws std::invalid_argument when the
/// enumeration would exceed `budget` words.
struct OrbitOracle {
    double best_mean = 0.0;
    int period = 0;
    std::vector<int> nodes;  // lexicographically smallest rotation of the best word
};

OrbitOracle periodic_orbit_oracle(const Potential& f, const FiberGrid& grid, int max_period,
                                  long budget = 10'000'000);

/// Least total forward cost from each state to the set of states on a zero-cost
/// cycle (costs clamped at 0; zero edges are those <= zero_tol). This is the
/// exact tail of the infinite-horizon cost at grid resolution.
std::vector<double> tail_min(const Subaction& sub, double zero_tol = 1e-9);

/// States lying on a cycle of the zero-cost subgraph.
std::vector<long> zero_cycle_states(const Subaction& sub, double zero_tol = 1e-9);

}  // namespace xylab
