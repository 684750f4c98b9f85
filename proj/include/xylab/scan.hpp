#pragma once

#include <string>
#include <vector>

#include "xylab/maxplus.hpp"
#include "xylab/potential.hpp"
#include "xylab/transfer.hpp"
#include "xylab/wasserstein.hpp"

namespace xylab {

inline const std::vector<double>& default_c_schedule() {
    static const std::vector<double> s{1, 2, 5, 10, 20, 50, 100, 200};
    return s;
}

/// One temperature point of a scan. delta_sup is the constant-matched sup norm
/// of log h_c - c V (the finite-temperature correction of the subaction limit);
/// delta_lemma_sup is the sup norm of g_c - c R_minus, the correction entering
/// the fiber-mass bound. Both match additive constants at the reference state.
struct ScanRecord {
    double c = 0.0;
    double log_beta = 0.0;
    double beta_estimate = 0.0;  // log_beta / c
    double eps_c = 0.0;          // log_beta - c * beta_f
    double delta_sup = 0.0;
    double delta_lemma_sup = 0.0;
    double f_mean = 0.0;
    double w1_to_limit = 0.0;  // radians
    double eig_residual = 0.0;
    int eig_iterations = 0;
};

struct ScanOptions {
    std::vector<double> c_schedule = default_c_schedule();
    EigenOptions eig;
    MaxPlusOptions maxplus;
};

struct ScanResult {
    std::vector<ScanRecord> records;
    Subaction sub;
    UniquenessReport uniqueness;
    CircleDistribution limit_marginal;  // recurrent-class first-coordinate atoms
    std::vector<std::string> notes;     // soft invariant findings, never errors
};

ScanResult run_scan(const Potential& f, const FiberGrid& grid, const ScanOptions& opt = {});

/// Selection diagnostics over a finished scan: monotone trend of the f-means,
/// terminal gap to beta(f), and the W1 trend toward the limit marginal.
struct SelectionReport {
    bool f_mean_nondecreasing = false;  // up to `slack`
    double f_mean_gap = 0.0;            // beta_f - f_mean at c_max
    bool w1_decreasing_tail = false;    // over the last half of the schedule
    double w1_final = 0.0;
    bool degenerate = false;  // degenerate potentials make no selection claim
    double slack = 1e-8;
    std::vector<std::string> findings;
};

SelectionReport selection_report(const ScanResult& scan, double gap_tol = 0.05);

/// Fiber-mass bound: for each eps, the arc mass of {a : R_minus(a x) > -eps}
/// minimized over probe points, against the bound psi_eps = 1/(3 e^{sup|delta|})
/// taken at the smallest scheduled c0 with e^{-c0 eps + sup|delta|} <= 1/2.
struct FiberMassReport {
    struct Entry {
        double eps = 0.0;
        double c0 = 0.0;          // 0 when no scheduled c satisfies the c0 inequality
        double psi = 0.0;         // 0 when c0 missing
        double min_mass = 0.0;    // interpolated arc mass, min over probes
        double max_mass = 0.0;
        double min_node_mass = 0.0;  // plain node-counting mass, for reference
        bool bound_holds = false;
    };
    std::vector<Entry> entries;
};

FiberMassReport fiber_mass_check(const Potential& f, const Subaction& sub,
                                 const std::vector<ScanRecord>& records, const std::vector<double>& eps_list,
                                 const std::vector<BasePoint>& probes);

/// Arc mass of {a : R_minus(a x) > -eps} for one probe, by piecewise-linear
/// interpolation of R_minus between fine grid samples (refine subsamples each
/// grid cell). Node-count mass is the plain quadrature count.
struct FiberMass {
    double interpolated = 0.0;
    double node_count = 0.0;
};
FiberMass fiber_mass(const Potential& f, const Subaction& sub, const BasePoint& x, double eps, int refine = 16);

}  // namespace xylab
