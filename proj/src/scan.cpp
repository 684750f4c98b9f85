#include "xylab/scan.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace xylab {

namespace {

// R_minus(a x) = f(ax) + V(window(ax)) - V(window(x)) - beta_f with V
// interpolated off-grid; `angles` holds the first arity coordinates of ax.
double r_minus_at(const Potential& f, const Subaction& sub, const double* angles) {
    const int w = sub.ss.window();
    double shifted[2];
    for (int i = 0; i < w; ++i) shifted[i] = angles[i + 1];
    return f(std::span<const double>(angles, static_cast<size_t>(f.arity()))) + sub.interpolate_V(angles) -
           sub.interpolate_V(shifted) - sub.beta_f;
}

}  // namespace

ScanResult run_scan(const Potential& f, const FiberGrid& grid, const ScanOptions& opt) {
    if (opt.c_schedule.empty()) throw std::invalid_argument("run_scan: empty c schedule");
    for (size_t i = 1; i < opt.c_schedule.size(); ++i)
        if (!(opt.c_schedule[i] > opt.c_schedule[i - 1]))
            throw std::invalid_argument("run_scan: c schedule must be increasing");
    if (!(opt.c_schedule.front() > 0.0)) throw std::invalid_argument("run_scan: c schedule must be positive");

    ScanResult out;
    out.sub = solve_maxplus(f, grid, opt.maxplus);
    out.uniqueness = uniqueness_probe(out.sub);

    // Candidate limit marginal: uniform atoms over the distinct first window
    // coordinates of the recurrent states (a point mass when the maximizing set
    // is a unique fixed point).
    {
        std::set<int> first;
        for (long s : out.uniqueness.recurrent_states) first.insert(out.sub.ss.first_node(s));
        for (int i : first)
            out.limit_marginal.atoms.push_back({grid.nodes[static_cast<size_t>(i)],
                                                1.0 / static_cast<double>(first.size())});
    }

    const StateSpace& ss = out.sub.ss;
    const long S = ss.n_states();
    const int L = ss.n_letters();
    for (double c : opt.c_schedule) {
        LogKernel kernel = build_kernel(f, c, grid);
        EigenSystem es;
        try {
            es = leading_eigensystem(kernel, opt.eig);
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError("scan point c=" + std::to_string(c) + ": " + e.what(), e.residual,
                                      e.iterations);
        }
        ScanRecord rec;
        rec.c = c;
        rec.log_beta = es.log_beta;
        rec.beta_estimate = es.log_beta / c;
        rec.eps_c = es.log_beta - c * out.sub.beta_f;
        rec.eig_residual = es.residual;
        rec.eig_iterations = es.iterations;

        // delta_scan = log h - c V, additive constant matched at the reference state.
        std::vector<double> delta(static_cast<size_t>(S));
        for (long s = 0; s < S; ++s)
            delta[static_cast<size_t>(s)] = es.log_h[static_cast<size_t>(s)] - c * out.sub.V[static_cast<size_t>(s)];
        const double ref = delta[0];
        double dsup = 0.0;
        for (long s = 0; s < S; ++s) dsup = std::max(dsup, std::fabs(delta[static_cast<size_t>(s)] - ref));
        rec.delta_sup = dsup;

        // delta_lemma = g_c - c R_minus = delta(next) - delta(s) - eps_c
        // (reference constants cancel in the difference).
        double dlem = 0.0;
        for (long s = 0; s < S; ++s)
            for (int j = 0; j < L; ++j) {
                double v = delta[static_cast<size_t>(ss.next_state(j, s))] - delta[static_cast<size_t>(s)] - rec.eps_c;
                dlem = std::max(dlem, std::fabs(v));
            }
        rec.delta_lemma_sup = dlem;

        rec.f_mean = f_mean(es, f);
        rec.w1_to_limit = w1_circle(CircleDistribution::node_masses(grid, es.mu_marginal), out.limit_marginal);

        if (rec.f_mean > out.sub.beta_f + 100 * std::max(es.residual, out.sub.calibration_residual) + 1e-10)
            out.notes.push_back("f_mean exceeds beta_f beyond residual slack at c=" + std::to_string(c));
        if (rec.beta_estimate < out.sub.beta_f - 1e-9)
            out.notes.push_back("beta_estimate fell below beta_f at c=" + std::to_string(c));
        out.records.push_back(rec);
    }
    return out;
}

SelectionReport selection_report(const ScanResult& scan, double gap_tol) {
    if (scan.records.size() < 3) throw std::invalid_argument("selection_report: need at least 3 scan records");
    SelectionReport rep;
    rep.degenerate = scan.uniqueness.degenerate;

    rep.f_mean_nondecreasing = true;
    for (size_t i = 1; i < scan.records.size(); ++i)
        if (scan.records[i].f_mean < scan.records[i - 1].f_mean - rep.slack) {
            rep.f_mean_nondecreasing = false;
            rep.findings.push_back("f_mean decreased between c=" + std::to_string(scan.records[i - 1].c) +
                                   " and c=" + std::to_string(scan.records[i].c));
        }
    rep.f_mean_gap = scan.sub.beta_f - scan.records.back().f_mean;
    if (!rep.degenerate && rep.f_mean_gap > gap_tol)
        rep.findings.push_back("terminal f_mean gap " + std::to_string(rep.f_mean_gap) + " exceeds " +
                               std::to_string(gap_tol));

    rep.w1_final = scan.records.back().w1_to_limit;
    rep.w1_decreasing_tail = true;
    size_t half = scan.records.size() / 2;
    for (size_t i = half + 1; i < scan.records.size(); ++i)
        if (scan.records[i].w1_to_limit > scan.records[i - 1].w1_to_limit + rep.slack) rep.w1_decreasing_tail = false;
    if (rep.degenerate)
        rep.findings.push_back("degenerate maximizing set: no selection claim, W1 trend reported as-is");
    return rep;
}

FiberMass fiber_mass(const Potential& f, const Subaction& sub, const BasePoint& x, double eps, int refine) {
    const FiberGrid& grid = sub.grid;
    const int n = grid.n_nodes;
    const int m = n * refine;
    const double h = two_pi / m;
    const int k = f.arity();

    // R_minus(a x) sampled on the refined a-grid.
    (void)k;
    std::vector<double> r(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        double a = i * h;
        double full[3] = {a, x.coordinate(0), x.coordinate(1)};
        r[static_cast<size_t>(i)] = r_minus_at(f, sub, full);
    }

    FiberMass fm;
    int count = 0;
    double arc = 0.0;
    for (int i = 0; i < m; ++i) {
        double r0 = r[static_cast<size_t>(i)], r1 = r[static_cast<size_t>((i + 1) % m)];
        bool in0 = r0 > -eps, in1 = r1 > -eps;
        if (in0) ++count;
        if (in0 && in1) {
            arc += h;
        } else if (in0 != in1) {
            // linear crossing of -eps inside the cell
            double t = (-eps - r0) / (r1 - r0);
            arc += in0 ? t * h : (1.0 - t) * h;
        }
    }
    fm.interpolated = arc / two_pi;
    fm.node_count = static_cast<double>(count) / m;
    return fm;
}

FiberMassReport fiber_mass_check(const Potential& f, const Subaction& sub,
                                 const std::vector<ScanRecord>& records, const std::vector<double>& eps_list,
                                 const std::vector<BasePoint>& probes) {
    if (probes.empty()) throw std::invalid_argument("fiber_mass_check: need at least one probe point");
    FiberMassReport rep;
    for (double eps : eps_list) {
        FiberMassReport::Entry e;
        e.eps = eps;
        for (const auto& rec : records) {
            if (std::exp(-rec.c * eps + rec.delta_lemma_sup) <= 0.5) {
                e.c0 = rec.c;
                e.psi = 1.0 / (3.0 * std::exp(rec.delta_lemma_sup));
                break;
            }
        }
        e.min_mass = 1.0;
        e.max_mass = 0.0;
        e.min_node_mass = 1.0;
        for (const auto& x : probes) {
            FiberMass fm = fiber_mass(f, sub, x, eps);
            e.min_mass = std::min(e.min_mass, fm.interpolated);
            e.max_mass = std::max(e.max_mass, fm.interpolated);
            e.min_node_mass = std::min(e.min_node_mass, fm.node_count);
        }
        e.bound_holds = e.c0 > 0.0 && e.min_mass >= e.psi;
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace xylab
