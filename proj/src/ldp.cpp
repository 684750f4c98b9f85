#include "xylab/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>

#include "xylab/kernels.hpp"

namespace xylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

// Least squares of y against x over [i0, end).
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, size_t i0) {
    LineFit fit;
    const size_t m = x.size() - i0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = i0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    for (size_t i = i0; i < x.size(); ++i) {
        double r = std::fabs(y[i] - (fit.intercept + fit.slope * x[i]));
        if (r > fit.max_residual) fit.max_residual = r;
    }
    return fit;
}

size_t tail_start(size_t n_points) {
    size_t i0 = n_points / 2;
    if (n_points - i0 < 2) i0 = n_points - 2;
    return i0;
}

double relative_agreement(double fit_slope, double rate) {
    if (std::isfinite(rate) && rate > 1e-12) return std::fabs(fit_slope + rate) / rate;
    return std::fabs(fit_slope + (std::isfinite(rate) ? rate : 0.0));
}

// Window state nearest to the leading coordinates of x, plus the snap radius.
long nearest_state(const BasePoint& x, const FiberGrid& grid, const StateSpace& ss, double* snap) {
    int nodes[2];
    double worst = 0.0;
    for (int i = 0; i < ss.window(); ++i) {
        double a = x.coordinate(static_cast<size_t>(i));
        nodes[i] = grid.nearest_node(a);
        worst = std::max(worst, grid.snap_distance(a));
    }
    if (snap) *snap = worst;
    return ss.state_of_nodes(nodes);
}

void check_unique(const Potential& f, const Subaction& sub) {
    UniquenessReport uq = uniqueness_probe(sub);
    if (uq.degenerate)
        throw DegeneratePotentialError("LDP hypothesis violated: the maximizing measure for '" + f.name() +
                                       "' is not unique (" + uq.detail + ")");
}

}  // namespace

std::vector<double> v_node_lipschitz(const Subaction& sub) {
    const StateSpace& ss = sub.ss;
    const int n = sub.grid.n_nodes;
    const double h = sub.grid.cell_width();
    std::vector<double> lips(static_cast<size_t>(ss.window()), 0.0);
    int nodes[2];
    for (long s = 0; s < ss.n_states(); ++s) {
        ss.state_nodes(s, nodes);
        for (int i = 0; i < ss.window(); ++i) {
            int save = nodes[i];
            nodes[i] = (save + 1) % n;
            long t = ss.state_of_nodes(nodes);
            nodes[i] = save;
            double slope = std::fabs(sub.V[static_cast<size_t>(s)] - sub.V[static_cast<size_t>(t)]) / h;
            if (slope > lips[static_cast<size_t>(i)]) lips[static_cast<size_t>(i)] = slope;
        }
    }
    return lips;
}

Potential r_minus_potential(const Potential& f, const Subaction& sub) {
    const int w = sub.ss.window();
    const int arity = w + 1;
    const int kf = f.arity();

    std::vector<double> vlips = v_node_lipschitz(sub);
    std::vector<double> lips(static_cast<size_t>(arity), 0.0);
    for (int i = 0; i < arity; ++i) {
        double l = 0.0;
        if (i < kf) l += f.lipschitz()[static_cast<size_t>(i)];
        if (i < w) l += vlips[static_cast<size_t>(i)];
        if (i >= 1 && i - 1 < w) l += vlips[static_cast<size_t>(i - 1)];
        lips[static_cast<size_t>(i)] = l;
    }

    auto subp = std::make_shared<Subaction>(sub);
    auto fp = std::make_shared<Potential>(f);
    Potential p("r_minus[" + f.name() + "]", arity,
                [subp, fp, kf](std::span<const double> a) {
                    double fv = (*fp)(std::span<const double>(a.data(), static_cast<size_t>(kf)));
                    return fv + subp->interpolate_V(a.data()) - subp->interpolate_V(a.data() + 1) -
                           subp->beta_f;
                },
                std::move(lips));
    return p.set_max_frequency(f.max_frequency());
}

RateEvaluation rate_partial(const BasePoint& x, const Subaction& sub, const Potential& f, int n_terms,
                            double cap) {
    if (n_terms < 1) throw std::invalid_argument("rate_partial: need at least one term");
    const int w = sub.ss.window();
    const int kf = f.arity();

    RateEvaluation ev{x, {}, RateEvaluation::Kind::Finite, 0.0, false, cap, 0.0};
    ev.partial_sums.reserve(static_cast<size_t>(n_terms));

    double win0[2], win1[2], args[3];
    double sum = 0.0;
    double snap = 0.0;
    for (int t = 0; t < n_terms; ++t) {
        for (int i = 0; i < w; ++i) win0[i] = x.coordinate(static_cast<size_t>(t + i));
        for (int i = 0; i < w; ++i) win1[i] = x.coordinate(static_cast<size_t>(t + 1 + i));
        for (int i = 0; i < kf; ++i) args[i] = x.coordinate(static_cast<size_t>(t + i));
        double r = sub.beta_f + sub.interpolate_V(win1) - sub.interpolate_V(win0) -
                   f(std::span<const double>(args, static_cast<size_t>(kf)));
        sum += r;
        ev.partial_sums.push_back(sum);
        snap = std::max(snap, sub.grid.snap_distance(x.coordinate(static_cast<size_t>(t))));
    }
    for (int i = 0; i < w; ++i)
        snap = std::max(snap, sub.grid.snap_distance(x.coordinate(static_cast<size_t>(n_terms - 1 + 1 + i))));
    ev.snap_distance = snap;
    ev.value = ev.partial_sums.back();
    ev.kind = (*std::max_element(ev.partial_sums.begin(), ev.partial_sums.end()) > cap)
                  ? RateEvaluation::Kind::DivergentAbove
                  : RateEvaluation::Kind::Finite;

    // Exactness: increments are periodic once the whole window sits in the
    // tail, so one zero period past the head certifies a zero-cost tail.
    if (ev.kind == RateEvaluation::Kind::Finite) {
        const size_t head = x.head_length();
        const size_t period = x.tail_period();
        if (static_cast<size_t>(n_terms) >= head + period) {
            bool zero = true;
            for (size_t t = head; t < head + period; ++t) {
                double r = (t == 0) ? ev.partial_sums[0] : ev.partial_sums[t] - ev.partial_sums[t - 1];
                if (std::fabs(r) > 1e-9) {
                    zero = false;
                    break;
                }
            }
            ev.exact = zero;
        }
    }
    return ev;
}

SetRate set_rate_inf(const ArcSet& set, const Subaction& sub, int depth, long budget) {
    set.validate();
    const int d = set.depth();
    if (depth < d) throw std::invalid_argument("set_rate_inf: depth must cover the constrained coordinates");
    const StateSpace& ss = sub.ss;
    const long S = ss.n_states();
    const int L = ss.n_letters();
    const int w = ss.window();
    const int sweeps = std::max(0, depth - w);
    if (static_cast<long>(sweeps + 1) * S * L > budget)
        throw std::invalid_argument("set_rate_inf: search budget exceeded; lower the depth or the grid size");

    std::vector<std::vector<std::uint8_t>> masks(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) masks[static_cast<size_t>(j)] = set.node_mask(j, sub.grid);

    // Running minimum cost over words whose already-introduced coordinates
    // satisfy the masks, indexed by the current window state.
    std::vector<double> dist(static_cast<size_t>(S), 0.0), swept(static_cast<size_t>(S));
    int nodes[2];
    for (long s = 0; s < S; ++s) {
        ss.state_nodes(s, nodes);
        for (int i = 0; i < w && i < d; ++i)
            if (!masks[static_cast<size_t>(i)][static_cast<size_t>(nodes[i])]) {
                dist[static_cast<size_t>(s)] = kInf;
                break;
            }
    }
    for (int q = 1; q <= sweeps; ++q) {
        minplus_sweep(sub.cost, ss, dist, swept);
        std::swap(dist, swept);
        const int cidx = w + q - 1;  // coordinate introduced by this sweep = last window node
        if (cidx < d) {
            const auto& m = masks[static_cast<size_t>(cidx)];
            for (long s = 0; s < S; ++s) {
                int last = (w == 1) ? static_cast<int>(s) : static_cast<int>(s % L);
                if (!m[static_cast<size_t>(last)]) dist[static_cast<size_t>(s)] = kInf;
            }
        }
    }

    std::vector<double> tail = tail_min(sub);
    double best = kInf;
    for (long s = 0; s < S; ++s) {
        double v = dist[static_cast<size_t>(s)] + tail[static_cast<size_t>(s)];
        if (v < best) best = v;
    }
    SetRate r;
    r.rate = (best < 0.0 && best > -1e-9) ? 0.0 : best;  // calibration slack only
    r.exact = std::isfinite(best);
    return r;
}

LdpReport empirical_mu_rate(const Potential& f, const FiberGrid& grid, const ArcSet& set,
                            const std::vector<double>& c_schedule, const LdpOptions& opt) {
    set.validate();
    if (c_schedule.size() < 2)
        throw std::invalid_argument("empirical_mu_rate: need at least two scheduled temperatures");

    Subaction sub = solve_maxplus(f, grid, opt.maxplus);
    check_unique(f, sub);

    LdpReport rep;
    rep.set_name = set.name;
    const int depth = std::max(set.depth(), opt.rate_depth);
    SetRate sr = set_rate_inf(set, sub, depth);
    rep.rate_lower_bound = sr.rate;
    rep.rate_exact = sr.exact;

    std::vector<double> cs, logs;
    for (double c : c_schedule) {
        EigenSystem es = leading_eigensystem(build_kernel(f, c, grid), opt.eig);
        double lm = log_gibbs_cylinder(es, set);
        if (!std::isfinite(lm)) {
            rep.notes.push_back("log mu underflowed at c = " + std::to_string(c) + "; point dropped");
            continue;
        }
        if (lm > 1e-9) rep.notes.push_back("mu(set) exceeds 1 at c = " + std::to_string(c));
        rep.slopes.push_back({c, -1, lm / c});
        cs.push_back(c);
        logs.push_back(lm);
    }

    if (cs.size() >= 2) {
        LineFit fit = fit_line(cs, logs, tail_start(cs.size()));
        rep.fit_slope = fit.slope;
        rep.fit_intercept = fit.intercept;
        rep.fit_residual = fit.max_residual;
        rep.agreement_rel_gap = relative_agreement(fit.slope, rep.rate_lower_bound);
    } else {
        rep.notes.push_back("too few finite mass points for a slope fit");
        rep.agreement_rel_gap = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

LdpReport empirical_operator_rate(const Potential& f, const FiberGrid& grid, const ArcSet& set,
                                  const BasePoint& x, const std::vector<double>& c_schedule,
                                  const std::vector<int>& n_schedule, const LdpOptions& opt) {
    set.validate();
    if (c_schedule.size() < 2)
        throw std::invalid_argument("empirical_operator_rate: need at least two scheduled temperatures");

    Subaction sub = solve_maxplus(f, grid, opt.maxplus);
    check_unique(f, sub);

    LdpReport rep;
    rep.set_name = set.name;
    const int d = set.depth();
    const int depth = std::max(d, opt.rate_depth);
    SetRate sr = set_rate_inf(set, sub, depth);
    rep.rate_lower_bound = sr.rate;
    rep.rate_exact = sr.exact;

    bool skipped_shallow = false;
    std::vector<double> cs, logs;
    for (double c : c_schedule) {
        EigenSystem es = leading_eigensystem(build_kernel(f, c, grid), opt.eig);
        for (int n : n_schedule) {
            if (n < d) {
                skipped_shallow = true;
                continue;
            }
            PointValue pv = apply_ln_indicator(es, x, set, n);
            rep.slopes.push_back({c, n, pv.log_value / c});
        }
        const int ndiag = std::max({d, 1, static_cast<int>(std::ceil(c / 5.0))});
        PointValue pv = apply_ln_indicator(es, x, set, ndiag);
        if (std::isfinite(pv.log_value)) {
            rep.diagonal.push_back({c, ndiag, pv.log_value / c});
            cs.push_back(c);
            logs.push_back(pv.log_value);
        } else {
            rep.notes.push_back("operator mass underflowed at c = " + std::to_string(c) + "; point dropped");
        }
    }
    if (skipped_shallow)
        rep.notes.push_back("iterate counts below the set depth were skipped");

    if (cs.size() >= 2) {
        LineFit fit = fit_line(cs, logs, tail_start(cs.size()));
        rep.fit_slope = fit.slope;
        rep.fit_intercept = fit.intercept;
        rep.fit_residual = fit.max_residual;
        rep.agreement_rel_gap = relative_agreement(fit.slope, rep.rate_lower_bound);
    } else {
        rep.notes.push_back("too few finite operator points for a slope fit");
        rep.agreement_rel_gap = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

LscReport lsc_probe(const Subaction& sub, const Potential& f, const BasePoint& z,
                    const std::vector<BasePoint>& approach_seq, int n_terms, const ShiftMetric& metric) {
    LscReport rep;
    const double no_cap = kInf;
    rep.limit_value = rate_partial(z, sub, f, n_terms, no_cap).value;
    rep.holder_norm = r_minus_potential(f, sub).holder_seminorm(metric.theta);

    for (const auto& zj : approach_seq) {
        double val = rate_partial(zj, sub, f, n_terms, no_cap).value;
        double dist_sum = 0.0;
        BasePoint a = zj, b = z;
        for (int t = 0; t < n_terms; ++t) {
            dist_sum += shift_metric_distance(a, b, metric, 40).upper;
            a = a.shifted();
            b = b.shifted();
        }
        double tol = rep.holder_norm * dist_sum;
        rep.probe_values.push_back(val);
        rep.tolerances.push_back(tol);
        rep.ok.push_back(val >= rep.limit_value - tol - rep.slack ? 1 : 0);
    }
    rep.all_ok = std::all_of(rep.ok.begin(), rep.ok.end(), [](std::uint8_t b) { return b != 0; });
    rep.min_tail_value = rep.limit_value;
    if (!rep.probe_values.empty()) {
        size_t i0 = rep.probe_values.size() / 2;
        rep.min_tail_value = *std::min_element(rep.probe_values.begin() + static_cast<long>(i0),
                                               rep.probe_values.end());
    }
    return rep;
}

CancellationReport beta_cancellation_check(const Potential& f, const FiberGrid& grid,
                                           const std::vector<double>& c_schedule,
                                           const std::vector<int>& n_schedule,
                                           const std::vector<BasePoint>& probes, const LdpOptions& opt) {
    if (c_schedule.empty() || n_schedule.empty() || probes.empty())
        throw std::invalid_argument("beta_cancellation_check: empty schedule");
    for (int n : n_schedule)
        if (n < 1) throw std::invalid_argument("beta_cancellation_check: iterate counts must be positive");

    CancellationReport rep;
    Subaction sub = solve_maxplus(f, grid, opt.maxplus);
    Potential rm = r_minus_potential(f, sub);
    StateSpace rss = StateSpace::make(grid, rm.arity());

    std::vector<int> ns = n_schedule;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    const int n_max = ns.back();

    std::vector<long> probe_states(probes.size());
    std::vector<double> probe_snaps(probes.size());
    for (size_t p = 0; p < probes.size(); ++p)
        probe_states[p] = nearest_state(probes[p], grid, rss, &probe_snaps[p]);

    for (double c : c_schedule) {
        EigenSystem es = leading_eigensystem(build_kernel(f, c, grid), opt.eig);
        const double eps_c = es.log_beta - c * sub.beta_f;
        LogKernel kr = build_kernel(rm, c, grid);

        std::vector<double> v(static_cast<size_t>(rss.n_states()), 0.0), applied(v.size());
        size_t next_sched = 0;
        for (int n = 1; n <= n_max; ++n) {
            lse_apply(kr.table, rss, v, applied);
            std::swap(v, applied);
            if (next_sched < ns.size() && ns[next_sched] == n) {
                for (size_t p = 0; p < probes.size(); ++p) {
                    double raw = v[static_cast<size_t>(probe_states[p])] / c;
                    rep.samples.push_back({c, n, static_cast<int>(p), raw - n * eps_c / c, raw,
                                           probe_snaps[p]});
                }
                ++next_sched;
            }
        }
    }

    // Fixed-offset differences of the uncorrected values, consecutive scheduled n.
    for (double c : c_schedule)
        for (size_t i = 0; i + 1 < ns.size(); ++i)
            for (size_t p = 0; p < probes.size(); ++p) {
                const CancellationSample* lo = nullptr;
                const CancellationSample* hi = nullptr;
                for (const auto& s : rep.samples) {
                    if (s.c == c && s.probe == static_cast<int>(p)) {
                        if (s.n == ns[i]) lo = &s;
                        if (s.n == ns[i + 1]) hi = &s;
                    }
                }
                rep.fixed_gaps.push_back(
                    {c, ns[i], static_cast<int>(p), std::fabs(hi->raw - lo->raw), 0.0, probe_snaps[p]});
            }

    const double c_last = c_schedule.back();
    for (const auto& s : rep.samples)
        if (s.c == c_last && s.n == n_max)
            rep.diag_max_abs = std::max(rep.diag_max_abs, std::fabs(s.value));
    return rep;
}

}  // namespace xylab
