#include "xylab/maxplus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "xylab/kernels.hpp"
#include "xylab/transfer.hpp"

namespace xylab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Iterative Tarjan SCC over a digraph given by adjacency lists. Returns the
// component id per node; ids are assigned in reverse topological order.
struct SccResult {
    std::vector<int> comp;
    int n_comps = 0;
};

SccResult strongly_connected_components(long n, const std::vector<std::vector<long>>& adj) {
    SccResult r;
    r.comp.assign(static_cast<size_t>(n), -1);
    std::vector<int> index(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0);
    std::vector<char> on_stack(static_cast<size_t>(n), 0);
    std::vector<long> stk;
    int next_index = 0;

    struct Frame {
        long v;
        size_t child;
    };
    std::vector<Frame> call;
    for (long root = 0; root < n; ++root) {
        if (index[static_cast<size_t>(root)] != -1) continue;
        call.push_back({root, 0});
        index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = next_index++;
        stk.push_back(root);
        on_stack[static_cast<size_t>(root)] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            const auto& edges = adj[static_cast<size_t>(f.v)];
            if (f.child < edges.size()) {
                long w = edges[f.child++];
                if (index[static_cast<size_t>(w)] == -1) {
                    index[static_cast<size_t>(w)] = low[static_cast<size_t>(w)] = next_index++;
                    stk.push_back(w);
                    on_stack[static_cast<size_t>(w)] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[static_cast<size_t>(w)]) {
                    low[static_cast<size_t>(f.v)] = std::min(low[static_cast<size_t>(f.v)], index[static_cast<size_t>(w)]);
                }
            } else {
                if (low[static_cast<size_t>(f.v)] == index[static_cast<size_t>(f.v)]) {
                    while (true) {
                        long w = stk.back();
                        stk.pop_back();
                        on_stack[static_cast<size_t>(w)] = 0;
                        r.comp[static_cast<size_t>(w)] = r.n_comps;
                        if (w == f.v) break;
                    }
                    ++r.n_comps;
                }
                long v = f.v;
                call.pop_back();
                if (!call.empty())
                    low[static_cast<size_t>(call.back().v)] =
                        std::min(low[static_cast<size_t>(call.back().v)], low[static_cast<size_t>(v)]);
            }
        }
    }
    return r;
}

}  // namespace

double Subaction::interpolate_V(const double* angles) const {
    const int n = grid.n_nodes;
    const double h = grid.cell_width();
    if (ss.window() == 1) {
        double pos = wrap_angle(angles[0]) / h;
        int i = static_cast<int>(pos) % n;
        double t = pos - std::floor(pos);
        return (1.0 - t) * V[static_cast<size_t>(i)] + t * V[static_cast<size_t>((i + 1) % n)];
    }
    double p0 = wrap_angle(angles[0]) / h, p1 = wrap_angle(angles[1]) / h;
    int i0 = static_cast<int>(p0) % n, i1 = static_cast<int>(p1) % n;
    double t0 = p0 - std::floor(p0), t1 = p1 - std::floor(p1);
    int j0 = (i0 + 1) % n, j1 = (i1 + 1) % n;
    auto at = [&](int a, int b) { return V[static_cast<size_t>(a) * n + b]; };
    return (1.0 - t0) * ((1.0 - t1) * at(i0, i1) + t1 * at(i0, j1)) +
           t0 * ((1.0 - t1) * at(j0, i1) + t1 * at(j0, j1));
}

Subaction solve_maxplus(const Potential& f, const FiberGrid& grid, const MaxPlusOptions& opt) {
    Subaction sub;
    sub.grid = grid;
    sub.ss = StateSpace::make(grid, f.arity());
    sub.potential_name = f.name();
    sub.tie_tol = opt.tie_tol;

    const StateSpace& ss = sub.ss;
    const long S = ss.n_states();
    const int L = ss.n_letters();

    std::vector<double> fv;
    fill_value_table(f, grid, ss, fv);

    // Relative value iteration: W <- TW - TW(ref), stop when the span of TW - W
    // collapses. The midpoint of the final span brackets beta within tol/2.
    std::vector<double> w(static_cast<size_t>(S), 0.0), tw;
    double beta = 0.0, span = inf;
    int sweep = 0;
    for (; sweep < opt.max_sweeps; ++sweep) {
        maxplus_sweep(fv, ss, w, tw);
        double dmin = inf, dmax = -inf;
        for (long s = 0; s < S; ++s) {
            double d = tw[static_cast<size_t>(s)] - w[static_cast<size_t>(s)];
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        span = dmax - dmin;
        beta = 0.5 * (dmax + dmin);
        double ref = tw[0];
        for (long s = 0; s < S; ++s) w[static_cast<size_t>(s)] = tw[static_cast<size_t>(s)] - ref;
        if (span < opt.tol) break;
    }
    if (span >= opt.tol)
        throw NonConvergenceError("relative value iteration did not converge (span=" + std::to_string(span) + ")",
                                  span, sweep);
    sub.beta_f = beta;
    sub.V = w;
    sub.span_residual = span;
    sub.sweeps = sweep + 1;

    // Transition costs and tied maximizers.
    sub.cost.resize(static_cast<size_t>(S) * L);
    sub.tied_letters.assign(static_cast<size_t>(S), {});
    double calib = 0.0, min_cost = inf;
    for (long s = 0; s < S; ++s) {
        double row_min = inf;
        for (int j = 0; j < L; ++j) {
            double cst = beta + sub.V[static_cast<size_t>(s)] - sub.V[static_cast<size_t>(ss.next_state(j, s))] -
                         fv[static_cast<size_t>(s) * L + j];
            sub.cost[static_cast<size_t>(s) * L + j] = cst;
            row_min = std::min(row_min, cst);
            min_cost = std::min(min_cost, cst);
        }
        calib = std::max(calib, std::fabs(row_min));
        for (int j = 0; j < L; ++j)
            if (sub.cost[static_cast<size_t>(s) * L + j] <= row_min + opt.tie_tol)
                sub.tied_letters[static_cast<size_t>(s)].push_back(j);
    }
    sub.calibration_residual = calib;
    sub.min_cost = min_cost;

    if (opt.cross_check) {
        // The first-argmax selection induces a functional graph s -> next(j*, s);
        // every component has one cycle whose mean f-value must equal beta.
        std::vector<long> succ(static_cast<size_t>(S));
        std::vector<double> val(static_cast<size_t>(S));
        for (long s = 0; s < S; ++s) {
            int j = sub.tied_letters[static_cast<size_t>(s)].front();
            succ[static_cast<size_t>(s)] = ss.next_state(j, s);
            val[static_cast<size_t>(s)] = fv[static_cast<size_t>(s) * L + j];
        }
        std::vector<int> state(static_cast<size_t>(S), 0);  // 0 unseen, 1 active, 2 done
        double gap = 0.0;
        for (long s0 = 0; s0 < S; ++s0) {
            if (state[static_cast<size_t>(s0)]) continue;
            std::vector<long> path;
            long s = s0;
            while (state[static_cast<size_t>(s)] == 0) {
                state[static_cast<size_t>(s)] = 1;
                path.push_back(s);
                s = succ[static_cast<size_t>(s)];
            }
            if (state[static_cast<size_t>(s)] == 1) {
                // found a new cycle; average f over it
                double tot = 0.0;
                long len = 0;
                long t = s;
                do {
                    tot += val[static_cast<size_t>(t)];
                    ++len;
                    t = succ[static_cast<size_t>(t)];
                } while (t != s);
                gap = std::max(gap, std::fabs(tot / static_cast<double>(len) - beta));
            }
            for (long p : path) state[static_cast<size_t>(p)] = 2;
        }
        sub.policy_gap = gap;
    }
    return sub;
}

UniquenessReport uniqueness_probe(const Subaction& sub) {
    const StateSpace& ss = sub.ss;
    const long S = ss.n_states();
    std::vector<std::vector<long>> adj(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s) {
        adj[static_cast<size_t>(s)].reserve(sub.tied_letters[static_cast<size_t>(s)].size());
        for (int j : sub.tied_letters[static_cast<size_t>(s)])
            adj[static_cast<size_t>(s)].push_back(ss.next_state(j, s));
    }
    SccResult scc = strongly_connected_components(S, adj);

    std::vector<char> is_sink(static_cast<size_t>(scc.n_comps), 1);
    for (long s = 0; s < S; ++s)
        for (long t : adj[static_cast<size_t>(s)])
            if (scc.comp[static_cast<size_t>(s)] != scc.comp[static_cast<size_t>(t)])
                is_sink[static_cast<size_t>(scc.comp[static_cast<size_t>(s)])] = 0;

    UniquenessReport rep;
    for (int cidx = 0; cidx < scc.n_comps; ++cidx)
        if (is_sink[static_cast<size_t>(cidx)]) ++rep.n_sink_classes;
    for (long s = 0; s < S; ++s) {
        if (!is_sink[static_cast<size_t>(scc.comp[static_cast<size_t>(s)])]) continue;
        rep.recurrent_states.push_back(s);
        if (sub.tied_letters[static_cast<size_t>(s)].size() > 1) rep.tie_in_sink = true;
    }
    rep.degenerate = rep.n_sink_classes > 1 || rep.tie_in_sink;
    rep.detail = std::to_string(rep.n_sink_classes) + " sink class(es), " +
                 std::to_string(rep.recurrent_states.size()) + " recurrent state(s)" +
                 (rep.tie_in_sink ? ", ties inside a sink class" : "");
    return rep;
}

OrbitOracle periodic_orbit_oracle(const Potential& f, const FiberGrid& grid, int max_period, long budget) {
    const int n = grid.n_nodes;
    const int k = f.arity();
    long total = 0, pw = 1;
    for (int p = 1; p <= max_period; ++p) {
        pw *= n;
        total += pw;
        if (total > budget)
            throw std::invalid_argument("periodic_orbit_oracle: enumeration of " + std::to_string(total) +
                                        " words exceeds the budget; lower max_period");
    }

    OrbitOracle best;
    best.best_mean = -inf;
    std::vector<int> word;
    for (int p = 1; p <= max_period; ++p) {
        word.assign(static_cast<size_t>(p), 0);
        long count = 1;
        for (int i = 0; i < p; ++i) count *= n;
        for (long code = 0; code < count; ++code) {
            long rem = code;
            for (int i = 0; i < p; ++i) {
                word[static_cast<size_t>(i)] = static_cast<int>(rem % n);
                rem /= n;
            }
            double tot = 0.0;
            double args[3];
            for (int t = 0; t < p; ++t) {
                for (int i = 0; i < k; ++i) args[i] = grid.nodes[static_cast<size_t>(word[static_cast<size_t>((t + i) % p)])];
                tot += f(std::span<const double>(args, static_cast<size_t>(k)));
            }
            double mean = tot / p;
            if (mean > best.best_mean + 1e-15) {
                best.best_mean = mean;
                best.period = p;
                // canonical representative: lexicographically smallest rotation
                std::vector<int> canon = word;
                for (int r = 1; r < p; ++r) {
                    std::vector<int> rot(word.begin() + r, word.end());
                    rot.insert(rot.end(), word.begin(), word.begin() + r);
                    if (rot < canon) canon = rot;
                }
                best.nodes = canon;
            }
        }
    }
    return best;
}

std::vector<long> zero_cycle_states(const Subaction& sub, double zero_tol) {
    const StateSpace& ss = sub.ss;
    const long S = ss.n_states();
    const int L = ss.n_letters();
    // Zero-cost forward edges next(j,s) -> s; a state is on a zero cycle iff its
    // SCC in this subgraph contains a cycle (size > 1 or a self-loop).
    std::vector<std::vector<long>> adj(static_cast<size_t>(S));
    std::vector<char> self_loop(static_cast<size_t>(S), 0);
    for (long s = 0; s < S; ++s)
        for (int j = 0; j < L; ++j)
            if (sub.cost[static_cast<size_t>(s) * L + j] <= zero_tol) {
                long from = ss.next_state(j, s);
                adj[static_cast<size_t>(from)].push_back(s);
                if (from == s) self_loop[static_cast<size_t>(s)] = 1;
            }
    SccResult scc = strongly_connected_components(S, adj);
    std::vector<long> comp_size(static_cast<size_t>(scc.n_comps), 0);
    for (long s = 0; s < S; ++s) ++comp_size[static_cast<size_t>(scc.comp[static_cast<size_t>(s)])];
    std::vector<long> out;
    for (long s = 0; s < S; ++s)
        if (comp_size[static_cast<size_t>(scc.comp[static_cast<size_t>(s)])] > 1 || self_loop[static_cast<size_t>(s)])
            out.push_back(s);
    return out;
}

std::vector<double> tail_min(const Subaction& sub, double zero_tol) {
    const StateSpace& ss = sub.ss;
    const long S = ss.n_states();
    const int L = ss.n_letters();
    std::vector<double> dist(static_cast<size_t>(S), inf);
    using Item = std::pair<double, long>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (long s : zero_cycle_states(sub, zero_tol)) {
        dist[static_cast<size_t>(s)] = 0.0;
        pq.push({0.0, s});
    }
    // Dijkstra on reversed forward edges: relaxing s settles its predecessors
    // next(j,s) through cost[s,j] (clamped at 0 against calibration roundoff).
    while (!pq.empty()) {
        auto [d, s] = pq.top();
        pq.pop();
        if (d > dist[static_cast<size_t>(s)]) continue;
        for (int j = 0; j < L; ++j) {
            long u = ss.next_state(j, s);
            double nd = d + std::max(0.0, sub.cost[static_cast<size_t>(s) * L + j]);
            if (nd < dist[static_cast<size_t>(u)]) {
                dist[static_cast<size_t>(u)] = nd;
                pq.push({nd, u});
            }
        }
    }
    return dist;
}

}  // namespace xylab
