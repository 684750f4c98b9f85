#include "xylab/kernels.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace xylab {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Single-row bodies shared by the parallel and serial entry points, so the two
// variants are arithmetically identical by construction.

inline void fill_row(const Potential& f, double c, const FiberGrid& grid, const StateSpace& ss, long s,
                     bool weighted, double* row) {
    const int L = ss.n_letters();
    const int k = f.arity();
    int idx[2];
    ss.state_nodes(s, idx);
    double args[3];
    for (int i = 1; i < k; ++i) args[i] = grid.nodes[static_cast<size_t>(idx[i - 1])];
    const double logw = weighted ? -std::log(static_cast<double>(L)) : 0.0;
    for (int j = 0; j < L; ++j) {
        args[0] = grid.nodes[static_cast<size_t>(j)];
        double v = f(std::span<const double>(args, static_cast<size_t>(k)));
        row[j] = weighted ? logw + c * v : v;
    }
}

inline double lse_row(const double* row, const StateSpace& ss, long s, const double* in,
                      const std::uint8_t* mask) {
    const int L = ss.n_letters();
    double m = neg_inf;
    for (int j = 0; j < L; ++j) {
        if (mask && !mask[j]) continue;
        double t = row[j] + in[ss.next_state(j, s)];
        if (t > m) m = t;
    }
    if (m == neg_inf) return neg_inf;
    double acc = 0.0;
    for (int j = 0; j < L; ++j) {
        if (mask && !mask[j]) continue;
        acc += std::exp(row[j] + in[ss.next_state(j, s)] - m);
    }
    return m + std::log(acc);
}

inline double linear_row(const double* row, const StateSpace& ss, long s, const double* in) {
    const int L = ss.n_letters();
    double acc = 0.0;
    for (int j = 0; j < L; ++j) acc += std::exp(row[j]) * in[ss.next_state(j, s)];
    return acc;
}

inline double max_row(const double* row, const StateSpace& ss, long s, const double* in, int* arg) {
    const int L = ss.n_letters();
    double m = neg_inf;
    int best = 0;
    for (int j = 0; j < L; ++j) {
        double t = row[j] + in[ss.next_state(j, s)];
        if (t > m) {
            m = t;
            best = j;
        }
    }
    if (arg) *arg = best;
    return m;
}

inline double min_row(const double* row, const StateSpace& ss, long s, const double* in) {
    const int L = ss.n_letters();
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < L; ++j) {
        double t = row[j] + in[ss.next_state(j, s)];
        if (t < m) m = t;
    }
    return m;
}

// Adjoint: out[s'] = LSE over {(j,s): next(j,s)=s'} of table[s,j] + in[s].
// With window 1, next(j,s)=j: the preimages of letter-state j are all states s
// at column j. With window 2, s'=(a,i0) has preimages s=(i0,i1), i1 free, at
// column a.
inline double adjoint_element(const std::vector<double>& table, const StateSpace& ss, long sp,
                              const double* in) {
    const int L = ss.n_letters();
    const long S = ss.n_states();
    double m = neg_inf;
    if (ss.window() == 1) {
        const int j = static_cast<int>(sp);
        for (long s = 0; s < S; ++s) {
            double t = table[static_cast<size_t>(s) * L + j] + in[s];
            if (t > m) m = t;
        }
        if (m == neg_inf) return neg_inf;
        double acc = 0.0;
        for (long s = 0; s < S; ++s) acc += std::exp(table[static_cast<size_t>(s) * L + j] + in[s] - m);
        return m + std::log(acc);
    }
    const int n = ss.n_nodes();
    const int a = static_cast<int>(sp / n);
    const long i0 = sp % n;
    for (int i1 = 0; i1 < n; ++i1) {
        long s = i0 * n + i1;
        double t = table[static_cast<size_t>(s) * L + a] + in[s];
        if (t > m) m = t;
    }
    if (m == neg_inf) return neg_inf;
    double acc = 0.0;
    for (int i1 = 0; i1 < n; ++i1) {
        long s = i0 * n + i1;
        acc += std::exp(table[static_cast<size_t>(s) * L + a] + in[s] - m);
    }
    return m + std::log(acc);
}

inline void check_sizes(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in) {
    if (static_cast<long>(table.size()) != ss.n_states() * ss.n_letters())
        throw std::invalid_argument("kernel table size does not match the state space");
    if (static_cast<long>(in.size()) != ss.n_states())
        throw std::invalid_argument("kernel input size does not match the state space");
}

}  // namespace

#define XYLAB_FOR_STATES(S) _Pragma("omp parallel for schedule(static)") for (long s = 0; s < (S); ++s)

void fill_log_kernel(const Potential& f, double c, const FiberGrid& grid, const StateSpace& ss,
                     std::vector<double>& table) {
    const long S = ss.n_states();
    const int L = ss.n_letters();
    table.resize(static_cast<size_t>(S) * L);
    XYLAB_FOR_STATES(S) fill_row(f, c, grid, ss, s, true, table.data() + static_cast<size_t>(s) * L);
}

void fill_value_table(const Potential& f, const FiberGrid& grid, const StateSpace& ss,
                      std::vector<double>& table) {
    const long S = ss.n_states();
    const int L = ss.n_letters();
    table.resize(static_cast<size_t>(S) * L);
    XYLAB_FOR_STATES(S) fill_row(f, 0.0, grid, ss, s, false, table.data() + static_cast<size_t>(s) * L);
}

void lse_apply(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
               std::vector<double>& out) {
    check_sizes(table, ss, in);
    const long S = ss.n_states();
    const int L = ss.n_letters();
    out.resize(static_cast<size_t>(S));
    XYLAB_FOR_STATES(S) out[static_cast<size_t>(s)] = lse_row(table.data() + static_cast<size_t>(s) * L, ss, s, in.data(), nullptr);
}

void lse_apply_letter_masked(const std::vector<double>& table, const StateSpace& ss,
                             const std::vector<std::uint8_t>& mask, const std::vector<double>& in,
                             std::vector<double>& out) {
    check_sizes(table, ss, in);
    if (static_cast<int>(mask.size()) != ss.n_letters())
        throw std::invalid_argument("letter mask size does not match the grid");
    const long S = ss.n_states();
    const int L = ss.n_letters();
    out.resize(static_cast<size_t>(S));
    XYLAB_FOR_STATES(S) out[static_cast<size_t>(s)] = lse_row(table.data() + static_cast<size_t>(s) * L, ss, s, in.data(), mask.data());
}

void lse_apply_adjoint(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                       std::vector<double>& out) {
    check_sizes(table, ss, in);
    const long S = ss.n_states();
    out.resize(static_cast<size_t>(S));
    XYLAB_FOR_STATES(S) out[static_cast<size_t>(s)] = adjoint_element(table, ss, s, in.data());
}

void linear_apply(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                  std::vector<double>& out) {
    check_sizes(table, ss, in);
    const long S = ss.n_states();
    const int L = ss.n_letters();
    out.resize(static_cast<size_t>(S));
    XYLAB_FOR_STATES(S) out[static_cast<size_t>(s)] = linear_row(table.data() + static_cast<size_t>(s) * L, ss, s, in.data());
}

void maxplus_sweep(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                   std::vector<double>& out, std::vector<int>* argmax) {
    check_sizes(table, ss, in);
    const long S = ss.n_states();
    const int L = ss.n_letters();
    out.resize(static_cast<size_t>(S));
    if (argmax) argmax->resize(static_cast<size_t>(S));
    XYLAB_FOR_STATES(S) {
        int* arg = argmax ? argmax->data() + s : nullptr;
        out[static_cast<size_t>(s)] = max_row(table.data() + static_cast<size_t>(s) * L, ss, s, in.data(), arg);
    }
}

void minplus_sweep(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                   std::vector<double>& out) {
    check_sizes(table, ss, in);
    const long S = ss.n_states();
    const int L = ss.n_letters();
    out.resize(static_cast<size_t>(S));
    XYLAB_FOR_STATES(S) out[static_cast<size_t>(s)] = min_row(table.data() + static_cast<size_t>(s) * L, ss, s, in.data());
}

#undef XYLAB_FOR_STATES

namespace serial {

void fill_log_kernel(const Potential& f, double c, const FiberGrid& grid, const StateSpace& ss,
                     std::vector<double>& table) {
    const long S = ss.n_states();
    const int L = ss.n_letters();
    table.resize(static_cast<size_t>(S) * L);
    for (long s = 0; s < S; ++s) fill_row(f, c, grid, ss, s, true, table.data() + static_cast<size_t>(s) * L);
}

void fill_value_table(const Potential& f, const FiberGrid& grid, const StateSpace& ss,
                      std::vector<double>& table) {
    const long S = ss.n_states();
    const int L = ss.n_letters();
    table.resize(static_cast<size_t>(S) * L);
    for (long s = 0; s < S; ++s) fill_row(f, 0.0, grid, ss, s, false, table.data() + static_cast<size_t>(s) * L);
}

void lse_apply(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
               std::vector<double>& out) {
    check_sizes(table, ss, in);
    const long S = ss.n_states();
    const int L = ss.n_letters();
    out.resize(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s)
        out[static_cast<size_t>(s)] = lse_row(table.data() + static_cast<size_t>(s) * L, ss, s, in.data(), nullptr);
}

void lse_apply_letter_masked(const std::vector<double>& table, const StateSpace& ss,
                             const std::vector<std::uint8_t>& mask, const std::vector<double>& in,
                             std::vector<double>& out) {
    check_sizes(table, ss, in);
    if (static_cast<int>(mask.size()) != ss.n_letters())
        throw std::invalid_argument("letter mask size does not match the grid");
    const long S = ss.n_states();
    const int L = ss.n_letters();
    out.resize(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s)
        out[static_cast<size_t>(s)] = lse_row(table.data() + static_cast<size_t>(s) * L, ss, s, in.data(), mask.data());
}

void lse_apply_adjoint(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                       std::vector<double>& out) {
    check_sizes(table, ss, in);
    const long S = ss.n_states();
    out.resize(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s) out[static_cast<size_t>(s)] = adjoint_element(table, ss, s, in.data());
}

void linear_apply(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                  std::vector<double>& out) {
    check_sizes(table, ss, in);
    const long S = ss.n_states();
    const int L = ss.n_letters();
    out.resize(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s)
        out[static_cast<size_t>(s)] = linear_row(table.data() + static_cast<size_t>(s) * L, ss, s, in.data());
}

void maxplus_sweep(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                   std::vector<double>& out, std::vector<int>* argmax) {
    check_sizes(table, ss, in);
    const long S = ss.n_states();
    const int L = ss.n_letters();
    out.resize(static_cast<size_t>(S));
    if (argmax) argmax->resize(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s) {
        int* arg = argmax ? argmax->data() + s : nullptr;
        out[static_cast<size_t>(s)] = max_row(table.data() + static_cast<size_t>(s) * L, ss, s, in.data(), arg);
    }
}

void minplus_sweep(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                   std::vector<double>& out) {
    check_sizes(table, ss, in);
    const long S = ss.n_states();
    const int L = ss.n_letters();
    out.resize(static_cast<size_t>(S));
    for (long s = 0; s < S; ++s)
        out[static_cast<size_t>(s)] = min_row(table.data() + static_cast<size_t>(s) * L, ss, s, in.data());
}

}  // namespace serial

}  // namespace xylab
