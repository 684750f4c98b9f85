#pragma once

#include <cstdint>
#include <vector>

#include "xylab/grid.hpp"
#include "xylab/potential.hpp"
#include "xylab/statespace.hpp"

namespace xylab {

// Dense per-state tables, one row per state, one column per prepended letter,
// laid out row-major: table[s * n_letters + j]. Every kernel writes each output
// element from a fixed serial inner loop, so the parallel and serial versions
// agree bitwise and results do not depend on the thread count.

/// table[s,j] = log(1/n) + c * f(node_j, window coords of s)
void fill_log_kernel(const Potential& f, double c, const FiberGrid& grid, const StateSpace& ss,
                     std::vector<double>& table);

/// table[s,j] = f(node_j, window coords of s)
void fill_value_table(const Potential& f, const FiberGrid& grid, const StateSpace& ss,
                      std::vector<double>& table);

/// out[s] = logsumexp_j(table[s,j] + in[next(j,s)])
void lse_apply(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
               std::vector<double>& out);

/// Same with the letter sum restricted to mask[j] != 0; empty selection gives -inf.
void lse_apply_letter_masked(const std::vector<double>& table, const StateSpace& ss,
                             const std::vector<std::uint8_t>& mask, const std::vector<double>& in,
                             std::vector<double>& out);

/// Adjoint application: out[s'] = logsumexp over preimages {(j,s): next(j,s)=s'} of (table[s,j] + in[s]).
void lse_apply_adjoint(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                       std::vector<double>& out);

/// Linear-domain application for signed inputs: out[s] = sum_j exp(table[s,j]) * in[next(j,s)].
void linear_apply(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                  std::vector<double>& out);

/// out[s] = max_j(table[s,j] + in[next(j,s)]); optionally records one maximizing letter per state.
void maxplus_sweep(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                   std::vector<double>& out, std::vector<int>* argmax = nullptr);

/// out[s] = min_j(table[s,j] + in[next(j,s)])
void minplus_sweep(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                   std::vector<double>& out);

namespace serial {
// Reference implementations: same contracts, no threading. Kept as the ground
// truth for equivalence tests and the benchmark baseline.
void fill_log_kernel(const Potential& f, double c, const FiberGrid& grid, const StateSpace& ss,
                     std::vector<double>& table);
void fill_value_table(const Potential& f, const FiberGrid& grid, const StateSpace& ss,
                      std::vector<double>& table);
void lse_apply(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
               std::vector<double>& out);
void lse_apply_letter_masked(const std::vector<double>& table, const StateSpace& ss,
                             const std::vector<std::uint8_t>& mask, const std::vector<double>& in,
                             std::vector<double>& out);
void lse_apply_adjoint(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                       std::vector<double>& out);
void linear_apply(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                  std::vector<double>& out);
void maxplus_sweep(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                   std::vector<double>& out, std::vector<int>* argmax = nullptr);
void minplus_sweep(const std::vector<double>& table, const StateSpace& ss, const std::vector<double>& in,
                   std::vector<double>& out);
}  // namespace serial

}  // namespace xylab
