#pragma once

#include <stdexcept>
#include <vector>

#include "xylab/grid.hpp"

namespace xylab {

/// Finite state space of the discretized transfer operator for a potential of
/// arity k: states are (k-1)-windows of grid-node indices (the coordinates a
/// function of x can depend on after one application). Arity 1 is embedded as
/// k = 2 so that states are always at least a single node; arity 3 uses ordered
/// pairs. `next_state(j, s)` prepends letter j to window s and drops the last
/// entry, i.e. the window of ax when s is the window of x.
class StateSpace {
public:
    static StateSpace make(const FiberGrid& grid, int arity) {
        if (arity < 1 || arity > 3) throw std::invalid_argument("StateSpace: arity must be 1, 2 or 3");
        StateSpace ss;
        ss.arity_ = arity;
        ss.window_ = (arity <= 2) ? 1 : 2;
        ss.n_nodes_ = grid.n_nodes;
        ss.n_states_ = 1;
        for (int i = 0; i < ss.window_; ++i) ss.n_states_ *= grid.n_nodes;
        return ss;
    }

    int arity() const { return arity_; }
    int window() const { return window_; }
    int n_nodes() const { return n_nodes_; }
    long n_states() const { return n_states_; }
    int n_letters() const { return n_nodes_; }

    long next_state(int letter, long s) const {
        if (window_ == 1) return letter;
        return static_cast<long>(letter) * n_nodes_ + s / n_nodes_;  // (s0,s1) -> (letter,s0)
    }

    /// Node indices of the window, coordinate 0 first.
    void state_nodes(long s, int* out) const {
        if (window_ == 1) {
            out[0] = static_cast<int>(s);
            return;
        }
        out[0] = static_cast<int>(s / n_nodes_);
        out[1] = static_cast<int>(s % n_nodes_);
    }

    long state_of_nodes(const int* idx) const {
        if (window_ == 1) return idx[0];
        return static_cast<long>(idx[0]) * n_nodes_ + idx[1];
    }

    /// First window coordinate (the marginal axis used for fiber reports).
    int first_node(long s) const { return window_ == 1 ? static_cast<int>(s) : static_cast<int>(s / n_nodes_); }

private:
    int arity_ = 2;
    int window_ = 1;
    int n_nodes_ = 0;
    long n_states_ = 0;
};

}  // namespace xylab
