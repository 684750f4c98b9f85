#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "xylab/grid.hpp"

namespace xylab {

/// Closed arc [lo, hi] on the circle (angles in radians). After wrapping, lo > hi
/// means the arc passes through 0. A full circle is modeled as [0, 2*pi).
struct Arc {
    double lo = 0.0;
    double hi = 0.0;

    Arc() = default;
    Arc(double l, double h) : lo(wrap_angle(l)), hi(wrap_angle(h)) {}

    /// Arc centered at `c` with arc-radius `r` (radians), r in (0, pi].
    static Arc centered(double c, double r) {
        if (!(r > 0.0)) throw std::invalid_argument("Arc: radius must be positive");
        if (r >= std::numbers::pi) return Arc(0.0, two_pi - 1e-15);  // whole circle
        return Arc(c - r, c + r);
    }

    bool contains(double angle, bool open) const {
        double a = wrap_angle(angle);
        if (lo <= hi) return open ? (a > lo && a < hi) : (a >= lo && a <= hi);
        return open ? (a > lo || a < hi) : (a >= lo || a <= hi);
    }
};

/// Finitely many per-coordinate arc constraints defining a cylinder-like subset
/// of the sequence space: x is in the set iff for every constraint, x_j lies in
/// the union of that coordinate's arcs. Coordinates not listed are free.
struct ArcSet {
    struct CoordinateConstraint {
        int coordinate = 0;
        std::vector<Arc> arcs;
    };

    std::vector<CoordinateConstraint> constraints;
    bool open = false;
    std::string name;

    void validate() const {
        for (const auto& c : constraints) {
            if (c.coordinate < 0) throw std::invalid_argument("ArcSet: negative coordinate index");
            if (c.arcs.empty()) throw std::invalid_argument("ArcSet: constraint with no arcs");
        }
    }

    /// Number of leading coordinates the set constrains: 1 + max coordinate, 0 if free.
    int depth() const {
        int d = 0;
        for (const auto& c : constraints)
            if (c.coordinate + 1 > d) d = c.coordinate + 1;
        return d;
    }

    /// Membership of a single coordinate value (true when the coordinate is unconstrained).
    bool coordinate_allowed(int j, double angle) const {
        for (const auto& c : constraints) {
            if (c.coordinate != j) continue;
            bool inside = false;
            for (const auto& a : c.arcs)
                if (a.contains(angle, open)) {
                    inside = true;
                    break;
                }
            if (!inside) return false;
        }
        return true;
    }

    template <typename Point>
    bool contains(const Point& x) const {
        const int d = depth();
        for (int j = 0; j < d; ++j)
            if (!coordinate_allowed(j, x.coordinate(static_cast<size_t>(j)))) return false;
        return true;
    }

    /// Per-node membership mask of coordinate j on the grid (grid-resolution view
    /// of the set: a node is in iff its angle is).
    std::vector<std::uint8_t> node_mask(int j, const FiberGrid& grid) const {
        std::vector<std::uint8_t> m(static_cast<size_t>(grid.n_nodes), 1);
        for (int i = 0; i < grid.n_nodes; ++i)
            if (!coordinate_allowed(j, grid.nodes[static_cast<size_t>(i)])) m[static_cast<size_t>(i)] = 0;
        return m;
    }
};

}  // namespace xylab
