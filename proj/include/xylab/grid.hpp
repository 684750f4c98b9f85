#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace xylab {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wrap an angle to [0, 2*pi).
inline double wrap_angle(double a) {
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    // fmod can return exactly two_pi after the correction when a is a tiny negative
    if (r >= two_pi) r = 0.0;
    return r;
}

/// Arc distance on the circle in radians, in [0, pi].
inline double arc_distance_rad(double a, double b) {
    double d = std::fabs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, two_pi - d);
}

/// Normalized arc distance: arc length / (2*pi), in [0, 1/2].
inline double arc_distance(double a, double b) { return arc_distance_rad(a, b) / two_pi; }

/// Uniform angular grid on the circle. Nodes at 2*pi*i/n, equal weights 1/n,
/// so sums over nodes with these weights are the uniform-measure quadrature.
struct FiberGrid {
    int n_nodes = 0;
    std::vector<double> nodes;    // increasing, in [0, 2*pi)
    std::vector<double> weights;  // all 1/n

    static FiberGrid uniform(int n) {
        if (n < 2) throw std::invalid_argument("FiberGrid: need at least 2 nodes");
        FiberGrid g;
        g.n_nodes = n;
        g.nodes.resize(n);
        g.weights.assign(n, 1.0 / n);
        for (int i = 0; i < n; ++i) g.nodes[i] = two_pi * i / n;
        return g;
    }

    double cell_width() const { return two_pi / n_nodes; }

    /// Index of the node nearest to `angle` (ties break toward the lower index mod n).
    int nearest_node(double angle) const {
        double pos = wrap_angle(angle) / cell_width();
        int i = static_cast<int>(std::llround(pos));
        return i % n_nodes;
    }

    /// Arc distance in radians from `angle` to its nearest node.
    double snap_distance(double angle) const {
        return arc_distance_rad(angle, nodes[nearest_node(angle)]);
    }
};

/// Product metric data for the sequence space: d(x,y) = sum_j theta^j d_arc(x_j, y_j),
/// with the normalized arc distance (fiber diameter 1/2).
struct ShiftMetric {
    double theta = 0.5;

    static constexpr double fiber_diameter = 0.5;

    explicit ShiftMetric(double t = 0.5) : theta(t) {
        if (!(t > 0.0) || !(t < 1.0)) throw std::invalid_argument("ShiftMetric: theta must lie in (0,1)");
    }

    /// sum_{j>=n} theta^j * diameter, the tail bound after n computed terms.
    double tail_bound(int n) const { return fiber_diameter * std::pow(theta, n) / (1.0 - theta); }
};

/// Two-sided enclosure of a quantity computed from finitely many terms.
struct DistanceBound {
    double lower = 0.0;
    double upper = 0.0;
};

}  // namespace xylab
