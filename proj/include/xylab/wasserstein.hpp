#pragma once

#include <vector>

#include "xylab/grid.hpp"

namespace xylab {

/// A probability distribution on the circle made of point masses and uniform
/// boxes (used for grid marginals, smoothed cell densities, and empirical
/// samples). Angles in radians; masses need not be pre-normalized.
struct CircleDistribution {
    struct Atom {
        double angle;
        double mass;
    };
    struct Box {
        double lo;     // wrapped into [0, 2*pi)
        double width;  // in (0, 2*pi]
        double mass;
    };

    std::vector<Atom> atoms;
    std::vector<Box> boxes;

    double total_mass() const;

    static CircleDistribution point(double angle);
    /// Point masses at the grid nodes.
    static CircleDistribution node_masses(const FiberGrid& grid, const std::vector<double>& masses);
    /// Node masses spread uniformly over their cells [node - h/2, node + h/2).
    static CircleDistribution cell_masses(const FiberGrid& grid, const std::vector<double>& masses);
    /// Equal-mass atoms at sample positions.
    static CircleDistribution samples(const std::vector<double>& angles);
};

/// Exact Wasserstein-1 distance between two circle distributions under the
/// arc-length ground metric (radians): min_t int |F_p - F_q - t| dx, with the
/// optimal t found as the length-weighted median of the piecewise-linear
/// difference of CDFs. Inputs are normalized to probability internally.
double w1_circle(const CircleDistribution& p, const CircleDistribution& q);

}  // namespace xylab
