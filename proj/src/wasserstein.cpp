#include "xylab/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xylab {

double CircleDistribution::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass;
    for (const auto& b : boxes) s += b.mass;
    return s;
}

CircleDistribution CircleDistribution::point(double angle) {
    CircleDistribution d;
    d.atoms.push_back({wrap_angle(angle), 1.0});
    return d;
}

CircleDistribution CircleDistribution::node_masses(const FiberGrid& grid, const std::vector<double>& masses) {
    CircleDistribution d;
    for (int i = 0; i < grid.n_nodes; ++i)
        if (masses[static_cast<size_t>(i)] != 0.0)
            d.atoms.push_back({grid.nodes[static_cast<size_t>(i)], masses[static_cast<size_t>(i)]});
    return d;
}

CircleDistribution CircleDistribution::cell_masses(const FiberGrid& grid, const std::vector<double>& masses) {
    CircleDistribution d;
    const double h = grid.cell_width();
    for (int i = 0; i < grid.n_nodes; ++i)
        if (masses[static_cast<size_t>(i)] != 0.0)
            d.boxes.push_back({wrap_angle(grid.nodes[static_cast<size_t>(i)] - 0.5 * h), h, masses[static_cast<size_t>(i)]});
    return d;
}

CircleDistribution CircleDistribution::samples(const std::vector<double>& angles) {
    CircleDistribution d;
    d.atoms.reserve(angles.size());
    const double m = 1.0 / static_cast<double>(angles.size());
    for (double a : angles) d.atoms.push_back({wrap_angle(a), m});
    return d;
}

namespace {

// Signed events on [0, 2*pi): atom jumps and constant-density stretches.
struct Events {
    std::vector<std::pair<double, double>> jumps;              // (position, signed mass)
    std::vector<std::pair<double, double>> density_deltas;     // (position, signed density change)
};

void add_distribution(const CircleDistribution& d, double sign, double norm, Events& ev) {
    for (const auto& a : d.atoms) ev.jumps.push_back({wrap_angle(a.angle), sign * a.mass / norm});
    for (const auto& b : d.boxes) {
        if (!(b.width > 0.0) || b.width > two_pi + 1e-12)
            throw std::invalid_argument("w1_circle: box width must lie in (0, 2*pi]");
        double dens = sign * b.mass / norm / b.width;
        double lo = wrap_angle(b.lo);
        double hi = lo + b.width;
        if (hi <= two_pi) {
            ev.density_deltas.push_back({lo, dens});
            ev.density_deltas.push_back({hi, -dens});
        } else {  // wraps through 0
            ev.density_deltas.push_back({lo, dens});
            ev.density_deltas.push_back({0.0, dens});
            ev.density_deltas.push_back({hi - two_pi, -dens});
        }
    }
}

// One linear piece of H = F_p - F_q: value runs from v0 to v1 over length len.
struct Segment {
    double v0, v1, len;
};

// Lebesgue measure of {x : H(x) <= t}.
double measure_below(const std::vector<Segment>& segs, double t) {
    double m = 0.0;
    for (const auto& s : segs) {
        double lo = std::min(s.v0, s.v1), hi = std::max(s.v0, s.v1);
        if (t >= hi)
            m += s.len;
        else if (t > lo && hi > lo)
            m += s.len * (t - lo) / (hi - lo);
    }
    return m;
}

}  // namespace

double w1_circle(const CircleDistribution& p, const CircleDistribution& q) {
    double mp = p.total_mass(), mq = q.total_mass();
    if (!(mp > 0.0) || !(mq > 0.0)) throw std::invalid_argument("w1_circle: distributions must have positive mass");

    Events ev;
    add_distribution(p, +1.0, mp, ev);
    add_distribution(q, -1.0, mq, ev);

    // Breakpoints: all event positions plus the endpoints of the period.
    std::vector<double> xs;
    xs.reserve(ev.jumps.size() + ev.density_deltas.size() + 2);
    xs.push_back(0.0);
    xs.push_back(two_pi);
    for (const auto& j : ev.jumps) xs.push_back(j.first);
    for (const auto& d : ev.density_deltas) xs.push_back(d.first);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::sort(ev.jumps.begin(), ev.jumps.end());
    std::sort(ev.density_deltas.begin(), ev.density_deltas.end());

    // Sweep: H is right-continuous; apply jumps and slope changes at each
    // breakpoint, then record the linear piece up to the next one.
    std::vector<Segment> segs;
    segs.reserve(xs.size());
    double value = 0.0, slope = 0.0;
    size_t ji = 0, di = 0;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        double x = xs[i];
        while (ji < ev.jumps.size() && ev.jumps[ji].first <= x) value += ev.jumps[ji++].second;
        while (di < ev.density_deltas.size() && ev.density_deltas[di].first <= x) slope += ev.density_deltas[di++].second;
        double len = xs[i + 1] - x;
        if (len <= 0.0) continue;
        segs.push_back({value, value + slope * len, len});
        value += slope * len;
    }

    // Optimal shift t*: the length-weighted median of H. measure_below is a
    // monotone piecewise-linear function of t with kinks at segment endpoint
    // values, so locate the bracket and interpolate exactly.
    std::vector<double> cand;
    cand.reserve(2 * segs.size());
    for (const auto& s : segs) {
        cand.push_back(s.v0);
        cand.push_back(s.v1);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    const double half = std::numbers::pi;
    double tstar = cand.front();
    if (measure_below(segs, cand.front()) < half) {
        size_t lo = 0, hi = cand.size() - 1;
        while (lo + 1 < hi) {
            size_t mid = (lo + hi) / 2;
            if (measure_below(segs, cand[mid]) < half)
                lo = mid;
            else
                hi = mid;
        }
        double mlo = measure_below(segs, cand[lo]);
        double mhi = measure_below(segs, cand[hi]);
        // Flat pieces of H put an atom of length at their value; exclude the
        // atom at the upper bracket so the interpolation only spans the part of
        // M(t) that is genuinely linear on (cand[lo], cand[hi]).
        double atom_hi = 0.0;
        for (const auto& s : segs)
            if (s.v0 == s.v1 && s.v0 == cand[hi]) atom_hi += s.len;
        double mhi_open = mhi - atom_hi;
        if (half <= mhi_open && mhi_open > mlo)
            tstar = cand[lo] + (half - mlo) * (cand[hi] - cand[lo]) / (mhi_open - mlo);
        else
            tstar = cand[hi];
    }

    // Integrate |H - t*| segment by segment (closed forms for linear pieces).
    double w1 = 0.0;
    for (const auto& s : segs) {
        double a = s.v0 - tstar, b = s.v1 - tstar;
        if (a == b) {
            w1 += s.len * std::fabs(a);
        } else if (a * b >= 0.0) {
            w1 += s.len * 0.5 * (std::fabs(a) + std::fabs(b));
        } else {
            w1 += s.len * 0.5 * (a * a + b * b) / std::fabs(b - a);
        }
    }
    return w1;
}

}  // namespace xylab
