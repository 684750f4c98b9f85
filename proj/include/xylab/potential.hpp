#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xylab/grid.hpp"

namespace xylab {

/// One trigonometric term c*cos(sum_i k_i a_i) + s*sin(sum_i k_i a_i) of a
/// finite Fourier potential; `indices` has one integer per argument.
struct FourierTerm {
    std::vector<int> indices;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

/// A continuous potential f on finitely many leading circle coordinates.
///
/// `arity` is the number of coordinates f reads (1 to 3). `lipschitz[i]` bounds
/// |df/dx_i| in radians; it feeds the Holder seminorm |f|_theta used by the
/// large-deviation tolerance estimates. Catalog constructors fill it exactly,
/// `with_estimated_lipschitz` fills it by finite differences for custom evals.
class Potential {
public:
    using Eval = std::function<double(std::span<const double>)>;

    Potential() = default;
    Potential(std::string name, int arity, Eval eval, std::vector<double> lipschitz)
        : name_(std::move(name)), arity_(arity), eval_(std::move(eval)), lipschitz_(std::move(lipschitz)) {
        if (arity_ < 1 || arity_ > 3) throw std::invalid_argument("Potential: arity must be 1, 2 or 3");
        if (static_cast<int>(lipschitz_.size()) != arity_)
            throw std::invalid_argument("Potential: need one Lipschitz bound per coordinate");
        check_periodicity();
    }

    const std::string& name() const { return name_; }
    int arity() const { return arity_; }
    const std::vector<double>& lipschitz() const { return lipschitz_; }

    /// Largest frequency (per coordinate, in |k|) present in f's Fourier
    /// expansion; 0 when unknown. Drives the grid-resolution warning.
    int max_frequency() const { return max_frequency_; }
    Potential& set_max_frequency(int k) {
        max_frequency_ = k;
        return *this;
    }

    double operator()(std::span<const double> args) const { return eval_(args); }
    double operator()(double a) const {
        double v[1] = {a};
        return eval_(std::span<const double>(v, static_cast<size_t>(arity_)));
    }
    double operator()(double a, double b) const {
        double v[2] = {a, b};
        return eval_(std::span<const double>(v, static_cast<size_t>(arity_)));
    }
    double operator()(double a, double b, double c) const {
        double v[3] = {a, b, c};
        return eval_(std::span<const double>(v, 3));
    }

    /// |f|_theta: least L with |f(x)-f(y)| <= L d(x,y) over the product metric,
    /// bounded by 2*pi*sum_i lipschitz[i]/theta^i (coordinate i moves by at most
    /// 2*pi * d/theta^i when d(x,y) = d).
    double holder_seminorm(double theta) const {
        double s = 0.0;
        double w = 1.0;
        for (int i = 0; i < arity_; ++i) {
            s += lipschitz_[static_cast<size_t>(i)] / w;
            w *= theta;
        }
        return two_pi * s;
    }

    /// f + kappa. Shares the underlying eval; Lipschitz data is unchanged.
    Potential shifted(double kappa) const {
        Eval base = eval_;
        Potential p(name_ + "+const", arity_,
                    [base, kappa](std::span<const double> a) { return base(a) + kappa; }, lipschitz_);
        return p;
    }

    // Catalog ------------------------------------------------------------

    static Potential zero() {
        return Potential("zero", 1, [](std::span<const double>) { return 0.0; }, {0.0});
    }

    static Potential cosine() {
        Potential p("cosine", 1, [](std::span<const double> a) { return std::cos(a[0]); }, {1.0});
        return p.set_max_frequency(1);
    }

    /// cos(x0 - x1): maximized on the diagonal, every rotation-invariant
    /// configuration ties, so the maximizing set is degenerate.
    static Potential xy_pair() {
        Potential p("xy_pair", 2,
                    [](std::span<const double> a) { return std::cos(a[0] - a[1]); }, {1.0, 1.0});
        return p.set_max_frequency(1);
    }

    /// cos(x0 - x1) + eps*cos(x0): the pinning term breaks the rotation symmetry,
    /// leaving the fixed point at angle 0 as the unique maximizer.
    static Potential xy_pinned(double eps) {
        if (!(eps > 0.0)) throw std::invalid_argument("xy_pinned: eps must be positive");
        Potential p("xy_pinned", 2,
                    [eps](std::span<const double> a) { return std::cos(a[0] - a[1]) + eps * std::cos(a[0]); },
                    {1.0 + eps, 1.0});
        return p.set_max_frequency(1);
    }

    static Potential fourier(int arity, std::vector<FourierTerm> terms) {
        if (arity < 1 || arity > 3) throw std::invalid_argument("fourier: arity must be 1, 2 or 3");
        std::vector<double> lips(static_cast<size_t>(arity), 0.0);
        int kmax = 0;
        for (const auto& t : terms) {
            if (static_cast<int>(t.indices.size()) != arity)
                throw std::invalid_argument("fourier: each term needs one frequency per coordinate");
            double amp = std::hypot(t.cos_coeff, t.sin_coeff);
            for (int i = 0; i < arity; ++i) {
                lips[static_cast<size_t>(i)] += amp * std::abs(t.indices[static_cast<size_t>(i)]);
                kmax = std::max(kmax, std::abs(t.indices[static_cast<size_t>(i)]));
            }
        }
        auto eval = [terms = std::move(terms), arity](std::span<const double> a) {
            double s = 0.0;
            for (const auto& t : terms) {
                double phase = 0.0;
                for (int i = 0; i < arity; ++i) phase += t.indices[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
                s += t.cos_coeff * std::cos(phase) + t.sin_coeff * std::sin(phase);
            }
            return s;
        };
        Potential p("fourier", arity, std::move(eval), std::move(lips));
        return p.set_max_frequency(kmax);
    }

    /// Wrap a custom eval, estimating per-coordinate Lipschitz bounds by central
    /// differences on a tensor subgrid (estimate, not a certified bound).
    static Potential with_estimated_lipschitz(std::string name, int arity, Eval eval, int samples_per_axis = 64);

private:
    // Periodicity in each argument is part of the type's contract: sample a few
    // points and require f(.., a, ..) == f(.., a + 2*pi, ..) to 1e-10.
    void check_periodicity() const {
        const double probes[] = {0.1234, 2.3456, 4.5678};
        double args[3] = {0.5, 1.5, 2.5};
        std::span<const double> view(args, static_cast<size_t>(arity_));
        for (int i = 0; i < arity_; ++i) {
            for (double p : probes) {
                args[i] = p;
                double base = eval_(view);
                args[i] = p + two_pi;
                double moved = eval_(view);
                args[i] = 0.5 + i;
                if (std::fabs(base - moved) > 1e-10)
                    throw std::invalid_argument("Potential '" + name_ + "' is not 2*pi-periodic in argument " +
                                                std::to_string(i));
            }
        }
    }

    std::string name_;
    int arity_ = 1;
    Eval eval_;
    std::vector<double> lipschitz_;
    int max_frequency_ = 0;
};

inline Potential Potential::with_estimated_lipschitz(std::string name, int arity, Eval eval, int samples_per_axis) {
    if (arity < 1 || arity > 3) throw std::invalid_argument("Potential: arity must be 1, 2 or 3");
    const int m = samples_per_axis;
    const double h = two_pi / m;
    std::vector<double> lips(static_cast<size_t>(arity), 0.0);
    // Tensor sweep, one difference direction at a time.
    long total = 1;
    for (int i = 0; i < arity; ++i) total *= m;
    std::vector<double> args(static_cast<size_t>(arity));
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int i = 0; i < arity; ++i) {
            args[static_cast<size_t>(i)] = (rem % m) * h;
            rem /= m;
        }
        double base = eval(args);
        for (int i = 0; i < arity; ++i) {
            double save = args[static_cast<size_t>(i)];
            args[static_cast<size_t>(i)] = save + h;
            double moved = eval(args);
            args[static_cast<size_t>(i)] = save;
            double slope = std::fabs(moved - base) / h;
            if (slope > lips[static_cast<size_t>(i)]) lips[static_cast<size_t>(i)] = slope;
        }
    }
    return Potential(std::move(name), arity, std::move(eval), std::move(lips));
}

}  // namespace xylab
