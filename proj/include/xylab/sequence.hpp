#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xylab/grid.hpp"
#include "xylab/potential.hpp"

namespace xylab {

/// A point of the sequence space X = (S^1)^N given as a finite head followed by
/// an eventually-periodic tail: coordinates head[0..], then tail repeated.
/// Every coordinate is defined, so f and shifts can be evaluated at any depth.
class BasePoint {
public:
    BasePoint(std::vector<double> head, std::vector<double> tail)
        : head_(std::move(head)), tail_(std::move(tail)) {
        if (tail_.empty()) throw std::invalid_argument("BasePoint: periodic tail must be nonempty");
        for (auto& a : head_) a = wrap_angle(a);
        for (auto& a : tail_) a = wrap_angle(a);
    }

    /// Point with all coordinates equal to `angle` (period-1 tail, empty head).
    static BasePoint constant(double angle) { return BasePoint({}, {angle}); }

    double coordinate(size_t j) const {
        if (j < head_.size()) return head_[j];
        return tail_[(j - head_.size()) % tail_.size()];
    }

    /// sigma x: drop the first coordinate.
    BasePoint shifted() const {
        if (!head_.empty()) return BasePoint(std::vector<double>(head_.begin() + 1, head_.end()), tail_);
        std::vector<double> t(tail_.begin() + 1, tail_.end());
        t.push_back(tail_.front());
        return BasePoint({}, std::move(t));
    }

    /// x with `angle` prepended as the new coordinate 0.
    BasePoint prepended(double angle) const {
        std::vector<double> h;
        h.reserve(head_.size() + 1);
        h.push_back(angle);
        h.insert(h.end(), head_.begin(), head_.end());
        return BasePoint(std::move(h), tail_);
    }

    size_t head_length() const { return head_.size(); }
    size_t tail_period() const { return tail_.size(); }
    const std::vector<double>& head() const { return head_; }
    const std::vector<double>& tail() const { return tail_; }

private:
    std::vector<double> head_;
    std::vector<double> tail_;
};

/// A finite word of prepended letters, optionally anchored at a base point:
/// coordinates letters[0..m-1], then (if anchored) the base point's coordinates.
/// Without a base only the first m coordinates are determined; reading past them
/// throws, which is the guard against accidentally evaluating an underdetermined
/// Birkhoff term.
class Word {
public:
    explicit Word(std::vector<double> letters) : letters_(std::move(letters)) { wrap(); }
    Word(std::vector<double> letters, BasePoint base)
        : letters_(std::move(letters)), base_(std::move(base)) {
        wrap();
    }

    size_t determined_length() const {
        return base_ ? std::numeric_limits<size_t>::max() : letters_.size();
    }

    double coordinate(size_t j) const {
        if (j < letters_.size()) return letters_[j];
        if (!base_) throw std::out_of_range("Word: coordinate " + std::to_string(j) + " is not determined");
        return base_->coordinate(j - letters_.size());
    }

    size_t letter_count() const { return letters_.size(); }
    const std::vector<double>& letters() const { return letters_; }
    bool has_base() const { return base_.has_value(); }
    const BasePoint& base() const { return *base_; }

private:
    void wrap() {
        for (auto& a : letters_) a = wrap_angle(a);
    }

    std::vector<double> letters_;
    std::optional<BasePoint> base_;
};

/// n-term Birkhoff sum sum_{t<n} f(sigma^t x), reading f's arity-many leading
/// coordinates of each shift. Requires the first n + arity - 1 coordinates.
template <typename Point>
double birkhoff_sum(const Potential& f, const Point& x, size_t n) {
    const int k = f.arity();
    double args[3];
    double s = 0.0;
    for (size_t t = 0; t < n; ++t) {
        for (int i = 0; i < k; ++i) args[i] = x.coordinate(t + static_cast<size_t>(i));
        s += f(std::span<const double>(args, static_cast<size_t>(k)));
    }
    return s;
}

/// Enclosure of d(x, y) = sum_j theta^j d_arc(x_j, y_j) from the first n_terms
/// coordinates; the tail contributes between 0 and the metric's tail bound.
template <typename PointA, typename PointB>
DistanceBound shift_metric_distance(const PointA& x, const PointB& y, const ShiftMetric& m, int n_terms) {
    double s = 0.0;
    double w = 1.0;
    for (int j = 0; j < n_terms; ++j) {
        s += w * arc_distance(x.coordinate(static_cast<size_t>(j)), y.coordinate(static_cast<size_t>(j)));
        w *= m.theta;
    }
    return DistanceBound{s, s + m.tail_bound(n_terms)};
}

}  // namespace xylab
