#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace entroball {

/// Axis-aligned box domain K, the closure of a nonempty open box.
class BoxDomain {
public:
    BoxDomain(std::vector<double> lo, std::vector<double> hi);

    std::size_t dim() const { return lo_.size(); }
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }
    double extent(std::size_t axis) const { return hi_[axis] - lo_[axis]; }
    double volume() const;
    bool contains(std::span<const double> x) const;

private:
    std::vector<double> lo_;
    std::vector<double> hi_;
};

enum class MetricKind { Euclidean, Manhattan };

// Note: Manhattan bisectors between axis-aligned point pairs can have
// positive measure; region assignment then depends on the tie rule.
class Metric {
public:
    explicit Metric(MetricKind kind) : kind_(kind) {}

    MetricKind kind() const { return kind_; }
    double operator()(std::span<const double> x, std::span<const double> y) const;

    /// Largest distance between two points of the box; both metrics
    /// attain it at opposite corners.
    double diameter(const BoxDomain& box) const;

    std::string name() const;

private:
    MetricKind kind_;
};

MetricKind parse_metric(const std::string& name);

/// Empirical measure mu: N atoms, each of mass exactly 1/N, inside the domain.
class EmpiricalMeasure {
public:
    /// points is row-major N x dim.
    EmpiricalMeasure(std::vector<double> points, std::size_t dim, const BoxDomain& domain);

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }
    std::span<const double> point(std::size_t i) const {
        return {points_.data() + i * dim_, dim_};
    }
    std::span<const double> flat() const { return points_; }

private:
    std::vector<double> points_;
    std::size_t dim_;
    std::size_t n_;
};

} // namespace entroball
