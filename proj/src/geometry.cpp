#include "entroball/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace entroball {

BoxDomain::BoxDomain(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.empty() || lo_.size() != hi_.size()) {
        throw std::invalid_argument("BoxDomain: lo/hi must be nonempty and of equal length");
    }
    for (std::size_t j = 0; j < lo_.size(); ++j) {
        if (!(lo_[j] < hi_[j])) {
            throw std::invalid_argument("BoxDomain: lo[j] < hi[j] required on every axis");
        }
    }
}

double BoxDomain::volume() const {
    double v = 1.0;
    for (std::size_t j = 0; j < lo_.size(); ++j) v *= hi_[j] - lo_[j];
    return v;
}

bool BoxDomain::contains(std::span<const double> x) const {
    if (x.size() != lo_.size()) return false;
    for (std::size_t j = 0; j < lo_.size(); ++j) {
        if (x[j] < lo_[j] || x[j] > hi_[j]) return false;
    }
    return true;
}

double Metric::operator()(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != y.size()) {
        throw std::invalid_argument("Metric: dimension mismatch");
    }
    double acc = 0.0;
    if (kind_ == MetricKind::Euclidean) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - y[j];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    for (std::size_t j = 0; j < x.size(); ++j) acc += std::abs(x[j] - y[j]);
    return acc;
}

double Metric::diameter(const BoxDomain& box) const {
    return (*this)(box.lo(), box.hi());
}

std::string Metric::name() const {
    return kind_ == MetricKind::Euclidean ? "euclidean" : "manhattan";
}

MetricKind parse_metric(const std::string& name) {
    if (name == "euclidean" || name == "l2") return MetricKind::Euclidean;
    if (name == "manhattan" || name == "l1") return MetricKind::Manhattan;
    throw std::invalid_argument("unknown metric: " + name);
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> points, std::size_t dim,
                                   const BoxDomain& domain)
    : points_(std::move(points)), dim_(dim) {
    if (dim_ == 0 || dim_ != domain.dim()) {
        throw std::invalid_argument("EmpiricalMeasure: dimension mismatch with domain");
    }
    if (points_.empty() || points_.size() % dim_ != 0) {
        throw std::invalid_argument("EmpiricalMeasure: need at least one point of full dimension");
    }
    n_ = points_.size() / dim_;
    for (std::size_t i = 0; i < n_; ++i) {
        if (!domain.contains(point(i))) {
            throw std::invalid_argument("EmpiricalMeasure: point " + std::to_string(i + 1) +
                                        " lies outside the domain");
        }
    }
}

} // namespace entroball
