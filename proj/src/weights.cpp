#include "entroball/weights.hpp"

#include <stdexcept>

namespace entroball {

void project_to_lambda(std::span<double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

WeightVector::WeightVector(std::vector<double> v) : v_(std::move(v)) {
    if (v_.empty()) throw std::invalid_argument("WeightVector: empty");
    project_to_lambda(v_);
}

WeightVector WeightVector::zeros(std::size_t n) {
    return WeightVector(std::vector<double>(n, 0.0));
}

} // namespace entroball
