#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace entroball {

/// lambda in Lambda = {sum lambda_i = 0}. Construction projects the input
/// onto Lambda by subtracting its mean.
class WeightVector {
public:
    WeightVector() = default; // empty; reassigned by solvers
    explicit WeightVector(std::vector<double> v);
    static WeightVector zeros(std::size_t n);

    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    std::span<const double> values() const { return v_; }
    const std::vector<double>& raw() const { return v_; }

private:
    std::vector<double> v_;
};

/// In-place projection onto Lambda (subtract the mean).
void project_to_lambda(std::span<double> v);

} // namespace entroball
