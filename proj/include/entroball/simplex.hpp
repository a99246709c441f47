#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace entroball::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    std::vector<double> x;
    double value = 0.0;
};

/// max c.x subject to A x <= b, x free. Dense two-phase simplex with
/// Bland's anti-cycling rule; free variables are split as x = x+ - x-.
/// Optimal results satisfy A x - b <= 1e-9 componentwise.
Result solve(std::span<const double> c, const std::vector<std::vector<double>>& A,
             std::span<const double> b);

} // namespace entroball::lp
