#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "entroball/geometry.hpp"
#include "entroball/kernels.hpp"
#include "entroball/sampling.hpp"
#include "entroball/voronoi.hpp"
#include "entroball/weights.hpp"

namespace entroball {

/// Multipliers of the two-dimensional dual; v >= 0 is dual feasibility for
/// the transport-cost inequality.
struct DualPair {
    double u = -1.0;
    double v = 0.0;
};

/// ratio(x) = q(x)/p(x) = exp(-1 - v*phi_lambda(x) - u) for the
/// exponential-family densities q = p * exp(-1 - v*phi_lambda - u).
/// Evaluated in log space with a clamped exponent.
class RatioFn {
public:
    RatioFn(WeightVector lam, DualPair dual, EmpiricalMeasure mu, Metric metric);

    double operator()(std::span<const double> x) const;
    double from_phi(double phi) const;
    /// Batch evaluation from precomputed phi values.
    std::vector<double> values(std::span<const double> phi,
                               kernels::Exec ex = kernels::Exec::Par) const;
    /// Batch evaluation from scratch (recomputes phi against its own atoms).
    std::vector<double> batch_values(const SampleBatch& batch,
                                     kernels::Exec ex = kernels::Exec::Par) const;

    const WeightVector& lambda() const { return lam_; }
    const DualPair& dual() const { return dual_; }

private:
    WeightVector lam_;
    DualPair dual_;
    EmpiricalMeasure mu_;
    Metric metric_;
};

/// -u - v*delta - mean(exp(-1 - v*phi - u)) on the batch.
double dual_objective(const DualPair& pair, const WeightVector& lam, double delta,
                      const SampleBatch& batch, const EmpiricalMeasure& mu,
                      const Metric& metric, kernels::Exec ex = kernels::Exec::Par);

struct DualDerivatives {
    std::array<double, 2> gradient{};   // (-1 + m0, -delta + m1)
    std::array<double, 4> hessian{};    // row-major -[[m0, m1], [m1, m2]]
    kernels::ExpMoments moments{};
};

DualDerivatives dual_gradient_hessian(const DualPair& pair, const WeightVector& lam,
                                      double delta, const SampleBatch& batch,
                                      const EmpiricalMeasure& mu, const Metric& metric,
                                      kernels::Exec ex = kernels::Exec::Par);

struct DualSolution {
    DualPair pair{};
    bool converged = false;
    std::size_t iterations = 0;
    double value = 0.0; // dual objective at pair; equals Gamma(lambda) at optimum
    kernels::ExpMoments moments{};
};

inline double default_dual_tol(std::size_t m) {
    const double noise = 0.1 / std::sqrt(static_cast<double>(m));
    return noise > 1e-8 ? noise : 1e-8;
}

/// Projected Newton with Armijo backtracking on precomputed phi values.
/// Stationarity on the active face: with v = 0 the u-gradient must vanish
/// and the v-gradient must be <= tol.
DualSolution solve_dual_core(std::span<const double> phi, double delta, double tol,
                             std::size_t max_iterations = 200, DualPair init = {},
                             kernels::Exec ex = kernels::Exec::Par);

std::pair<DualSolution, RatioFn> solve_dual(const WeightVector& lam, double delta,
                                            const SampleBatch& batch,
                                            const EmpiricalMeasure& mu, const Metric& metric,
                                            double tol = 0.0,
                                            kernels::Exec ex = kernels::Exec::Par);

/// Gamma(lambda) = min{H(q,p) : q in Omega(lambda)} via the strong dual,
/// together with the optimal pair.
std::pair<double, DualPair> gamma_value(const WeightVector& lam, double delta,
                                        const SampleBatch& batch, const EmpiricalMeasure& mu,
                                        const Metric& metric,
                                        kernels::Exec ex = kernels::Exec::Par);

/// H(q, p) estimate: mean of r log r over the batch, with r log r -> 0 as
/// r -> 0.
double cross_entropy(std::span<const double> ratio_values);
double cross_entropy(const RatioFn& ratio, const SampleBatch& batch,
                     kernels::Exec ex = kernels::Exec::Par);

/// q = p * ratio evaluated at the cell centers of a resolution x resolution
/// grid over the prior's 2-D domain (row 0 at the top).
std::vector<double> density_grid(const PriorModel& prior, const RatioFn& ratio,
                                 std::size_t resolution,
                                 kernels::Exec ex = kernels::Exec::Par);

} // namespace entroball
