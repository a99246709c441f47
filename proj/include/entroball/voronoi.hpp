#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "entroball/geometry.hpp"
#include "entroball/kernels.hpp"
#include "entroball/sampling.hpp"
#include "entroball/weights.hpp"

namespace entroball {

/// Importance-sampling estimates of the region integrals of a density q,
/// masses[i] ~ integral of q over R_i(lambda), computed from a batch drawn
/// from p with ratio = q/p.
struct RegionMassReport {
    std::vector<double> masses;
    double total = 0.0;
    std::size_t batch_size = 0;
};

using PointFn = std::function<double(std::span<const double>)>;

/// phi_lambda(x) = min_i (d(x, x_i) - lambda_i).
double phi_lambda(std::span<const double> x, const WeightVector& lam,
                  const EmpiricalMeasure& mu, const Metric& metric);

/// Smallest index attaining the minimum in phi_lambda (0-based).
std::size_t assign_region(std::span<const double> x, const WeightVector& lam,
                          const EmpiricalMeasure& mu, const Metric& metric);

RegionMassReport region_masses(const SampleBatch& batch, const PointFn& ratio,
                               const WeightVector& lam, const EmpiricalMeasure& mu,
                               const Metric& metric,
                               kernels::Exec ex = kernels::Exec::Par);

/// Region masses from precomputed assignments; empty ratio means q == p.
RegionMassReport region_masses(std::span<const std::uint32_t> assign,
                               std::span<const double> ratio, std::size_t n_regions,
                               kernels::Exec ex = kernels::Exec::Par);

/// Region indices (0-based) at cell centers of a resolution x resolution
/// grid over a 2-D domain. Row 0 is the top of the image (largest y).
std::vector<std::uint32_t> rasterize_regions(const WeightVector& lam,
                                             const EmpiricalMeasure& mu,
                                             const Metric& metric,
                                             const BoxDomain& domain,
                                             std::size_t resolution,
                                             kernels::Exec ex = kernels::Exec::Par);

/// Cell-center coordinates for grid row r, column c (top row = largest y).
void grid_cell_center(const BoxDomain& domain, std::size_t resolution,
                      std::size_t row, std::size_t col, std::span<double> out);

} // namespace entroball
