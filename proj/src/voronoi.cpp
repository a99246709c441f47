#include "entroball/voronoi.hpp"

#include <stdexcept>

namespace entroball {

namespace {

void check_shapes(std::span<const double> x, const WeightVector& lam,
                  const EmpiricalMeasure& mu) {
    if (lam.size() != mu.size()) {
        throw std::invalid_argument("weight vector length does not match atom count");
    }
    if (x.size() != mu.dim()) {
        throw std::invalid_argument("query point dimension does not match atoms");
    }
}

} // namespace

double phi_lambda(std::span<const double> x, const WeightVector& lam,
                  const EmpiricalMeasure& mu, const Metric& metric) {
    check_shapes(x, lam, mu);
    double best = metric(x, mu.point(0)) - lam[0];
    for (std::size_t i = 1; i < mu.size(); ++i) {
        best = std::min(best, metric(x, mu.point(i)) - lam[i]);
    }
    return best;
}

std::size_t assign_region(std::span<const double> x, const WeightVector& lam,
                          const EmpiricalMeasure& mu, const Metric& metric) {
    check_shapes(x, lam, mu);
    double best = metric(x, mu.point(0)) - lam[0];
    std::size_t arg = 0;
    for (std::size_t i = 1; i < mu.size(); ++i) {
        const double s = metric(x, mu.point(i)) - lam[i];
        if (s < best) {
            best = s;
            arg = i;
        }
    }
    return arg;
}

RegionMassReport region_masses(const SampleBatch& batch, const PointFn& ratio,
                               const WeightVector& lam, const EmpiricalMeasure& mu,
                               const Metric& metric, kernels::Exec ex) {
    if (batch.size == 0) throw std::invalid_argument("region_masses: empty batch");
    const auto table = kernels::distance_table(batch.points, batch.dim, mu, metric, ex);
    std::vector<double> phi(batch.size);
    std::vector<std::uint32_t> assign(batch.size);
    kernels::weighted_nearest(table, lam.values(), phi, assign, ex);
    std::vector<double> r(batch.size);
    for (std::size_t m = 0; m < batch.size; ++m) r[m] = ratio(batch.point(m));
    return entroball::region_masses(assign, r, mu.size(), ex);
}

RegionMassReport region_masses(std::span<const std::uint32_t> assign,
                               std::span<const double> ratio, std::size_t n_regions,
                               kernels::Exec ex) {
    RegionMassReport report;
    report.masses = kernels::region_masses(assign, ratio, n_regions, ex);
    report.batch_size = assign.size();
    report.total = 0.0;
    for (double m : report.masses) report.total += m;
    return report;
}

void grid_cell_center(const BoxDomain& domain, std::size_t resolution,
                      std::size_t row, std::size_t col, std::span<double> out) {
    const double fx = (static_cast<double>(col) + 0.5) / static_cast<double>(resolution);
    const double fy = (static_cast<double>(row) + 0.5) / static_cast<double>(resolution);
    out[0] = domain.lo()[0] + fx * domain.extent(0);
    out[1] = domain.hi()[1] - fy * domain.extent(1);
}

std::vector<std::uint32_t> rasterize_regions(const WeightVector& lam,
                                             const EmpiricalMeasure& mu,
                                             const Metric& metric,
                                             const BoxDomain& domain,
                                             std::size_t resolution,
                                             kernels::Exec ex) {
    if (domain.dim() != 2) throw std::invalid_argument("rasterize_regions: 2-D domains only");
    if (resolution < 2) throw std::invalid_argument("rasterize_regions: resolution must be >= 2");
    if (lam.size() != mu.size()) {
        throw std::invalid_argument("rasterize_regions: weight vector length mismatch");
    }

    std::vector<double> centers(resolution * resolution * 2);
    for (std::size_t r = 0; r < resolution; ++r) {
        for (std::size_t c = 0; c < resolution; ++c) {
            grid_cell_center(domain, resolution, r, c,
                             {centers.data() + (r * resolution + c) * 2, 2});
        }
    }
    const auto table = kernels::distance_table(centers, 2, mu, metric, ex);
    std::vector<double> phi(resolution * resolution);
    std::vector<std::uint32_t> assign(resolution * resolution);
    kernels::weighted_nearest(table, lam.values(), phi, assign, ex);
    return assign;
}

} // namespace entroball
