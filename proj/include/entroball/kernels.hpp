#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "entroball/geometry.hpp"

// Batch kernels shared by every solver. Each kernel has an OpenMP path and
// a serial path selected by Exec; both run the same fixed-chunk reduction
// (partial sums per kChunk block, merged in block order), so results are
// bit-identical regardless of Exec and thread count. kernels::reference
// holds naive single-loop implementations kept for tests and benchmarks.
namespace entroball::kernels {

enum class Exec { Seq, Par };

inline constexpr std::size_t kChunk = 4096;

/// Pairwise distances d(point_m, atom_i); rows = batch points, cols = atoms.
struct DistanceTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> d; // row-major

    double operator()(std::size_t m, std::size_t i) const { return d[m * cols + i]; }
};

DistanceTable distance_table(std::span<const double> points, std::size_t dim,
                             const EmpiricalMeasure& mu, const Metric& metric, Exec ex);

/// phi[m] = min_i (table(m,i) - lambda[i]); assign[m] = lowest minimizing index.
void weighted_nearest(const DistanceTable& table, std::span<const double> lambda,
                      std::span<double> phi, std::span<std::uint32_t> assign, Exec ex);

/// masses[i] = (1/rows) * sum_{assign[m]==i} ratio[m]. An empty ratio span
/// means ratio == 1, in which case the masses sum to 1 exactly.
std::vector<double> region_masses(std::span<const std::uint32_t> assign,
                                  std::span<const double> ratio,
                                  std::size_t n_regions, Exec ex);

/// (1/n) * sum_m value[m] * ratio[m]; empty ratio means ratio == 1.
double mean_product(std::span<const double> value, std::span<const double> ratio, Exec ex);

struct ExpMoments {
    double m0 = 0; // mean r
    double m1 = 0; // mean phi r
    double m2 = 0; // mean phi^2 r
};

/// r_m = exp(clamped(-1 - v*phi[m] - u)). Writes r into ratio_out when
/// nonempty (must then have phi's length).
ExpMoments exp_phi_moments(std::span<const double> phi, double u, double v,
                           std::span<double> ratio_out, Exec ex);

// Exponent clamp keeping sums finite: e^690 * phi^2 * M stays below
// double overflow at desk scales.
inline double clamp_exponent(double t) {
    if (t > 690.0) return 690.0;
    if (t < -745.0) return -745.0;
    return t;
}

namespace reference {

void weighted_nearest(const DistanceTable& table, std::span<const double> lambda,
                      std::span<double> phi, std::span<std::uint32_t> assign);
std::vector<double> region_masses(std::span<const std::uint32_t> assign,
                                  std::span<const double> ratio, std::size_t n_regions);
double mean_product(std::span<const double> value, std::span<const double> ratio);
ExpMoments exp_phi_moments(std::span<const double> phi, double u, double v);

} // namespace reference

} // namespace entroball::kernels
