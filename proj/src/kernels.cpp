#include "entroball/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace entroball::kernels {

namespace {

struct ChunkRange {
    std::size_t begin, end;
};

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

ChunkRange chunk_range(std::size_t c, std::size_t n) {
    return {c * kChunk, std::min(n, (c + 1) * kChunk)};
}

template <typename Body>
void run_chunks(std::size_t n, Exec ex, const Body& body) {
    const auto nchunks = static_cast<long long>(chunk_count(n));
#ifdef _OPENMP
    if (ex == Exec::Par) {
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < nchunks; ++c) {
            body(static_cast<std::size_t>(c));
        }
        return;
    }
#else
    (void)ex;
#endif
    for (long long c = 0; c < nchunks; ++c) {
        body(static_cast<std::size_t>(c));
    }
}

void nearest_rows(const DistanceTable& table, std::span<const double> lambda,
                  std::span<double> phi, std::span<std::uint32_t> assign,
                  std::size_t begin, std::size_t end) {
    const std::size_t n = table.cols;
    const double* row = table.d.data() + begin * n;
    for (std::size_t m = begin; m < end; ++m, row += n) {
        double best = row[0] - lambda[0];
        std::uint32_t arg = 0;
        for (std::size_t i = 1; i < n; ++i) {
            const double s = row[i] - lambda[i];
            if (s < best) {
                best = s;
                arg = static_cast<std::uint32_t>(i);
            }
        }
        phi[m] = best;
        assign[m] = arg;
    }
}

} // namespace

DistanceTable distance_table(std::span<const double> points, std::size_t dim,
                             const EmpiricalMeasure& mu, const Metric& metric, Exec ex) {
    if (dim != mu.dim()) throw std::invalid_argument("distance_table: dimension mismatch");
    DistanceTable table;
    table.rows = points.size() / dim;
    table.cols = mu.size();
    table.d.resize(table.rows * table.cols);
    const bool euclid = metric.kind() == MetricKind::Euclidean;
    const double* atoms = mu.flat().data();
    run_chunks(table.rows, ex, [&](std::size_t c) {
        const auto [begin, end] = chunk_range(c, table.rows);
        for (std::size_t m = begin; m < end; ++m) {
            const double* x = points.data() + m * dim;
            double* out = table.d.data() + m * table.cols;
            for (std::size_t i = 0; i < table.cols; ++i) {
                const double* a = atoms + i * dim;
                double acc = 0.0;
                if (euclid) {
                    for (std::size_t j = 0; j < dim; ++j) {
                        const double diff = x[j] - a[j];
                        acc += diff * diff;
                    }
                    acc = std::sqrt(acc);
                } else {
                    for (std::size_t j = 0; j < dim; ++j) acc += std::abs(x[j] - a[j]);
                }
                out[i] = acc;
            }
        }
    });
    return table;
}

void weighted_nearest(const DistanceTable& table, std::span<const double> lambda,
                      std::span<double> phi, std::span<std::uint32_t> assign, Exec ex) {
    if (lambda.size() != table.cols) {
        throw std::invalid_argument("weighted_nearest: lambda length != atom count");
    }
    if (phi.size() != table.rows || assign.size() != table.rows) {
        throw std::invalid_argument("weighted_nearest: output size mismatch");
    }
    run_chunks(table.rows, ex, [&](std::size_t c) {
        const auto [begin, end] = chunk_range(c, table.rows);
        nearest_rows(table, lambda, phi, assign, begin, end);
    });
}

std::vector<double> region_masses(std::span<const std::uint32_t> assign,
                                  std::span<const double> ratio,
                                  std::size_t n_regions, Exec ex) {
    const std::size_t rows = assign.size();
    if (rows == 0) throw std::invalid_argument("region_masses: empty batch");
    if (!ratio.empty() && ratio.size() != rows) {
        throw std::invalid_argument("region_masses: ratio size mismatch");
    }
    const std::size_t nchunks = chunk_count(rows);
    std::vector<double> partial(nchunks * n_regions, 0.0);
    run_chunks(rows, ex, [&](std::size_t c) {
        const auto [begin, end] = chunk_range(c, rows);
        double* local = partial.data() + c * n_regions;
        if (ratio.empty()) {
            for (std::size_t m = begin; m < end; ++m) local[assign[m]] += 1.0;
        } else {
            for (std::size_t m = begin; m < end; ++m) local[assign[m]] += ratio[m];
        }
    });
    std::vector<double> masses(n_regions, 0.0);
    for (std::size_t c = 0; c < nchunks; ++c) {
        const double* local = partial.data() + c * n_regions;
        for (std::size_t i = 0; i < n_regions; ++i) masses[i] += local[i];
    }
    for (double& x : masses) x /= static_cast<double>(rows);
    return masses;
}

double mean_product(std::span<const double> value, std::span<const double> ratio, Exec ex) {
    const std::size_t rows = value.size();
    if (rows == 0) throw std::invalid_argument("mean_product: empty batch");
    if (!ratio.empty() && ratio.size() != rows) {
        throw std::invalid_argument("mean_product: ratio size mismatch");
    }
    const std::size_t nchunks = chunk_count(rows);
    std::vector<double> partial(nchunks, 0.0);
    run_chunks(rows, ex, [&](std::size_t c) {
        const auto [begin, end] = chunk_range(c, rows);
        double acc = 0.0;
        if (ratio.empty()) {
            for (std::size_t m = begin; m < end; ++m) acc += value[m];
        } else {
            for (std::size_t m = begin; m < end; ++m) acc += value[m] * ratio[m];
        }
        partial[c] = acc;
    });
    double total = 0.0;
    for (double x : partial) total += x;
    return total / static_cast<double>(rows);
}

ExpMoments exp_phi_moments(std::span<const double> phi, double u, double v,
                           std::span<double> ratio_out, Exec ex) {
    const std::size_t rows = phi.size();
    if (rows == 0) throw std::invalid_argument("exp_phi_moments: empty batch");
    if (!ratio_out.empty() && ratio_out.size() != rows) {
        throw std::invalid_argument("exp_phi_moments: ratio_out size mismatch");
    }
    const std::size_t nchunks = chunk_count(rows);
    std::vector<double> partial(nchunks * 3, 0.0);
    run_chunks(rows, ex, [&](std::size_t c) {
        const auto [begin, end] = chunk_range(c, rows);
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t m = begin; m < end; ++m) {
            const double p = phi[m];
            const double r = std::exp(clamp_exponent(-1.0 - v * p - u));
            if (!ratio_out.empty()) ratio_out[m] = r;
            s0 += r;
            s1 += p * r;
            s2 += p * p * r;
        }
        partial[c * 3 + 0] = s0;
        partial[c * 3 + 1] = s1;
        partial[c * 3 + 2] = s2;
    });
    ExpMoments mom;
    for (std::size_t c = 0; c < nchunks; ++c) {
        mom.m0 += partial[c * 3 + 0];
        mom.m1 += partial[c * 3 + 1];
        mom.m2 += partial[c * 3 + 2];
    }
    mom.m0 /= static_cast<double>(rows);
    mom.m1 /= static_cast<double>(rows);
    mom.m2 /= static_cast<double>(rows);
    return mom;
}

namespace reference {

void weighted_nearest(const DistanceTable& table, std::span<const double> lambda,
                      std::span<double> phi, std::span<std::uint32_t> assign) {
    nearest_rows(table, lambda, phi, assign, 0, table.rows);
}

std::vector<double> region_masses(std::span<const std::uint32_t> assign,
                                  std::span<const double> ratio, std::size_t n_regions) {
    std::vector<double> masses(n_regions, 0.0);
    for (std::size_t m = 0; m < assign.size(); ++m) {
        masses[assign[m]] += ratio.empty() ? 1.0 : ratio[m];
    }
    for (double& x : masses) x /= static_cast<double>(assign.size());
    return masses;
}

double mean_product(std::span<const double> value, std::span<const double> ratio) {
    double acc = 0.0;
    for (std::size_t m = 0; m < value.size(); ++m) {
        acc += ratio.empty() ? value[m] : value[m] * ratio[m];
    }
    return acc / static_cast<double>(value.size());
}

ExpMoments exp_phi_moments(std::span<const double> phi, double u, double v) {
    ExpMoments mom;
    for (const double p : phi) {
        const double r = std::exp(clamp_exponent(-1.0 - v * p - u));
        mom.m0 += r;
        mom.m1 += p * r;
        mom.m2 += p * p * r;
    }
    mom.m0 /= static_cast<double>(phi.size());
    mom.m1 /= static_cast<double>(phi.size());
    mom.m2 /= static_cast<double>(phi.size());
    return mom;
}

} // namespace reference

} // namespace entroball::kernels
