#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "entroball/geometry.hpp"

namespace entroball {

/// One batch of M i.i.d. draws from a prior. Weights are all 1/M and sum
/// to one; the batch is reproduced bit-for-bit by (prior, M, seed).
struct SampleBatch {
    std::vector<double> points;  // row-major M x dim
    std::vector<double> weights; // all 1/M
    std::size_t dim = 0;
    std::size_t size = 0; // M
    std::uint64_t seed = 0;

    std::span<const double> point(std::size_t m) const {
        return {points.data() + m * dim, dim};
    }
};

/// A prior is a strictly positive density on the box together with an
/// exact i.i.d. sampler. All solver integrals are expectations under the
/// prior, so the pair is the only density interface the library needs.
class PriorModel {
public:
    using DensityFn = std::function<double(std::span<const double>)>;
    using SamplerFn = std::function<std::vector<double>(std::size_t, std::uint64_t)>;

    PriorModel(std::string name, BoxDomain domain, DensityFn density, SamplerFn sampler)
        : name_(std::move(name)), domain_(std::move(domain)),
          density_(std::move(density)), sampler_(std::move(sampler)) {}

    double density(std::span<const double> x) const { return density_(x); }
    std::vector<double> sample(std::size_t count, std::uint64_t seed) const {
        return sampler_(count, seed);
    }
    const std::string& name() const { return name_; }
    const BoxDomain& domain() const { return domain_; }

private:
    std::string name_;
    BoxDomain domain_;
    DensityFn density_;
    SamplerFn sampler_;
};

// Sampling is chunked: points [c*kSampleChunk, (c+1)*kSampleChunk) are drawn
// from a generator seeded by mix(seed, c), so chunks may be produced in any
// order (or in parallel) with identical output.
inline constexpr std::size_t kSampleChunk = 4096;

PriorModel make_uniform_prior(const BoxDomain& domain);

/// Gaussian restricted to the box. The normalizer is the per-axis erf
/// integral; the sampler rejects proposals that land outside the box and
/// fails if the acceptance probability is below 1e-3.
PriorModel make_truncated_gaussian_prior(const BoxDomain& domain,
                                         std::vector<double> mean, double sigma);

SampleBatch draw_batch(const PriorModel& prior, std::size_t m, std::uint64_t seed);

} // namespace entroball
