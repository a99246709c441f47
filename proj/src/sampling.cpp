#include "entroball/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace entroball {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Small deterministic generator; the standard engines' distributions are
// not pinned across implementations, so doubles are built directly from
// the high 53 bits.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        s_ = splitmix64(seed ^ 0x2545f4914f6cdd1dULL);
        if (s_ == 0) s_ = 0x9e3779b97f4a7c15ULL;
    }
    std::uint64_t next() {
        std::uint64_t x = s_;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        s_ = x;
        return x * 0x2545f4914f6cdd1dULL;
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // (0,1], safe for log()
    double uniform01_pos() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01_pos();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::uint64_t s_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk) {
    return splitmix64(seed + 0x632be59bd9b4e019ULL * (chunk + 1));
}

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

} // namespace

PriorModel make_uniform_prior(const BoxDomain& domain) {
    const double inv_vol = 1.0 / domain.volume();
    auto density = [domain, inv_vol](std::span<const double> x) {
        return domain.contains(x) ? inv_vol : 0.0;
    };
    auto sampler = [domain](std::size_t count, std::uint64_t seed) {
        const std::size_t dim = domain.dim();
        std::vector<double> out(count * dim);
        const std::size_t nchunks = (count + kSampleChunk - 1) / kSampleChunk;
        for (std::size_t c = 0; c < nchunks; ++c) {
            Rng rng(chunk_seed(seed, c));
            const std::size_t end = std::min(count, (c + 1) * kSampleChunk);
            for (std::size_t m = c * kSampleChunk; m < end; ++m) {
                for (std::size_t j = 0; j < dim; ++j) {
                    out[m * dim + j] = domain.lo()[j] + rng.uniform01() * domain.extent(j);
                }
            }
        }
        return out;
    };
    return PriorModel("uniform", domain, std::move(density), std::move(sampler));
}

PriorModel make_truncated_gaussian_prior(const BoxDomain& domain,
                                         std::vector<double> mean, double sigma) {
    const std::size_t dim = domain.dim();
    if (mean.size() != dim) {
        throw std::invalid_argument("truncated gaussian: mean dimension mismatch");
    }
    if (!domain.contains(mean)) {
        throw std::invalid_argument("truncated gaussian: mean must lie in the domain");
    }
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("truncated gaussian: sigma must be positive");
    }

    // Acceptance probability of box rejection = mass of the box under the
    // unrestricted Gaussian, in closed form per axis.
    double acceptance = 1.0;
    for (std::size_t j = 0; j < dim; ++j) {
        acceptance *= normal_cdf((domain.hi()[j] - mean[j]) / sigma) -
                      normal_cdf((domain.lo()[j] - mean[j]) / sigma);
    }
    if (acceptance < 1e-3) {
        throw std::runtime_error("truncated gaussian: degenerate truncation, "
                                 "acceptance rate below 1e-3");
    }

    const double norm = acceptance * std::pow(sigma * std::sqrt(2.0 * std::numbers::pi),
                                              static_cast<double>(dim));
    auto density = [domain, mean, sigma, norm](std::span<const double> x) {
        if (!domain.contains(x)) return 0.0;
        double q = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - mean[j];
            q += d * d;
        }
        return std::exp(-q / (2.0 * sigma * sigma)) / norm;
    };
    auto sampler = [domain, mean, sigma](std::size_t count, std::uint64_t seed) {
        const std::size_t dim = domain.dim();
        std::vector<double> out(count * dim);
        std::vector<double> proposal(dim);
        const std::size_t nchunks = (count + kSampleChunk - 1) / kSampleChunk;
        for (std::size_t c = 0; c < nchunks; ++c) {
            Rng rng(chunk_seed(seed, c));
            const std::size_t begin = c * kSampleChunk;
            const std::size_t end = std::min(count, (c + 1) * kSampleChunk);
            std::size_t proposals = 0;
            for (std::size_t m = begin; m < end; ++m) {
                for (;;) {
                    ++proposals;
                    if (proposals > 1000 * (end - begin) + 100000) {
                        throw std::runtime_error("truncated gaussian: rejection sampler "
                                                 "acceptance rate below 1e-3");
                    }
                    for (std::size_t j = 0; j < dim; ++j) {
                        proposal[j] = mean[j] + sigma * rng.gaussian();
                    }
                    if (domain.contains(proposal)) break;
                }
                for (std::size_t j = 0; j < dim; ++j) out[m * dim + j] = proposal[j];
            }
        }
        return out;
    };
    return PriorModel("truncated_gaussian", domain, std::move(density), std::move(sampler));
}

SampleBatch draw_batch(const PriorModel& prior, std::size_t m, std::uint64_t seed) {
    if (m == 0) throw std::invalid_argument("draw_batch: M must be at least 1");
    SampleBatch batch;
    batch.dim = prior.domain().dim();
    batch.size = m;
    batch.seed = seed;
    batch.points = prior.sample(m, seed);
    batch.weights.assign(m, 1.0 / static_cast<double>(m));
    return batch;
}

} // namespace entroball
