#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "entroball/geometry.hpp"
#include "entroball/kernels.hpp"
#include "entroball/sampling.hpp"
#include "entroball/voronoi.hpp"
#include "entroball/weights.hpp"

namespace entroball {

struct StepSchedule {
    enum class Kind {
        Diminishing, // t_k = c / k, square-summable but not summable
        Polyak,      // adaptive target-level steps
    };
    Kind kind = Kind::Diminishing;
    double c = 0.0; // 0 -> diameter of the domain under the metric
};

struct StopRule {
    double grad_tol = 0.0; // 0 -> 2/sqrt(M)
    std::size_t max_iterations = 10000;
};

struct TransportOptions {
    StepSchedule schedule{};
    StopRule stop{};
    kernels::Exec exec = kernels::Exec::Par;
    std::vector<double> init;  // empty -> lambda = 0
    bool record_trace = false; // keep psi per iteration
};

/// Result of maximizing Psi(lambda) over Lambda. At the returned lambda the
/// region masses are all close to 1/N and Psi equals the Wasserstein
/// distance between q and mu on the batch.
struct TransportSolution {
    WeightVector lambda_star;
    double wasserstein = 0.0;
    RegionMassReport masses;
    std::size_t iterations = 0;
    double grad_norm = 0.0; // projected supergradient, infinity norm
    bool converged = false;
    std::vector<double> psi_trace; // filled when record_trace is set
};

/// Sample-average estimate of Psi(lambda) = integral of phi_lambda * q.
/// Empty ratio means q == p.
double psi(const WeightVector& lam, const SampleBatch& batch,
           std::span<const double> ratio, const EmpiricalMeasure& mu,
           const Metric& metric, kernels::Exec ex = kernels::Exec::Par);

/// Supergradient ascent of Psi over Lambda on a fixed batch; returns the
/// best iterate seen. The gradient components are 1/N - masses[i].
TransportSolution maximize_psi(const SampleBatch& batch, std::span<const double> ratio,
                               const EmpiricalMeasure& mu, const Metric& metric,
                               const BoxDomain& domain, const TransportOptions& opts = {});

/// Fresh-sample variant for variance studies: draws a new batch from the
/// prior at every iteration (seeded per iteration from `seed`), so the
/// ascent is stochastic rather than a fixed sample-average problem. The
/// default solver path is maximize_psi on one shared batch.
TransportSolution maximize_psi_stochastic(const PriorModel& prior, const PointFn& ratio,
                                          const EmpiricalMeasure& mu, const Metric& metric,
                                          std::size_t batch_size, std::uint64_t seed,
                                          const TransportOptions& opts = {});

/// The optimal map sends x to the atom of its region at lambda_star.
std::size_t transport_map(const TransportSolution& sol, std::span<const double> x,
                          const EmpiricalMeasure& mu, const Metric& metric);

enum class BallPosition { Inside, Boundary, Outside };

struct MembershipResult {
    BallPosition position = BallPosition::Boundary;
    double margin = 0.0; // delta - W
    TransportSolution transport;
};

/// Wasserstein-ball membership: q is in B_delta(mu) iff W(q, mu) <= delta,
/// equivalently iff every moment constraint integral phi_lambda * q <= delta
/// holds. Decided up to tol (default 3/sqrt(M)).
MembershipResult ball_membership(std::span<const double> ratio, const EmpiricalMeasure& mu,
                                 double delta, const SampleBatch& batch, const Metric& metric,
                                 const BoxDomain& domain, const TransportOptions& opts = {},
                                 double tol = 0.0);

} // namespace entroball
