#include "entroball/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace entroball {

namespace {

double default_grad_tol(std::size_t m) { return 2.0 / std::sqrt(static_cast<double>(m)); }

// Projected supergradient of the sampled Psi: proj_Lambda(1/N - masses).
// The projection removes the component along (1,...,1) so the iterates
// stay in Lambda; for ratio == 1 the masses sum to one and the projection
// is a no-op.
void projected_gradient(std::span<const double> masses, std::span<double> g) {
    const double inv_n = 1.0 / static_cast<double>(masses.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        g[i] = inv_n - masses[i];
        mean += g[i];
    }
    mean *= inv_n;
    for (double& x : g) x -= mean;
}

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sq_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

} // namespace

double psi(const WeightVector& lam, const SampleBatch& batch,
           std::span<const double> ratio, const EmpiricalMeasure& mu,
           const Metric& metric, kernels::Exec ex) {
    if (batch.size == 0) throw std::invalid_argument("psi: empty batch");
    const auto table = kernels::distance_table(batch.points, batch.dim, mu, metric, ex);
    std::vector<double> phi(batch.size);
    std::vector<std::uint32_t> assign(batch.size);
    kernels::weighted_nearest(table, lam.values(), phi, assign, ex);
    return kernels::mean_product(phi, ratio, ex);
}

TransportSolution maximize_psi(const SampleBatch& batch, std::span<const double> ratio,
                               const EmpiricalMeasure& mu, const Metric& metric,
                               const BoxDomain& domain, const TransportOptions& opts) {
    if (batch.size == 0) throw std::invalid_argument("maximize_psi: empty batch");
    const std::size_t n = mu.size();
    const std::size_t m = batch.size;
    const kernels::Exec ex = opts.exec;

    const double diam = metric.diameter(domain);
    const double step_c = opts.schedule.c > 0.0 ? opts.schedule.c : diam;
    const double grad_tol =
        opts.stop.grad_tol > 0.0 ? opts.stop.grad_tol : default_grad_tol(m);

    const auto table = kernels::distance_table(batch.points, batch.dim, mu, metric, ex);

    std::vector<double> lambda(n, 0.0);
    if (!opts.init.empty()) {
        if (opts.init.size() != n) throw std::invalid_argument("maximize_psi: bad init length");
        lambda = opts.init;
        project_to_lambda(lambda);
    }

    std::vector<double> phi(m);
    std::vector<std::uint32_t> assign(m);
    std::vector<double> g(n);

    auto evaluate = [&](std::span<const double> lam) {
        kernels::weighted_nearest(table, lam, phi, assign, ex);
        const auto masses = kernels::region_masses(assign, ratio, n, ex);
        const double value = kernels::mean_product(phi, ratio, ex);
        return std::pair<std::vector<double>, double>(masses, value);
    };

    std::vector<double> best_lambda = lambda;
    double best_value = -std::numeric_limits<double>::infinity();
    bool grad_stop = false;
    std::size_t it = 0;

    // Target-level state for the Polyak schedule.
    double level_gap = 0.1 * diam;
    std::size_t since_improve = 0;

    TransportSolution sol;
    for (it = 1; it <= opts.stop.max_iterations; ++it) {
        auto [masses, value] = evaluate(lambda);
        projected_gradient(masses, g);
        const double gnorm = inf_norm(g);

        if (opts.record_trace) sol.psi_trace.push_back(value);
        if (value > best_value) {
            best_value = value;
            best_lambda = lambda;
            since_improve = 0;
        } else {
            ++since_improve;
        }
        if (gnorm <= grad_tol) {
            // The stop iterate is itself near-optimal; prefer it when it
            // carries the best value seen.
            if (value >= best_value) {
                best_value = value;
                best_lambda = lambda;
            }
            grad_stop = true;
            break;
        }

        double t;
        if (opts.schedule.kind == StepSchedule::Kind::Polyak) {
            if (since_improve >= 25) {
                level_gap *= 0.5;
                since_improve = 0;
            }
            const double target = best_value + level_gap;
            t = (target - value) / std::max(sq_norm(g), 1e-300);
        } else {
            t = step_c / static_cast<double>(it);
        }
        for (std::size_t i = 0; i < n; ++i) lambda[i] += t * g[i];
        project_to_lambda(lambda);
    }

    // Recompute everything at the returned iterate so the reported masses,
    // gradient and value are mutually consistent.
    auto [masses, value] = evaluate(best_lambda);
    projected_gradient(masses, g);

    sol.lambda_star = WeightVector(best_lambda);
    sol.wasserstein = value;
    sol.masses.masses = std::move(masses);
    sol.masses.batch_size = m;
    sol.masses.total = 0.0;
    for (double x : sol.masses.masses) sol.masses.total += x;
    sol.iterations = std::min(it, opts.stop.max_iterations);
    sol.grad_norm = inf_norm(g);
    sol.converged = grad_stop || sol.grad_norm <= grad_tol;
    return sol;
}

TransportSolution maximize_psi_stochastic(const PriorModel& prior, const PointFn& ratio,
                                          const EmpiricalMeasure& mu, const Metric& metric,
                                          std::size_t batch_size, std::uint64_t seed,
                                          const TransportOptions& opts) {
    const std::size_t n = mu.size();
    const kernels::Exec ex = opts.exec;
    const BoxDomain& domain = prior.domain();
    const double step_c =
        opts.schedule.c > 0.0 ? opts.schedule.c : metric.diameter(domain);
    const double grad_tol =
        opts.stop.grad_tol > 0.0 ? opts.stop.grad_tol : default_grad_tol(batch_size);

    std::vector<double> lambda(n, 0.0);
    if (!opts.init.empty()) {
        lambda = opts.init;
        project_to_lambda(lambda);
    }
    std::vector<double> g(n);
    std::vector<double> phi(batch_size);
    std::vector<std::uint32_t> assign(batch_size);
    std::vector<double> r(batch_size);

    TransportSolution sol;
    std::vector<double> best_lambda = lambda;
    double best_value = -std::numeric_limits<double>::infinity();
    std::size_t it = 0;
    for (it = 1; it <= opts.stop.max_iterations; ++it) {
        const SampleBatch batch = draw_batch(prior, batch_size, seed + it);
        const auto table = kernels::distance_table(batch.points, batch.dim, mu, metric, ex);
        kernels::weighted_nearest(table, lambda, phi, assign, ex);
        for (std::size_t m = 0; m < batch_size; ++m) r[m] = ratio(batch.point(m));
        const auto masses = kernels::region_masses(assign, r, n, ex);
        const double value = kernels::mean_product(phi, r, ex);
        projected_gradient(masses, g);

        if (opts.record_trace) sol.psi_trace.push_back(value);
        if (value > best_value) {
            best_value = value;
            best_lambda = lambda;
        }
        if (inf_norm(g) <= grad_tol) break;

        const double t = step_c / static_cast<double>(it);
        for (std::size_t i = 0; i < n; ++i) lambda[i] += t * g[i];
        project_to_lambda(lambda);
    }

    // Score the returned iterate on one final independent batch.
    const SampleBatch batch = draw_batch(prior, batch_size, seed);
    const auto table = kernels::distance_table(batch.points, batch.dim, mu, metric, ex);
    kernels::weighted_nearest(table, best_lambda, phi, assign, ex);
    for (std::size_t m = 0; m < batch_size; ++m) r[m] = ratio(batch.point(m));
    const auto masses = kernels::region_masses(assign, r, n, ex);
    projected_gradient(masses, g);

    sol.lambda_star = WeightVector(best_lambda);
    sol.wasserstein = kernels::mean_product(phi, r, ex);
    sol.masses.masses = masses;
    sol.masses.batch_size = batch_size;
    for (double x : masses) sol.masses.total += x;
    sol.iterations = std::min(it, opts.stop.max_iterations);
    sol.grad_norm = inf_norm(g);
    sol.converged = sol.grad_norm <= 2.0 * grad_tol;
    return sol;
}

std::size_t transport_map(const TransportSolution& sol, std::span<const double> x,
                          const EmpiricalMeasure& mu, const Metric& metric) {
    return assign_region(x, sol.lambda_star, mu, metric);
}

MembershipResult ball_membership(std::span<const double> ratio, const EmpiricalMeasure& mu,
                                 double delta, const SampleBatch& batch, const Metric& metric,
                                 const BoxDomain& domain, const TransportOptions& opts,
                                 double tol) {
    if (!(delta > 0.0)) throw std::invalid_argument("ball_membership: delta must be positive");
    if (tol <= 0.0) tol = 3.0 / std::sqrt(static_cast<double>(batch.size));

    MembershipResult result;
    result.transport = maximize_psi(batch, ratio, mu, metric, domain, opts);
    const double w = result.transport.wasserstein;
    result.margin = delta - w;
    if (w + tol < delta) {
        result.position = BallPosition::Inside;
    } else if (w - tol > delta) {
        result.position = BallPosition::Outside;
    } else {
        result.position = BallPosition::Boundary;
    }
    return result;
}

} // namespace entroball
