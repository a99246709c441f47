#include "entroball/cutting_plane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entroball/simplex.hpp"

namespace entroball {

CutPolytope CutPolytope::initial_box(std::size_t n, double radius) {
    CutPolytope poly;
    poly.n = n;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> plus(n, 0.0), minus(n, 0.0);
        plus[i] = 1.0;
        minus[i] = -1.0;
        poly.normals.push_back(std::move(plus));
        poly.offsets.push_back(radius);
        poly.normals.push_back(std::move(minus));
        poly.offsets.push_back(radius);
    }
    return poly;
}

CutPolytope initial_for_impl(const EmpiricalMeasure& mu, const Metric& metric,
                             double box_radius) {
    const std::size_t n = mu.size();
    CutPolytope poly = CutPolytope::initial_box(n, box_radius);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            std::vector<double> a(n, 0.0);
            a[i] = 1.0;
            a[j] = -1.0;
            poly.add_halfspace(std::move(a), metric(mu.point(i), mu.point(j)));
        }
    }
    return poly;
}

CutPolytope CutPolytope::initial_for(const EmpiricalMeasure& mu, const Metric& metric,
                                     double box_radius) {
    return initial_for_impl(mu, metric, box_radius);
}

void CutPolytope::add_halfspace(std::vector<double> a, double b) {
    if (a.size() != n) throw std::invalid_argument("CutPolytope: normal length mismatch");
    normals.push_back(std::move(a));
    offsets.push_back(b);
}

void CutPolytope::relax(double eps) {
    for (double& b : offsets) b += eps;
}

ChebyshevCenter chebyshev_center(const CutPolytope& poly) {
    const std::size_t n = poly.n;
    if (n == 0 || poly.normals.empty()) {
        throw std::invalid_argument("chebyshev_center: empty polytope description");
    }
    // One atom: Lambda = {0} and the polytope is the single point 0.
    if (n == 1) {
        for (std::size_t j = 0; j < poly.offsets.size(); ++j) {
            if (poly.offsets[j] < -1e-12) {
                throw InfeasiblePolytope("chebyshev_center: infeasible 0-dimensional polytope");
            }
        }
        return {WeightVector::zeros(1), 0.0};
    }

    // Variables (y_1..y_{n-1}, r); lambda_n = -sum(y). Row a in lambda
    // space becomes a~_i = a_i - a_n in the parametrization.
    const std::size_t dim = n - 1;
    std::vector<double> c(dim + 1, 0.0);
    c[dim] = 1.0; // maximize r
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (std::size_t j = 0; j < poly.normals.size(); ++j) {
        const auto& a = poly.normals[j];
        std::vector<double> row(dim + 1, 0.0);
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            row[i] = a[i] - a[n - 1];
            norm_sq += row[i] * row[i];
        }
        const double norm = std::sqrt(norm_sq);
        if (norm <= 1e-14) {
            // Normal vanishes inside Lambda; the halfspace is either void
            // or all of Lambda.
            if (poly.offsets[j] < -1e-12) {
                throw InfeasiblePolytope("chebyshev_center: contradictory degenerate halfspace");
            }
            continue;
        }
        row[dim] = norm;
        rows.push_back(std::move(row));
        rhs.push_back(poly.offsets[j]);
    }

    const lp::Result res = lp::solve(c, rows, rhs);
    if (res.status == lp::Status::Unbounded) {
        throw std::runtime_error("chebyshev_center: unbounded polytope (missing box?)");
    }
    if (res.status == lp::Status::Infeasible || res.value < 0.0) {
        throw InfeasiblePolytope("chebyshev_center: polytope has no interior");
    }

    std::vector<double> lambda(n, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        lambda[i] = res.x[i];
        sum += res.x[i];
    }
    lambda[n - 1] = -sum;
    return {WeightVector(std::move(lambda)), res.value};
}

CutRecord generate_cut(const WeightVector& lam, double delta, const SampleBatch& batch,
                       const EmpiricalMeasure& mu, const Metric& metric,
                       double dual_tol, kernels::Exec ex) {
    const std::size_t n = mu.size();
    const auto table = kernels::distance_table(batch.points, batch.dim, mu, metric, ex);
    std::vector<double> phi(batch.size);
    std::vector<std::uint32_t> assign(batch.size);
    kernels::weighted_nearest(table, lam.values(), phi, assign, ex);

    const DualSolution inner = solve_dual_core(phi, delta, dual_tol, 200, DualPair{}, ex);
    std::vector<double> ratio(batch.size);
    kernels::exp_phi_moments(phi, inner.pair.u, inner.pair.v, ratio, ex);
    const auto masses = kernels::region_masses(assign, ratio, n, ex);

    CutRecord rec;
    rec.center.assign(lam.values().begin(), lam.values().end());
    rec.g.resize(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) rec.g[i] = inv_n - masses[i];
    rec.gamma_estimate = inner.value;
    rec.dual = inner.pair;
    rec.inner_converged = inner.converged;
    return rec;
}

namespace {

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

MinCrossResult solve_min_cross_entropy(const EmpiricalMeasure& mu, const PriorModel& prior,
                                       const Metric& metric, double delta,
                                       const SampleBatch& batch,
                                       const MinCrossOptions& opts) {
    if (!(delta > 0.0)) throw std::invalid_argument("solve_min_cross_entropy: delta > 0 required");
    const std::size_t n = mu.size();
    const std::size_t m = batch.size;
    const kernels::Exec ex = opts.exec;
    const BoxDomain& domain = prior.domain();
    const double diam = metric.diameter(domain);
    const double radius_tol = opts.radius_tol > 0.0 ? opts.radius_tol : 1e-3 * diam;
    const double dual_tol = opts.dual_tol > 0.0 ? opts.dual_tol : default_dual_tol(m);

    MinCrossResult result;

    // Inactive case: the prior already lies in the ball, so q* = p with the
    // prior's own transport weights.
    if (opts.prior_transport != nullptr) {
        result.prior_transport = *opts.prior_transport;
    } else {
        TransportOptions topts = opts.transport;
        topts.exec = ex;
        result.prior_transport = maximize_psi(batch, {}, mu, metric, domain, topts);
    }
    if (result.prior_transport.wasserstein <= delta) {
        EntropySolution& sol = result.solution;
        sol.lambda_star = result.prior_transport.lambda_star;
        sol.dual = DualPair{-1.0, 0.0};
        sol.delta = delta;
        sol.mass = 1.0;
        sol.transport_cost = result.prior_transport.wasserstein;
        sol.cross_entropy_value = 0.0;
        sol.constraint_active = false;
        sol.converged = result.prior_transport.converged;
        sol.iterations = 0;
        sol.chebyshev_radius = 0.0;
        return result;
    }

    const auto table = kernels::distance_table(batch.points, batch.dim, mu, metric, ex);
    std::vector<double> phi(m);
    std::vector<std::uint32_t> assign(m);
    std::vector<double> ratio(m);

    auto cut_at = [&](const WeightVector& lam, std::size_t iteration) {
        kernels::weighted_nearest(table, lam.values(), phi, assign, ex);
        const DualSolution inner = solve_dual_core(phi, delta, dual_tol, 200, DualPair{}, ex);
        kernels::exp_phi_moments(phi, inner.pair.u, inner.pair.v, ratio, ex);
        const auto masses = kernels::region_masses(assign, ratio, n, ex);
        CutRecord rec;
        rec.iteration = iteration;
        rec.center.assign(lam.values().begin(), lam.values().end());
        rec.g.resize(n);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) rec.g[i] = inv_n - masses[i];
        rec.gamma_estimate = inner.value;
        rec.dual = inner.pair;
        rec.inner_converged = inner.converged;
        return rec;
    };

    CutPolytope poly = CutPolytope::initial_for(mu, metric, diam);
    bool relaxed = false;
    bool converged = false;
    std::size_t iterations = 0;
    double last_radius = 0.0;

    std::size_t best = 0;
    double best_gamma = -std::numeric_limits<double>::infinity();

    for (std::size_t k = 1; k <= opts.max_cuts; ++k) {
        ChebyshevCenter cheb;
        try {
            cheb = chebyshev_center(poly);
        } catch (const InfeasiblePolytope&) {
            if (relaxed) throw;
            // Monte-Carlo noise can tilt cuts slightly; grant the noise
            // allowance once and retry.
            poly.relax(2.0 / std::sqrt(static_cast<double>(m)) * diam);
            relaxed = true;
            try {
                cheb = chebyshev_center(poly);
            } catch (const InfeasiblePolytope&) {
                throw InfeasiblePolytope(
                    "solve_min_cross_entropy: polytope empty after noise relaxation; "
                    "check delta and batch size");
            }
        }
        last_radius = cheb.radius;
        iterations = k;

        CutRecord rec = cut_at(cheb.center, k);
        rec.chebyshev_radius = cheb.radius;
        result.trace.push_back(rec);
        if (rec.gamma_estimate > best_gamma) {
            best_gamma = rec.gamma_estimate;
            best = result.trace.size() - 1;
        }

        if (cheb.radius <= radius_tol) {
            converged = true;
            break;
        }
        const double gnorm = inf_norm(rec.g);
        if (gnorm == 0.0 || (opts.cut_tol > 0.0 && gnorm <= opts.cut_tol)) {
            converged = true;
            break;
        }

        // Halfspace <g, lambda - center> >= 0, stored as -g.lambda <= -g.center.
        std::vector<double> normal(n);
        double offset = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            normal[i] = -rec.g[i];
            offset -= rec.g[i] * rec.center[i];
        }
        poly.add_halfspace(std::move(normal), offset);
    }

    const CutRecord& chosen = result.trace[best];
    EntropySolution& sol = result.solution;
    sol.lambda_star = WeightVector(chosen.center);
    sol.dual = chosen.dual;
    sol.delta = delta;
    sol.constraint_active = true;
    sol.converged = converged && chosen.inner_converged;
    sol.iterations = iterations;
    sol.chebyshev_radius = last_radius;

    // Final diagnostics at the returned iterate.
    kernels::weighted_nearest(table, sol.lambda_star.values(), phi, assign, ex);
    const auto mom = kernels::exp_phi_moments(phi, sol.dual.u, sol.dual.v, ratio, ex);
    sol.mass = mom.m0;
    sol.transport_cost = mom.m1;
    sol.cross_entropy_value = cross_entropy(ratio);
    return result;
}

} // namespace entroball
