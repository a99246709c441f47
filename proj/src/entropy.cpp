#include "entroball/entropy.hpp"

#include <cmath>
#include <stdexcept>

namespace entroball {

namespace {

std::vector<double> phi_values(const WeightVector& lam, const SampleBatch& batch,
                               const EmpiricalMeasure& mu, const Metric& metric,
                               kernels::Exec ex) {
    const auto table = kernels::distance_table(batch.points, batch.dim, mu, metric, ex);
    std::vector<double> phi(batch.size);
    std::vector<std::uint32_t> assign(batch.size);
    kernels::weighted_nearest(table, lam.values(), phi, assign, ex);
    return phi;
}

} // namespace

RatioFn::RatioFn(WeightVector lam, DualPair dual, EmpiricalMeasure mu, Metric metric)
    : lam_(std::move(lam)), dual_(dual), mu_(std::move(mu)), metric_(metric) {
    if (dual_.v < 0.0) throw std::invalid_argument("RatioFn: v must be nonnegative");
}

double RatioFn::from_phi(double phi) const {
    return std::exp(kernels::clamp_exponent(-1.0 - dual_.v * phi - dual_.u));
}

double RatioFn::operator()(std::span<const double> x) const {
    return from_phi(phi_lambda(x, lam_, mu_, metric_));
}

std::vector<double> RatioFn::values(std::span<const double> phi, kernels::Exec ex) const {
    std::vector<double> r(phi.size());
    kernels::exp_phi_moments(phi, dual_.u, dual_.v, r, ex);
    return r;
}

std::vector<double> RatioFn::batch_values(const SampleBatch& batch, kernels::Exec ex) const {
    return values(phi_values(lam_, batch, mu_, metric_, ex), ex);
}

double dual_objective(const DualPair& pair, const WeightVector& lam, double delta,
                      const SampleBatch& batch, const EmpiricalMeasure& mu,
                      const Metric& metric, kernels::Exec ex) {
    const auto phi = phi_values(lam, batch, mu, metric, ex);
    const auto mom = kernels::exp_phi_moments(phi, pair.u, pair.v, {}, ex);
    return -pair.u - pair.v * delta - mom.m0;
}

namespace {

DualDerivatives derivatives_from_moments(const kernels::ExpMoments& mom, double delta) {
    DualDerivatives d;
    d.moments = mom;
    d.gradient = {-1.0 + mom.m0, -delta + mom.m1};
    d.hessian = {-mom.m0, -mom.m1, -mom.m1, -mom.m2};
    return d;
}

} // namespace

DualDerivatives dual_gradient_hessian(const DualPair& pair, const WeightVector& lam,
                                      double delta, const SampleBatch& batch,
                                      const EmpiricalMeasure& mu, const Metric& metric,
                                      kernels::Exec ex) {
    const auto phi = phi_values(lam, batch, mu, metric, ex);
    return derivatives_from_moments(kernels::exp_phi_moments(phi, pair.u, pair.v, {}, ex),
                                    delta);
}

DualSolution solve_dual_core(std::span<const double> phi, double delta, double tol,
                             std::size_t max_iterations, DualPair init,
                             kernels::Exec ex) {
    if (phi.empty()) throw std::invalid_argument("solve_dual: empty batch");
    if (!(delta > 0.0)) throw std::invalid_argument("solve_dual: delta must be positive");
    if (tol <= 0.0) tol = default_dual_tol(phi.size());

    DualPair pair = init;
    if (pair.v < 0.0) pair.v = 0.0;

    auto objective = [&](const DualPair& p) {
        const auto mom = kernels::exp_phi_moments(phi, p.u, p.v, {}, ex);
        return -p.u - p.v * delta - mom.m0;
    };

    DualSolution sol;
    kernels::ExpMoments mom = kernels::exp_phi_moments(phi, pair.u, pair.v, {}, ex);
    double value = -pair.u - pair.v * delta - mom.m0;

    for (std::size_t it = 1; it <= max_iterations; ++it) {
        const double gu = -1.0 + mom.m0;
        const double gv = -delta + mom.m1;
        const bool active = pair.v <= 0.0;
        const bool stationary =
            active ? (std::abs(gu) <= tol && gv <= tol)
                   : (std::abs(gu) <= tol && std::abs(gv) <= tol);
        if (stationary) {
            sol.converged = true;
            sol.iterations = it - 1;
            break;
        }

        // Newton direction: [[m0, m1], [m1, m2]] * d = grad. When v sits on
        // the boundary with gv <= 0, optimize u alone.
        double du, dv;
        const double det = mom.m0 * mom.m2 - mom.m1 * mom.m1;
        if (active && gv <= 0.0) {
            du = gu / mom.m0;
            dv = 0.0;
        } else if (det > 1e-14 * std::max(1.0, mom.m0 * mom.m2)) {
            du = (mom.m2 * gu - mom.m1 * gv) / det;
            dv = (mom.m0 * gv - mom.m1 * gu) / det;
        } else {
            // Degenerate curvature (phi nearly constant where the mass
            // sits); fall back to a gradient step.
            du = gu;
            dv = gv;
        }

        // Backtracking line search along the projected path.
        const double slope = gu * du + gv * dv;
        double t = 1.0;
        DualPair cand = pair;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            cand.u = pair.u + t * du;
            cand.v = std::max(0.0, pair.v + t * dv);
            const double cand_value = objective(cand);
            if (cand_value >= value + 1e-4 * t * slope || cand_value > value) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            sol.iterations = it;
            break; // numerically stuck; report non-converged
        }
        pair = cand;
        mom = kernels::exp_phi_moments(phi, pair.u, pair.v, {}, ex);
        value = -pair.u - pair.v * delta - mom.m0;
        sol.iterations = it;
    }

    sol.pair = pair;
    sol.moments = mom;
    sol.value = value;
    if (!sol.converged) {
        const double gu = -1.0 + mom.m0;
        const double gv = -delta + mom.m1;
        sol.converged = pair.v <= 0.0 ? (std::abs(gu) <= tol && gv <= tol)
                                      : (std::abs(gu) <= tol && std::abs(gv) <= tol);
    }
    return sol;
}

std::pair<DualSolution, RatioFn> solve_dual(const WeightVector& lam, double delta,
                                            const SampleBatch& batch,
                                            const EmpiricalMeasure& mu, const Metric& metric,
                                            double tol, kernels::Exec ex) {
    const auto phi = phi_values(lam, batch, mu, metric, ex);
    DualSolution sol = solve_dual_core(phi, delta, tol, 200, DualPair{}, ex);
    return {sol, RatioFn(lam, sol.pair, mu, metric)};
}

std::pair<double, DualPair> gamma_value(const WeightVector& lam, double delta,
                                        const SampleBatch& batch, const EmpiricalMeasure& mu,
                                        const Metric& metric, kernels::Exec ex) {
    const auto [sol, ratio] = solve_dual(lam, delta, batch, mu, metric, 0.0, ex);
    return {sol.value, sol.pair};
}

double cross_entropy(std::span<const double> ratio_values) {
    if (ratio_values.empty()) throw std::invalid_argument("cross_entropy: empty batch");
    double acc = 0.0;
    for (double r : ratio_values) {
        if (r > 0.0) acc += r * std::log(r);
    }
    return acc / static_cast<double>(ratio_values.size());
}

double cross_entropy(const RatioFn& ratio, const SampleBatch& batch, kernels::Exec ex) {
    return cross_entropy(ratio.batch_values(batch, ex));
}

std::vector<double> density_grid(const PriorModel& prior, const RatioFn& ratio,
                                 std::size_t resolution, kernels::Exec ex) {
    const BoxDomain& domain = prior.domain();
    if (domain.dim() != 2) throw std::invalid_argument("density_grid: 2-D domains only");
    if (resolution < 2) throw std::invalid_argument("density_grid: resolution must be >= 2");

    std::vector<double> centers(resolution * resolution * 2);
    for (std::size_t r = 0; r < resolution; ++r) {
        for (std::size_t c = 0; c < resolution; ++c) {
            grid_cell_center(domain, resolution, r, c,
                             {centers.data() + (r * resolution + c) * 2, 2});
        }
    }
    SampleBatch grid;
    grid.dim = 2;
    grid.size = resolution * resolution;
    grid.points = std::move(centers);

    std::vector<double> q = ratio.batch_values(grid, ex);
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] *= prior.density(grid.point(i));
    }
    return q;
}

} // namespace entroball
