#include <doctest.h>

#include <cmath>

#include "entroball/entropy.hpp"
#include "entroball/transport.hpp"
#include "oracles.hpp"

using namespace entroball;
using kernels::Exec;

namespace {

const Metric euclid{MetricKind::Euclidean};

struct Setup1D {
    BoxDomain domain{{0.0}, {1.0}};
    PriorModel prior = make_uniform_prior(domain);
    SampleBatch batch;
    EmpiricalMeasure mu;
    Setup1D(std::size_t m, std::uint64_t seed, std::vector<double> atoms)
        : batch(draw_batch(prior, m, seed)), mu(std::move(atoms), 1, domain) {}
};

std::vector<double> phi_of(const Setup1D& s, const WeightVector& lam) {
    const auto table = kernels::distance_table(s.batch.points, 1, s.mu, euclid, Exec::Par);
    std::vector<double> phi(s.batch.size);
    std::vector<std::uint32_t> assign(s.batch.size);
    kernels::weighted_nearest(table, lam.values(), phi, assign, Exec::Par);
    return phi;
}

} // namespace

TEST_CASE("dual objective at (-1, 0) vanishes exactly") {
    Setup1D s(10000, 3, {0.5});
    const double val =
        dual_objective(DualPair{-1.0, 0.0}, WeightVector::zeros(1), 0.2, s.batch, s.mu, euclid);
    CHECK(val == 0.0);
}

TEST_CASE("dual objective is coercive in u and below the solver optimum") {
    Setup1D s(10000, 5, {0.5});
    const WeightVector lam = WeightVector::zeros(1);
    const double at_init =
        dual_objective(DualPair{-1.0, 0.0}, lam, 0.1, s.batch, s.mu, euclid);
    const double far = dual_objective(DualPair{40.0, 0.0}, lam, 0.1, s.batch, s.mu, euclid);
    CHECK(far < at_init);

    const auto [sol, ratio] = solve_dual(lam, 0.1, s.batch, s.mu, euclid);
    REQUIRE(sol.converged);
    oracles::TestRng rng(9);
    for (int t = 0; t < 30; ++t) {
        const DualPair probe{rng.uniform(-3.0, 1.0), rng.uniform(0.0, 30.0)};
        CHECK(dual_objective(probe, lam, 0.1, s.batch, s.mu, euclid) <= sol.value + 1e-12);
    }
}

TEST_CASE("dual gradient at (-1, 0) is (0, psi - delta)") {
    Setup1D s(20000, 7, {0.25, 0.75});
    const WeightVector lam = WeightVector::zeros(2);
    const double delta = 0.08;
    const auto d = dual_gradient_hessian(DualPair{-1.0, 0.0}, lam, delta, s.batch, s.mu, euclid);
    CHECK(d.gradient[0] == 0.0);
    const double psi_hat = psi(lam, s.batch, {}, s.mu, euclid);
    CHECK(d.gradient[1] == doctest::Approx(psi_hat - delta).epsilon(1e-12));
}

TEST_CASE("dual gradient matches finite differences; hessian is negative definite") {
    Setup1D s(20000, 11, {0.2, 0.6, 0.9});
    const WeightVector lam({0.03, -0.01, -0.02});
    const double delta = 0.07;

    oracles::TestRng rng(13);
    for (int t = 0; t < 20; ++t) {
        const DualPair p{rng.uniform(-2.0, 0.5), rng.uniform(0.0, 15.0)};
        const auto d = dual_gradient_hessian(p, lam, delta, s.batch, s.mu, euclid);

        const double h = 1e-5;
        auto f = [&](double u, double v) {
            return dual_objective(DualPair{u, v}, lam, delta, s.batch, s.mu, euclid);
        };
        const double fd_u = (f(p.u + h, p.v) - f(p.u - h, p.v)) / (2.0 * h);
        const double fd_v = (f(p.u, p.v + h) - f(p.u, p.v - h)) / (2.0 * h);
        CHECK(fd_u == doctest::Approx(d.gradient[0]).epsilon(1e-6));
        CHECK(fd_v == doctest::Approx(d.gradient[1]).epsilon(1e-6));

        // Eigenvalues of the symmetric 2x2 Hessian.
        const double a = d.hessian[0], b = d.hessian[1], c = d.hessian[3];
        const double tr = a + c;
        const double disc = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
        CHECK(0.5 * (tr + disc) <= -1e-8);
        CHECK(0.5 * (tr - disc) <= -1e-8);
    }
}

TEST_CASE("solve_dual: slack constraint returns the prior fixed point") {
    Setup1D s(10000, 17, {0.5});
    const WeightVector lam = WeightVector::zeros(1);
    // max phi over the batch is at most 0.5.
    const auto [sol, ratio] = solve_dual(lam, 0.6, s.batch, s.mu, euclid);
    CHECK(sol.converged);
    CHECK(sol.pair.u == -1.0);
    CHECK(sol.pair.v == 0.0);
    CHECK(sol.iterations == 0);
    CHECK(ratio(std::vector<double>{0.37}) == 1.0);
    CHECK(sol.value == 0.0);
}

TEST_CASE("solve_dual: single atom, active constraint, matches the quadrature oracle") {
    Setup1D s(50000, 19, {0.5});
    const WeightVector lam = WeightVector::zeros(1);
    const double delta = 0.1;
    const auto [sol, ratio] = solve_dual(lam, delta, s.batch, s.mu, euclid);
    REQUIRE(sol.converged);
    CHECK(sol.pair.v > 0.0);
    CHECK(sol.moments.m0 == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(sol.moments.m1 == doctest::Approx(delta).epsilon(1e-2));

    const auto oracle = oracles::solve_dual_1d_uniform(0.5, delta);
    CHECK(sol.pair.v == doctest::Approx(oracle.v).epsilon(0.06));
    CHECK(std::abs(sol.pair.u - oracle.u) <= 0.05);
}

TEST_CASE("solve_dual: warm and cold starts agree") {
    Setup1D s(20000, 23, {0.3, 0.8});
    const auto phi = phi_of(s, WeightVector({0.02, -0.02}));

    const double tol = default_dual_tol(s.batch.size);
    const auto cold = solve_dual_core(phi, 0.05, tol, 200, DualPair{-1.0, 0.0});
    const auto warm = solve_dual_core(phi, 0.05, tol, 200, DualPair{-0.4, 7.0});
    REQUIRE(cold.converged);
    REQUIRE(warm.converged);
    CHECK(std::abs(cold.pair.u - warm.pair.u) <= 10.0 * tol);
    CHECK(std::abs(cold.pair.v - warm.pair.v) <= 10.0 * tol);
}

TEST_CASE("gamma value: slack case is zero, always nonnegative, no duality gap") {
    Setup1D s(20000, 29, {0.4, 0.7});

    const auto slack = gamma_value(WeightVector::zeros(2), 1.0, s.batch, s.mu, euclid);
    CHECK(slack.first == 0.0);
    CHECK(slack.second.v == 0.0);

    oracles::TestRng rng(31);
    for (int t = 0; t < 10; ++t) {
        const WeightVector lam({rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
        const double delta = rng.uniform(0.02, 0.3);
        const auto [value, pair] = gamma_value(lam, delta, s.batch, s.mu, euclid);
        CHECK(value >= -1e-10);

        // Primal estimate of H(q_bar, p) from the ratio values.
        const RatioFn ratio(lam, pair, s.mu, euclid);
        const double primal = cross_entropy(ratio, s.batch);
        CHECK(std::abs(value - primal) <= 3.0 / std::sqrt(static_cast<double>(s.batch.size)));
    }
}

TEST_CASE("cross entropy closed forms") {
    CHECK(cross_entropy(std::vector<double>{1.0, 1.0, 1.0, 1.0}) == 0.0);

    // Two-valued density: ratio 2 on half the mass, 0 on the other half.
    std::vector<double> two(1000);
    for (std::size_t i = 0; i < two.size(); ++i) two[i] = (i % 2 == 0) ? 2.0 : 0.0;
    CHECK(cross_entropy(two) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    // x log x >= -1/e bounds the estimate from below.
    std::vector<double> dips(100, 0.3);
    CHECK(cross_entropy(dips) >= -1.0 / std::numbers::e);
}

TEST_CASE("strict concavity of the dual objective along segments") {
    Setup1D s(5000, 37, {0.5});
    const WeightVector lam = WeightVector::zeros(1);
    oracles::TestRng rng(41);
    for (int t = 0; t < 25; ++t) {
        const DualPair a{rng.uniform(-2.0, 0.0), rng.uniform(0.0, 10.0)};
        const DualPair b{rng.uniform(-2.0, 0.0), rng.uniform(0.0, 10.0)};
        if (std::abs(a.u - b.u) + std::abs(a.v - b.v) < 1e-3) continue;
        const DualPair mid{0.5 * (a.u + b.u), 0.5 * (a.v + b.v)};
        const double fa = dual_objective(a, lam, 0.1, s.batch, s.mu, euclid);
        const double fb = dual_objective(b, lam, 0.1, s.batch, s.mu, euclid);
        const double fm = dual_objective(mid, lam, 0.1, s.batch, s.mu, euclid);
        CHECK(fm > 0.5 * (fa + fb));
    }
}

TEST_CASE("log-space evaluation stays finite at extreme arguments") {
    const std::vector<double> phi{-3.0, -1.0, 0.0, 1.5, 3.0};
    for (const double u : {-100.0, 0.0, 100.0}) {
        for (const double v : {0.0, 10.0, 1000.0}) {
            const auto mom = kernels::exp_phi_moments(phi, u, v, {}, Exec::Seq);
            CHECK(std::isfinite(mom.m0));
            CHECK(std::isfinite(mom.m1));
            CHECK(std::isfinite(mom.m2));
            CHECK(mom.m0 >= 0.0);
        }
    }
}

TEST_CASE("density grid reproduces p for the unit ratio") {
    const BoxDomain box({0.0, 0.0}, {1.0, 1.0});
    const PriorModel prior = make_uniform_prior(box);
    const EmpiricalMeasure mu({0.5, 0.5}, 2, box);
    const RatioFn unit(WeightVector::zeros(1), DualPair{-1.0, 0.0}, mu, euclid);
    const auto grid = density_grid(prior, unit, 32);
    for (double q : grid) CHECK(q == 1.0);
}
