#include <doctest.h>

#include <cmath>

#include "entroball/kernels.hpp"
#include "entroball/sampling.hpp"
#include "entroball/voronoi.hpp"
#include "oracles.hpp"

using namespace entroball;
using kernels::Exec;

namespace {

BoxDomain segment() { return BoxDomain({0.0}, {1.0}); }
BoxDomain unit_square() { return BoxDomain({0.0, 0.0}, {1.0, 1.0}); }
const Metric euclid{MetricKind::Euclidean};

EmpiricalMeasure atoms1d(std::vector<double> xs) {
    return EmpiricalMeasure(std::move(xs), 1, segment());
}

} // namespace

TEST_CASE("phi_lambda closed forms in 1-D") {
    const auto mu = atoms1d({0.0, 1.0});
    const std::vector<double> x{0.5};

    CHECK(phi_lambda(x, WeightVector::zeros(2), mu, euclid) == doctest::Approx(0.5));
    CHECK(phi_lambda(x, WeightVector({0.2, -0.2}), mu, euclid) == doctest::Approx(0.3));

    const auto single = atoms1d({0.25});
    CHECK(phi_lambda(std::vector<double>{0.9}, WeightVector::zeros(1), single, euclid) ==
          doctest::Approx(0.65));

    CHECK_THROWS_AS(phi_lambda(x, WeightVector::zeros(3), mu, euclid), std::invalid_argument);
}

TEST_CASE("assign_region picks the weighted-nearest atom, lowest index on ties") {
    const auto mu = atoms1d({0.0, 1.0});
    CHECK(assign_region(std::vector<double>{0.25}, WeightVector::zeros(2), mu, euclid) == 0);
    CHECK(assign_region(std::vector<double>{0.6}, WeightVector({0.5, -0.5}), mu, euclid) == 0);
    // Exact tie at the midpoint.
    CHECK(assign_region(std::vector<double>{0.5}, WeightVector::zeros(2), mu, euclid) == 0);
}

TEST_CASE("phi is concave in lambda along random segments") {
    const auto mu = atoms1d({0.1, 0.55, 0.9});
    oracles::TestRng rng(3);
    for (int t = 0; t < 500; ++t) {
        const std::vector<double> x{rng.uniform()};
        const WeightVector a({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
        const WeightVector b({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
        std::vector<double> mid(3);
        for (int i = 0; i < 3; ++i) mid[i] = 0.5 * (a[i] + b[i]);
        const double lhs = phi_lambda(x, WeightVector(mid), mu, euclid);
        const double rhs =
            0.5 * (phi_lambda(x, a, mu, euclid) + phi_lambda(x, b, mu, euclid));
        CHECK(lhs >= rhs - 1e-12);
    }
}

TEST_CASE("raising an atom's weight keeps its points when the margin allows") {
    const auto mu = atoms1d({0.1, 0.55, 0.9});
    oracles::TestRng rng(17);
    for (int t = 0; t < 500; ++t) {
        const std::vector<double> x{rng.uniform()};
        std::vector<double> lam{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                                rng.uniform(-0.3, 0.3)};
        const WeightVector w(lam);
        const std::size_t i = assign_region(x, w, mu, euclid);

        double margin = 1e300;
        for (std::size_t j = 0; j < 3; ++j) {
            if (j == i) continue;
            margin = std::min(margin, (euclid(x, mu.point(j)) - w[j]) -
                                          (euclid(x, mu.point(i)) - w[i]));
        }
        if (margin <= 1e-9) continue;
        std::vector<double> bumped(w.values().begin(), w.values().end());
        bumped[i] += 0.9 * margin;
        CHECK(assign_region(x, WeightVector(bumped), mu, euclid) == i);
    }
}

TEST_CASE("region masses: symmetric atoms split a uniform batch evenly") {
    const PriorModel prior = make_uniform_prior(segment());
    const SampleBatch batch = draw_batch(prior, 20000, 2);
    const auto mu = atoms1d({0.25, 0.75});

    const auto report = region_masses(batch, [](std::span<const double>) { return 1.0; },
                                      WeightVector::zeros(2), mu, euclid);
    const double band = 3.0 / std::sqrt(static_cast<double>(batch.size));
    CHECK(std::abs(report.masses[0] - 0.5) <= band);
    CHECK(std::abs(report.masses[1] - 0.5) <= band);
    CHECK(report.total == doctest::Approx(1.0));
}

TEST_CASE("region masses: single atom carries everything exactly") {
    const PriorModel prior = make_uniform_prior(segment());
    const SampleBatch batch = draw_batch(prior, 4096 * 3 + 17, 4);
    const auto report = region_masses(batch, [](std::span<const double>) { return 1.0; },
                                      WeightVector::zeros(1), atoms1d({0.5}), euclid);
    CHECK(report.masses.size() == 1);
    CHECK(report.masses[0] == 1.0);
    CHECK(report.total == 1.0);
}

TEST_CASE("region masses: weighted 1-D bisector at x=0.6") {
    // d(x,0.25) - 0.1 = d(x,0.75) + 0.1 crosses at x = 0.6. (A weight gap
    // of 0.6 would exceed the atom distance 0.5 and empty region 2
    // entirely; this keeps the bisector interior.)
    const PriorModel prior = make_uniform_prior(segment());
    const SampleBatch batch = draw_batch(prior, 50000, 6);
    const auto report = region_masses(batch, [](std::span<const double>) { return 1.0; },
                                      WeightVector({0.1, -0.1}), atoms1d({0.25, 0.75}), euclid);
    const double band = 3.0 / std::sqrt(static_cast<double>(batch.size));
    CHECK(std::abs(report.masses[0] - 0.6) <= band);
    CHECK(std::abs(report.masses[1] - 0.4) <= band);
}

TEST_CASE("region masses: weight gap beyond the atom distance empties a region") {
    const PriorModel prior = make_uniform_prior(segment());
    const SampleBatch batch = draw_batch(prior, 20000, 6);
    const auto report = region_masses(batch, [](std::span<const double>) { return 1.0; },
                                      WeightVector({0.3, -0.3}), atoms1d({0.25, 0.75}), euclid);
    CHECK(report.masses[0] == 1.0);
    CHECK(report.masses[1] == 0.0);
}

TEST_CASE("region masses match closed-form interval integrals in 1-D") {
    const PriorModel prior = make_uniform_prior(segment());
    const SampleBatch batch = draw_batch(prior, 50000, 8);
    const std::vector<double> atoms{0.2, 0.5, 0.9};
    const auto mu = atoms1d({0.2, 0.5, 0.9});
    const WeightVector lam({0.05, -0.02, -0.03});

    // Uniform density: masses are interval lengths between consecutive
    // weighted bisectors b_i = (x_i + x_{i+1} + lam_i - lam_{i+1}) / 2.
    const double b01 = 0.5 * (atoms[0] + atoms[1] + lam[0] - lam[1]);
    const double b12 = 0.5 * (atoms[1] + atoms[2] + lam[1] - lam[2]);
    const std::vector<double> expected{b01, b12 - b01, 1.0 - b12};

    const auto report = region_masses(batch, [](std::span<const double>) { return 1.0; },
                                      lam, mu, euclid);
    const double band = 5.0 / std::sqrt(static_cast<double>(batch.size));
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(report.masses[i] - expected[i]) <= band);
    }
}

TEST_CASE("covering: every batch point lands in exactly one region") {
    const PriorModel prior = make_uniform_prior(unit_square());
    const SampleBatch batch = draw_batch(prior, 10000, 9);
    const auto atoms = prior.sample(5, 77);
    const EmpiricalMeasure mu(atoms, 2, unit_square());
    const auto table = kernels::distance_table(batch.points, 2, mu, euclid, Exec::Par);
    std::vector<double> phi(batch.size);
    std::vector<std::uint32_t> assign(batch.size);
    kernels::weighted_nearest(table, WeightVector::zeros(5).values(), phi, assign, Exec::Par);

    const auto masses = kernels::region_masses(assign, {}, 5, Exec::Par);
    double total = 0.0;
    for (double m : masses) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14)); // counts/M up to rounding
    for (auto a : assign) CHECK(a < 5);
}

TEST_CASE("rasterize: single atom fills the grid") {
    const EmpiricalMeasure mu({0.4, 0.6}, 2, unit_square());
    const auto grid = rasterize_regions(WeightVector::zeros(1), mu, euclid, unit_square(), 16);
    for (auto v : grid) CHECK(v == 0);
}

TEST_CASE("rasterize: unweighted two-atom grid is split by the perpendicular bisector") {
    const EmpiricalMeasure mu({0.25, 0.25, 0.75, 0.75}, 2, unit_square());
    const std::size_t res = 64;
    const auto grid = rasterize_regions(WeightVector::zeros(2), mu, euclid, unit_square(), res);
    std::vector<double> x(2);
    for (std::size_t r = 0; r < res; ++r) {
        for (std::size_t c = 0; c < res; ++c) {
            grid_cell_center(unit_square(), res, r, c, x);
            if (std::abs(x[0] + x[1] - 1.0) < 1e-9) continue; // tie cells
            const std::uint32_t expected = (x[0] + x[1] < 1.0) ? 0 : 1;
            CHECK(grid[r * res + c] == expected);
        }
    }
}

TEST_CASE("rasterize: region-1 area grows strictly with its weight") {
    const EmpiricalMeasure mu({0.3, 0.3, 0.7, 0.7}, 2, unit_square());
    const std::size_t res = 128;
    std::size_t prev = 0;
    for (const double t : {0.0, 0.05, 0.1, 0.15}) {
        const auto grid = rasterize_regions(WeightVector({t, -t}), mu, euclid,
                                            unit_square(), res);
        std::size_t count = 0;
        for (auto v : grid) count += (v == 0);
        if (t > 0.0) CHECK(count > prev);
        prev = count;
    }
}

TEST_CASE("rasterize rejects bad inputs") {
    const EmpiricalMeasure mu1d({0.5}, 1, segment());
    CHECK_THROWS_AS(rasterize_regions(WeightVector::zeros(1), mu1d, euclid, segment(), 16),
                    std::invalid_argument);
    const EmpiricalMeasure mu({0.5, 0.5}, 2, unit_square());
    CHECK_THROWS_AS(rasterize_regions(WeightVector::zeros(1), mu, euclid, unit_square(), 1),
                    std::invalid_argument);
}

TEST_CASE("kernels: chunked Seq and Par agree bitwise; reference agrees closely") {
    const PriorModel prior = make_uniform_prior(unit_square());
    const SampleBatch batch = draw_batch(prior, 30000, 13);
    const EmpiricalMeasure mu(prior.sample(7, 5), 2, unit_square());
    std::vector<double> lam_raw{0.05, -0.02, 0.01, 0.03, -0.04, -0.01, -0.02};
    const WeightVector lam(lam_raw);

    const auto table_seq = kernels::distance_table(batch.points, 2, mu, euclid, Exec::Seq);
    const auto table_par = kernels::distance_table(batch.points, 2, mu, euclid, Exec::Par);
    CHECK(table_seq.d == table_par.d);

    std::vector<double> phi_seq(batch.size), phi_par(batch.size);
    std::vector<std::uint32_t> as_seq(batch.size), as_par(batch.size);
    kernels::weighted_nearest(table_seq, lam.values(), phi_seq, as_seq, Exec::Seq);
    kernels::weighted_nearest(table_par, lam.values(), phi_par, as_par, Exec::Par);
    CHECK(phi_seq == phi_par);
    CHECK(as_seq == as_par);

    std::vector<double> phi_ref(batch.size);
    std::vector<std::uint32_t> as_ref(batch.size);
    kernels::reference::weighted_nearest(table_seq, lam.values(), phi_ref, as_ref);
    CHECK(phi_ref == phi_seq);
    CHECK(as_ref == as_seq);

    std::vector<double> ratio(batch.size);
    for (std::size_t m = 0; m < batch.size; ++m) {
        ratio[m] = std::exp(-phi_seq[m]); // any positive weighting
    }
    const auto masses_seq = kernels::region_masses(as_seq, ratio, 7, Exec::Seq);
    const auto masses_par = kernels::region_masses(as_par, ratio, 7, Exec::Par);
    CHECK(masses_seq == masses_par);
    const auto masses_ref = kernels::reference::region_masses(as_seq, ratio, 7);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(masses_ref[i] == doctest::Approx(masses_seq[i]).epsilon(1e-12));
    }

    const auto mom_seq = kernels::exp_phi_moments(phi_seq, -1.1, 2.5, {}, Exec::Seq);
    const auto mom_par = kernels::exp_phi_moments(phi_par, -1.1, 2.5, {}, Exec::Par);
    CHECK(mom_seq.m0 == mom_par.m0);
    CHECK(mom_seq.m1 == mom_par.m1);
    CHECK(mom_seq.m2 == mom_par.m2);
    const auto mom_ref = kernels::reference::exp_phi_moments(phi_seq, -1.1, 2.5);
    CHECK(mom_ref.m0 == doctest::Approx(mom_seq.m0).epsilon(1e-12));
    CHECK(mom_ref.m1 == doctest::Approx(mom_seq.m1).epsilon(1e-12));
    CHECK(mom_ref.m2 == doctest::Approx(mom_seq.m2).epsilon(1e-12));

    CHECK(kernels::mean_product(phi_seq, ratio, Exec::Seq) ==
          kernels::mean_product(phi_par, ratio, Exec::Par));
}

TEST_CASE("weight vector projects onto Lambda") {
    const WeightVector w({1.0, 2.0, 3.0});
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) sum += w[i];
    CHECK(std::abs(sum) <= 1e-12);
    CHECK(w[1] == doctest::Approx(0.0));
}
