// Compares the serial reference kernels against the chunked implementations
// (sequential and OpenMP) on transport-sized inputs.
#include <benchmark/benchmark.h>

#include <vector>

#include "entroball/geometry.hpp"
#include "entroball/kernels.hpp"
#include "entroball/sampling.hpp"

using namespace entroball;
using kernels::Exec;

namespace {

struct Fixture {
    BoxDomain domain{{0.0, 0.0}, {1.0, 1.0}};
    Metric metric{MetricKind::Euclidean};
    PriorModel prior = make_uniform_prior(domain);
    SampleBatch batch;
    EmpiricalMeasure mu;
    kernels::DistanceTable table;
    std::vector<double> lambda;
    std::vector<double> phi;
    std::vector<std::uint32_t> assign;

    Fixture(std::size_t m, std::size_t n)
        : batch(draw_batch(prior, m, 1)),
          mu(make_uniform_prior(domain).sample(n, 99), 2, domain) {
        table = kernels::distance_table(batch.points, 2, mu, metric, Exec::Seq);
        lambda.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) lambda[i] = 0.01 * static_cast<double>(i % 7);
        double mean = 0.0;
        for (double x : lambda) mean += x;
        for (double& x : lambda) x -= mean / static_cast<double>(n);
        phi.resize(m);
        assign.resize(m);
        kernels::weighted_nearest(table, lambda, phi, assign, Exec::Seq);
    }
};

Fixture& fixture() {
    static Fixture f(200000, 16);
    return f;
}

void bench_distance_table(benchmark::State& state, Exec ex) {
    auto& f = fixture();
    for (auto _ : state) {
        auto table = kernels::distance_table(f.batch.points, 2, f.mu, f.metric, ex);
        benchmark::DoNotOptimize(table.d.data());
    }
}

void bench_nearest_reference(benchmark::State& state) {
    auto& f = fixture();
    std::vector<double> phi(f.batch.size);
    std::vector<std::uint32_t> assign(f.batch.size);
    for (auto _ : state) {
        kernels::reference::weighted_nearest(f.table, f.lambda, phi, assign);
        benchmark::DoNotOptimize(phi.data());
    }
}

void bench_nearest(benchmark::State& state, Exec ex) {
    auto& f = fixture();
    std::vector<double> phi(f.batch.size);
    std::vector<std::uint32_t> assign(f.batch.size);
    for (auto _ : state) {
        kernels::weighted_nearest(f.table, f.lambda, phi, assign, ex);
        benchmark::DoNotOptimize(phi.data());
    }
}

void bench_masses_reference(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state) {
        auto masses = kernels::reference::region_masses(f.assign, {}, f.mu.size());
        benchmark::DoNotOptimize(masses.data());
    }
}

void bench_masses(benchmark::State& state, Exec ex) {
    auto& f = fixture();
    for (auto _ : state) {
        auto masses = kernels::region_masses(f.assign, {}, f.mu.size(), ex);
        benchmark::DoNotOptimize(masses.data());
    }
}

void bench_moments_reference(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state) {
        auto mom = kernels::reference::exp_phi_moments(f.phi, -1.0, 3.0);
        benchmark::DoNotOptimize(mom.m0);
    }
}

void bench_moments(benchmark::State& state, Exec ex) {
    auto& f = fixture();
    for (auto _ : state) {
        auto mom = kernels::exp_phi_moments(f.phi, -1.0, 3.0, {}, ex);
        benchmark::DoNotOptimize(mom.m0);
    }
}

} // namespace

BENCHMARK_CAPTURE(bench_distance_table, seq, Exec::Seq);
BENCHMARK_CAPTURE(bench_distance_table, omp, Exec::Par);
BENCHMARK(bench_nearest_reference);
BENCHMARK_CAPTURE(bench_nearest, seq, Exec::Seq);
BENCHMARK_CAPTURE(bench_nearest, omp, Exec::Par);
BENCHMARK(bench_masses_reference);
BENCHMARK_CAPTURE(bench_masses, seq, Exec::Seq);
BENCHMARK_CAPTURE(bench_masses, omp, Exec::Par);
BENCHMARK(bench_moments_reference);
BENCHMARK_CAPTURE(bench_moments, seq, Exec::Seq);
BENCHMARK_CAPTURE(bench_moments, omp, Exec::Par);

BENCHMARK_MAIN();
