#include "entroball/commands.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>

#include <json.hpp>

#include "entroball/cutting_plane.hpp"
#include "entroball/entropy.hpp"
#include "entroball/raster.hpp"
#include "entroball/transport.hpp"
#include "entroball/voronoi.hpp"

namespace entroball {

namespace {

using nlohmann::json;

std::string format_delta(double delta) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", delta);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << text;
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

json transport_json(const TransportSolution& sol, const RunConfig& cfg) {
    return json{{"lambda", sol.lambda_star.raw()},
                {"wasserstein", sol.wasserstein},
                {"iterations", sol.iterations},
                {"grad_norm", sol.grad_norm},
                {"converged", sol.converged},
                {"seed", cfg.seed},
                {"M", cfg.batch_size},
                {"N", sol.lambda_star.size()},
                {"masses", sol.masses.masses}};
}

void write_region_rasters(const RunConfig& cfg, const BoxDomain& domain, const Metric& metric,
                          const EmpiricalMeasure& mu, const WeightVector& lam,
                          const std::string& stem) {
    const auto grid = rasterize_regions(lam, mu, metric, domain, cfg.resolution);
    const auto gray = raster::index_grid_to_gray(grid, mu.size(), 255);
    raster::write_pgm(cfg.output_dir / (stem + ".pgm"), gray, cfg.resolution, cfg.resolution,
                      255, "region indices scaled to gray, N=" + std::to_string(mu.size()));
    raster::write_png_gray(cfg.output_dir / (stem + ".png"), gray, cfg.resolution,
                           cfg.resolution, 8);
    raster::write_index_csv(cfg.output_dir / (stem + ".csv"), grid, cfg.resolution,
                            cfg.resolution);
}

void write_heatmap(const RunConfig& cfg, const PriorModel& prior, const RatioFn& ratio,
                   const std::string& stem) {
    const auto q = density_grid(prior, ratio, cfg.resolution);
    double peak = 0.0;
    const auto gray = raster::density_grid_to_gray(q, peak);
    char comment[64];
    std::snprintf(comment, sizeof(comment), "linear in density, peak=%.17g", peak);
    raster::write_pgm(cfg.output_dir / (stem + ".pgm"), gray, cfg.resolution, cfg.resolution,
                      65535, comment);
    raster::write_png_gray(cfg.output_dir / (stem + ".png"), gray, cfg.resolution,
                           cfg.resolution, 16);

    std::string csv;
    csv.reserve(q.size() * 20);
    char buf[40];
    for (std::size_t r = 0; r < cfg.resolution; ++r) {
        for (std::size_t c = 0; c < cfg.resolution; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", q[r * cfg.resolution + c]);
            csv += buf;
            csv += (c + 1 == cfg.resolution) ? '\n' : ',';
        }
    }
    write_text(cfg.output_dir / (stem + ".csv"), csv);
}

MinCrossOptions mincross_options(const RunConfig& cfg) {
    MinCrossOptions opts;
    opts.radius_tol = cfg.tolerances.radius_tol;
    opts.cut_tol = cfg.tolerances.cut_tol;
    opts.max_cuts = cfg.tolerances.max_cuts;
    opts.dual_tol = cfg.tolerances.dual_tol;
    opts.transport.stop.grad_tol = cfg.tolerances.grad_tol;
    opts.transport.stop.max_iterations = cfg.tolerances.max_transport_iterations;
    return opts;
}

json mincross_json(const EntropySolution& sol, const TransportSolution& prior_transport,
                   const RunConfig& cfg) {
    return json{{"lambda", sol.lambda_star.raw()},
                {"u", sol.dual.u},
                {"v", sol.dual.v},
                {"delta", sol.delta},
                {"seed", cfg.seed},
                {"M", cfg.batch_size},
                {"diagnostics",
                 {{"mass", sol.mass},
                  {"transport_cost", sol.transport_cost},
                  {"cross_entropy", sol.cross_entropy_value}}},
                {"converged", sol.converged},
                {"constraint_active", sol.constraint_active},
                {"iterations", sol.iterations},
                {"chebyshev_radius", sol.chebyshev_radius},
                {"prior_wasserstein", prior_transport.wasserstein},
                {"metric", cfg.metric},
                {"prior", cfg.prior.kind}};
}

std::string trace_jsonl(const std::vector<CutRecord>& trace) {
    std::string out;
    for (const auto& rec : trace) {
        json line{{"k", rec.iteration},  {"lambda", rec.center},
                  {"radius", rec.chebyshev_radius}, {"gamma", rec.gamma_estimate},
                  {"g", rec.g},          {"u", rec.dual.u},
                  {"v", rec.dual.v}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

struct MincrossRow {
    MinCrossResult result;
    double wasserstein_check = 0.0;
};

/// One full mincross solve plus the independent transport re-solve of the
/// returned density (the fixed-point check reported in sweep CSVs).
MincrossRow run_mincross(const RunConfig& cfg, const BoxDomain& domain, const Metric& metric,
                         const EmpiricalMeasure& mu, const PriorModel& prior,
                         const SampleBatch& batch, double delta,
                         const TransportSolution* prior_transport, kernels::Exec ex) {
    MincrossRow row;
    MinCrossOptions opts = mincross_options(cfg);
    opts.exec = ex;
    opts.transport.exec = ex;
    opts.prior_transport = prior_transport;
    row.result = solve_min_cross_entropy(mu, prior, metric, delta, batch, opts);

    const EntropySolution& sol = row.result.solution;
    if (!sol.constraint_active) {
        row.wasserstein_check = row.result.prior_transport.wasserstein;
        return row;
    }
    const RatioFn ratio(sol.lambda_star, sol.dual, mu, metric);
    const auto ratio_values = ratio.batch_values(batch, ex);
    TransportOptions topts;
    topts.exec = ex;
    topts.schedule.kind = StepSchedule::Kind::Polyak;
    topts.stop.grad_tol = cfg.tolerances.grad_tol;
    topts.stop.max_iterations = cfg.tolerances.max_transport_iterations;
    const TransportSolution check =
        maximize_psi(batch, ratio_values, mu, metric, domain, topts);
    row.wasserstein_check = check.wasserstein;
    return row;
}

void write_mincross_outputs(const RunConfig& cfg, const PriorModel& prior,
                            const EmpiricalMeasure& mu, const Metric& metric,
                            const MincrossRow& row, const std::string& suffix) {
    json j = mincross_json(row.result.solution, row.result.prior_transport, cfg);
    j["wasserstein_check"] = row.wasserstein_check;
    write_text(cfg.output_dir / ("mincross" + suffix + ".json"), j.dump(2) + "\n");
    write_text(cfg.output_dir / ("cuts" + suffix + ".jsonl"), trace_jsonl(row.result.trace));
    if (prior.domain().dim() == 2) {
        const EntropySolution& sol = row.result.solution;
        const RatioFn ratio(sol.lambda_star, sol.dual, mu, metric);
        write_heatmap(cfg, prior, ratio, "heatmap" + suffix);
    }
}

} // namespace

int cmd_transport(const RunConfig& cfg) {
    const BoxDomain domain = cfg.domain();
    const Metric metric = cfg.make_metric();
    const PriorModel prior = cfg.make_prior();
    const EmpiricalMeasure mu = load_points_csv(cfg.points_file, domain);
    const SampleBatch batch = draw_batch(prior, cfg.batch_size, cfg.seed);

    std::filesystem::create_directories(cfg.output_dir);

    TransportOptions opts;
    opts.stop.grad_tol = cfg.tolerances.grad_tol;
    opts.stop.max_iterations = cfg.tolerances.max_transport_iterations;
    const TransportSolution sol = maximize_psi(batch, {}, mu, metric, domain, opts);

    write_text(cfg.output_dir / "transport.json", transport_json(sol, cfg).dump(2) + "\n");
    if (domain.dim() == 2) {
        write_region_rasters(cfg, domain, metric, mu, sol.lambda_star, "voronoi_weighted");
        write_region_rasters(cfg, domain, metric, mu, WeightVector::zeros(mu.size()),
                             "voronoi_unweighted");
    }
    return sol.converged ? 0 : 2;
}

int cmd_mincross(const RunConfig& cfg) {
    if (!cfg.delta) throw std::invalid_argument("mincross: config needs a delta");
    const BoxDomain domain = cfg.domain();
    const Metric metric = cfg.make_metric();
    const PriorModel prior = cfg.make_prior();
    const EmpiricalMeasure mu = load_points_csv(cfg.points_file, domain);
    const SampleBatch batch = draw_batch(prior, cfg.batch_size, cfg.seed);

    std::filesystem::create_directories(cfg.output_dir);

    const MincrossRow row = run_mincross(cfg, domain, metric, mu, prior, batch, *cfg.delta,
                                         nullptr, kernels::Exec::Par);
    write_mincross_outputs(cfg, prior, mu, metric, row, "");
    return row.result.solution.converged ? 0 : 2;
}

int cmd_sweep(const RunConfig& cfg, bool parallel_rows) {
    if (cfg.delta_list.empty()) throw std::invalid_argument("sweep: config needs a delta_list");
    const BoxDomain domain = cfg.domain();
    const Metric metric = cfg.make_metric();
    const PriorModel prior = cfg.make_prior();
    const EmpiricalMeasure mu = load_points_csv(cfg.points_file, domain);
    const SampleBatch batch = draw_batch(prior, cfg.batch_size, cfg.seed);

    std::filesystem::create_directories(cfg.output_dir);

    // Shared presolve: W(p, mu) on the common batch, identical for all rows.
    TransportOptions topts;
    topts.stop.grad_tol = cfg.tolerances.grad_tol;
    topts.stop.max_iterations = cfg.tolerances.max_transport_iterations;
    const TransportSolution prior_transport = maximize_psi(batch, {}, mu, metric, domain, topts);

    std::vector<MincrossRow> rows(cfg.delta_list.size());
    auto run_row = [&](std::size_t i, kernels::Exec ex) {
        rows[i] = run_mincross(cfg, domain, metric, mu, prior, batch, cfg.delta_list[i],
                               &prior_transport, ex);
    };
    if (parallel_rows) {
        std::vector<std::future<void>> futures;
        futures.reserve(cfg.delta_list.size());
        for (std::size_t i = 0; i < cfg.delta_list.size(); ++i) {
            futures.push_back(std::async(std::launch::async, run_row, i, kernels::Exec::Seq));
        }
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < cfg.delta_list.size(); ++i) run_row(i, kernels::Exec::Par);
    }

    std::string csv = "delta,cross_entropy,wasserstein_check,v,u,iterations,converged\n";
    char buf[256];
    bool all_converged = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const EntropySolution& sol = rows[i].result.solution;
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%d\n",
                      cfg.delta_list[i], sol.cross_entropy_value, rows[i].wasserstein_check,
                      sol.dual.v, sol.dual.u, sol.iterations, sol.converged ? 1 : 0);
        csv += buf;
        all_converged = all_converged && sol.converged;
        write_mincross_outputs(cfg, prior, mu, metric, rows[i],
                               "_delta_" + format_delta(cfg.delta_list[i]));
    }
    write_text(cfg.output_dir / "sweep.csv", csv);
    return all_converged ? 0 : 2;
}

} // namespace entroball
