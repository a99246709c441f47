#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "entroball/geometry.hpp"
#include "entroball/sampling.hpp"

namespace entroball {

/// Tolerance overrides; zero means "use the built-in default".
struct Tolerances {
    double grad_tol = 0.0;
    double dual_tol = 0.0;
    double radius_tol = 0.0;
    double cut_tol = 0.0;
    double membership_tol = 0.0;
    std::size_t max_transport_iterations = 10000;
    std::size_t max_cuts = 200;
};

struct PriorSpec {
    std::string kind = "uniform"; // uniform | truncated_gaussian
    std::vector<double> mean;     // truncated_gaussian only
    double sigma = 0.0;
};

struct RunConfig {
    std::vector<double> lo;
    std::vector<double> hi;
    std::string metric = "euclidean";
    PriorSpec prior;
    std::filesystem::path points_file;
    std::optional<double> delta;
    std::vector<double> delta_list; // strictly decreasing when present
    std::size_t batch_size = 50000; // M
    std::uint64_t seed = 0;
    std::size_t resolution = 256;
    Tolerances tolerances;
    std::filesystem::path output_dir = "out";

    BoxDomain domain() const { return BoxDomain(lo, hi); }
    Metric make_metric() const { return Metric(parse_metric(metric)); }
    PriorModel make_prior() const;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text);

/// CSV ingestion: one point per row, dim numeric columns, an optional
/// non-numeric header row. Errors carry the 1-based data row number.
EmpiricalMeasure load_points_csv(const std::filesystem::path& path, const BoxDomain& domain);

} // namespace entroball
