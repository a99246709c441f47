#include "entroball/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace entroball {

using nlohmann::json;

PriorModel RunConfig::make_prior() const {
    const BoxDomain box = domain();
    if (prior.kind == "uniform") return make_uniform_prior(box);
    if (prior.kind == "truncated_gaussian") {
        return make_truncated_gaussian_prior(box, prior.mean, prior.sigma);
    }
    throw std::invalid_argument("unknown prior kind: " + prior.kind);
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }

    RunConfig cfg;
    if (!j.contains("domain") || !j["domain"].contains("lo") || !j["domain"].contains("hi")) {
        throw std::invalid_argument("config: domain.lo and domain.hi are required");
    }
    cfg.lo = j["domain"]["lo"].get<std::vector<double>>();
    cfg.hi = j["domain"]["hi"].get<std::vector<double>>();
    cfg.metric = j.value("metric", std::string("euclidean"));
    parse_metric(cfg.metric); // validate now

    if (j.contains("prior")) {
        const auto& p = j["prior"];
        cfg.prior.kind = p.value("kind", std::string("uniform"));
        if (p.contains("mean")) cfg.prior.mean = p["mean"].get<std::vector<double>>();
        cfg.prior.sigma = p.value("sigma", 0.0);
    }
    if (j.contains("points_file")) {
        cfg.points_file = j["points_file"].get<std::string>();
    } else {
        throw std::invalid_argument("config: points_file is required");
    }
    if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
    if (j.contains("delta_list")) {
        cfg.delta_list = j["delta_list"].get<std::vector<double>>();
        for (std::size_t i = 0; i + 1 < cfg.delta_list.size(); ++i) {
            if (!(cfg.delta_list[i] > cfg.delta_list[i + 1])) {
                throw std::invalid_argument("config: delta_list must be strictly decreasing");
            }
        }
        for (double d : cfg.delta_list) {
            if (!(d > 0.0)) throw std::invalid_argument("config: deltas must be positive");
        }
    }
    if (cfg.delta && !(*cfg.delta > 0.0)) {
        throw std::invalid_argument("config: delta must be positive");
    }
    cfg.batch_size = j.value("M", static_cast<std::size_t>(50000));
    if (cfg.batch_size < 100) throw std::invalid_argument("config: M must be at least 100");
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(0));
    cfg.resolution = j.value("resolution", static_cast<std::size_t>(256));
    if (cfg.resolution < 2) throw std::invalid_argument("config: resolution must be >= 2");
    cfg.output_dir = j.value("output_dir", std::string("out"));

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        cfg.tolerances.grad_tol = t.value("grad_tol", 0.0);
        cfg.tolerances.dual_tol = t.value("dual_tol", 0.0);
        cfg.tolerances.radius_tol = t.value("radius_tol", 0.0);
        cfg.tolerances.cut_tol = t.value("cut_tol", 0.0);
        cfg.tolerances.membership_tol = t.value("membership_tol", 0.0);
        cfg.tolerances.max_transport_iterations =
            t.value("max_transport_iterations", static_cast<std::size_t>(10000));
        cfg.tolerances.max_cuts = t.value("max_cuts", static_cast<std::size_t>(200));
        for (double x : {cfg.tolerances.grad_tol, cfg.tolerances.dual_tol,
                         cfg.tolerances.radius_tol, cfg.tolerances.cut_tol,
                         cfg.tolerances.membership_tol}) {
            if (x < 0.0) throw std::invalid_argument("config: tolerances must be positive");
        }
    }

    BoxDomain box = cfg.domain(); // validates lo < hi
    if (cfg.prior.kind == "truncated_gaussian") {
        if (cfg.prior.mean.size() != box.dim()) {
            throw std::invalid_argument("config: prior.mean must match the domain dimension");
        }
        if (!(cfg.prior.sigma > 0.0)) {
            throw std::invalid_argument("config: prior.sigma must be positive");
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

EmpiricalMeasure load_points_csv(const std::filesystem::path& path, const BoxDomain& domain) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("points: cannot open " + path.string());

    const std::size_t dim = domain.dim();
    std::vector<double> points;
    std::string line;
    std::size_t data_row = 0;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // Skip blank lines.
        if (line.find_first_not_of(" \t,") == std::string::npos) continue;

        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) {
                    ++used;
                }
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue; // header row
            }
            throw std::invalid_argument("points: non-numeric cell at data row " +
                                        std::to_string(data_row + 1));
        }
        first = false;
        ++data_row;
        if (row.size() != dim) {
            throw std::invalid_argument("points: row " + std::to_string(data_row) + " has " +
                                        std::to_string(row.size()) + " columns, expected " +
                                        std::to_string(dim));
        }
        if (!domain.contains(row)) {
            throw std::invalid_argument("points: row " + std::to_string(data_row) +
                                        " lies outside the domain");
        }
        points.insert(points.end(), row.begin(), row.end());
    }
    if (points.empty()) throw std::invalid_argument("points: no data rows in " + path.string());
    return EmpiricalMeasure(std::move(points), dim, domain);
}

} // namespace entroball
