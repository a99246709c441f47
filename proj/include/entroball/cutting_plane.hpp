#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "entroball/entropy.hpp"
#include "entroball/geometry.hpp"
#include "entroball/sampling.hpp"
#include "entroball/transport.hpp"
#include "entroball/weights.hpp"

namespace entroball {

class InfeasiblePolytope : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Halfspace representation a_j . lambda <= b_j of a polytope localizing
/// lambda*. The equality sum(lambda) = 0 is handled structurally: the
/// Chebyshev LP optimizes over the first N-1 coordinates of Lambda with
/// lambda_N = -sum of the others.
struct CutPolytope {
    std::vector<std::vector<double>> normals; // rows in R^N
    std::vector<double> offsets;
    std::size_t n = 0;

    /// P0: the box ||lambda||_inf <= radius intersected with Lambda.
    static CutPolytope initial_box(std::size_t n, double radius);

    /// initial_box plus the pairwise bounds lambda_i - lambda_j <=
    /// d(x_i, x_j). Any weight vector violating one of these empties a
    /// region, so the transport weights of a strictly positive density
    /// (in particular the Gamma maximizer) satisfy them all.
    static CutPolytope initial_for(const EmpiricalMeasure& mu, const Metric& metric,
                                   double box_radius);

    void add_halfspace(std::vector<double> a, double b);
    void relax(double eps); // b_j += eps for every halfspace
};

struct ChebyshevCenter {
    WeightVector center;
    double radius = 0.0;
};

/// Largest ball inscribed in the polytope, in the (N-1)-coordinate
/// parametrization of Lambda: max r s.t. a~_j . y + r ||a~_j||_2 <= b_j.
/// Throws InfeasiblePolytope when the optimal radius is negative.
ChebyshevCenter chebyshev_center(const CutPolytope& poly);

struct CutRecord {
    std::size_t iteration = 0;
    std::vector<double> center;     // lambda at which the cut was generated
    std::vector<double> g;          // g_i = 1/N - mass_i(q_bar), the cut normal
    double chebyshev_radius = 0.0;
    double gamma_estimate = 0.0;
    DualPair dual{};
    bool inner_converged = false;
};

/// Inner dual solve at lam plus the separating halfspace
/// {lambda' : <g, lambda' - lam> >= 0} that contains lambda*.
CutRecord generate_cut(const WeightVector& lam, double delta, const SampleBatch& batch,
                       const EmpiricalMeasure& mu, const Metric& metric,
                       double dual_tol = 0.0, kernels::Exec ex = kernels::Exec::Par);

struct MinCrossOptions {
    double radius_tol = 0.0;    // 0 -> 1e-3 * diam(K)
    double cut_tol = 0.0;       // extra stop when ||g||_inf <= cut_tol; <= 0 disables
    std::size_t max_cuts = 200;
    double dual_tol = 0.0;      // 0 -> max(1e-8, 0.1/sqrt(M))
    kernels::Exec exec = kernels::Exec::Par;
    TransportOptions transport{}; // used by the inactive-case presolve
    const TransportSolution* prior_transport = nullptr; // reuse W(p, mu) if given
};

/// The triple (lambda*, u, v) defining q*(x) = p(x) exp(-1 - v phi(x) - u),
/// with batch diagnostics.
struct EntropySolution {
    WeightVector lambda_star;
    DualPair dual{};
    double delta = 0.0;
    double mass = 0.0;                // integral estimate of q*
    double transport_cost = 0.0;      // E_{q*}[phi_{lambda*}]
    double cross_entropy_value = 0.0; // H(q*, p)
    bool constraint_active = false;   // false: delta >= W(p, mu), q* = p
    bool converged = false;
    std::size_t iterations = 0;
    double chebyshev_radius = 0.0;
};

struct MinCrossResult {
    EntropySolution solution;
    std::vector<CutRecord> trace;
    TransportSolution prior_transport; // W(p, mu) presolve
};

/// Cutting-plane maximization of Gamma over Lambda: Chebyshev center,
/// inner 2-D dual, separating halfspace, polytope update. Returns the best
/// iterate by Gamma estimate.
MinCrossResult solve_min_cross_entropy(const EmpiricalMeasure& mu, const PriorModel& prior,
                                       const Metric& metric, double delta,
                                       const SampleBatch& batch,
                                       const MinCrossOptions& opts = {});

} // namespace entroball
