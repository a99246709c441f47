#include "entroball/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace entroball::lp {

namespace {

constexpr double kEps = 1e-9;

// Dense tableau over columns [x+ | x- | slack | artificial | rhs] with one
// objective row per phase. Basic columns are kept as identity by pivoting.
struct Tableau {
    std::size_t rows = 0;
    std::size_t cols = 0; // without rhs
    std::vector<double> t; // rows x (cols + 1)
    std::vector<std::size_t> basis;
    std::vector<double> obj; // cols + 1, reduced costs of the current phase

    double& at(std::size_t i, std::size_t j) { return t[i * (cols + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return t[i * (cols + 1) + j]; }
    double& rhs(std::size_t i) { return t[i * (cols + 1) + cols]; }

    void pivot(std::size_t r, std::size_t s) {
        const double inv = 1.0 / at(r, s);
        for (std::size_t j = 0; j <= cols; ++j) at(r, j) *= inv;
        at(r, s) = 1.0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            const double f = at(i, s);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) at(i, j) -= f * at(r, j);
            at(i, s) = 0.0;
        }
        const double f = obj[s];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= cols; ++j) obj[j] -= f * at(r, j);
            obj[s] = 0.0;
        }
        basis[r] = s;
    }

    // Bland's rule: entering = lowest-index column with negative reduced
    // cost, leaving = lowest basis index among minimal ratios. Returns
    // false on unboundedness.
    bool iterate(std::size_t restrict_cols) {
        for (;;) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j < restrict_cols; ++j) {
                if (obj[j] < -kEps) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols) return true; // optimal
            std::size_t leave = rows;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows; ++i) {
                if (at(i, enter) > kEps) {
                    const double ratio = rhs(i) / at(i, enter);
                    if (ratio < best_ratio - kEps ||
                        (ratio < best_ratio + kEps &&
                         (leave == rows || basis[i] < basis[leave]))) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == rows) return false; // unbounded direction
            pivot(leave, enter);
        }
    }
};

} // namespace

Result solve(std::span<const double> c, const std::vector<std::vector<double>>& A,
             std::span<const double> b) {
    const std::size_t n = c.size();
    const std::size_t m = A.size();
    if (b.size() != m) throw std::invalid_argument("lp::solve: A/b row mismatch");
    for (const auto& row : A) {
        if (row.size() != n) throw std::invalid_argument("lp::solve: A/c column mismatch");
    }

    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < 0.0) ++n_art;
    }

    Tableau tab;
    tab.rows = m;
    tab.cols = 2 * n + m + n_art;
    tab.t.assign(m * (tab.cols + 1), 0.0);
    tab.basis.assign(m, 0);
    const std::size_t slack0 = 2 * n;
    const std::size_t art0 = 2 * n + m;

    std::size_t art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            tab.at(i, j) = sign * A[i][j];
            tab.at(i, n + j) = -sign * A[i][j];
        }
        tab.at(i, slack0 + i) = sign;
        tab.rhs(i) = sign * b[i];
        if (sign < 0.0) {
            tab.at(i, art0 + art) = 1.0;
            tab.basis[i] = art0 + art;
            ++art;
        } else {
            tab.basis[i] = slack0 + i;
        }
    }

    Result result;

    if (n_art > 0) {
        // Phase 1: minimize the sum of artificials.
        tab.obj.assign(tab.cols + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis[i] >= art0) {
                for (std::size_t j = 0; j <= tab.cols; ++j) tab.obj[j] -= tab.at(i, j);
            }
        }
        for (std::size_t a = 0; a < n_art; ++a) tab.obj[art0 + a] = 0.0;
        // Artificials may leave but never re-enter.
        if (!tab.iterate(art0)) {
            throw std::runtime_error("lp::solve: phase 1 unbounded (internal error)");
        }
        if (tab.obj[tab.cols] < -1e-7) {
            result.status = Status::Infeasible;
            return result;
        }
        // Drive any remaining artificial out of the basis.
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis[i] < art0) continue;
            std::size_t s = art0;
            for (std::size_t j = 0; j < art0; ++j) {
                if (std::abs(tab.at(i, j)) > kEps) {
                    s = j;
                    break;
                }
            }
            if (s < art0) tab.pivot(i, s);
            // A fully zero row is redundant; its artificial stays basic at
            // value zero and never re-enters because phase 2 ignores
            // artificial columns.
        }
    }

    // Phase 2: maximize c.x as minimize -c.(x+ - x-).
    tab.obj.assign(tab.cols + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        tab.obj[j] = -c[j];
        tab.obj[n + j] = c[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t bj = tab.basis[i];
        const double cost = tab.obj[bj];
        if (cost != 0.0) {
            for (std::size_t j = 0; j <= tab.cols; ++j) tab.obj[j] -= cost * tab.at(i, j);
            tab.obj[bj] = 0.0;
        }
    }
    if (!tab.iterate(art0)) {
        result.status = Status::Unbounded;
        return result;
    }

    result.status = Status::Optimal;
    result.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t bj = tab.basis[i];
        if (bj < n) {
            result.x[bj] += tab.rhs(i);
        } else if (bj < 2 * n) {
            result.x[bj - n] -= tab.rhs(i);
        }
    }
    result.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) result.value += c[j] * result.x[j];
    return result;
}

} // namespace entroball::lp
