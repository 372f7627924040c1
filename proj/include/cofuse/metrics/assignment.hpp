#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "cofuse/core/error.hpp"

namespace cofuse::metrics {

struct Assignment {
    /// row -> column, or -1 for rows left unassigned (only when rows exceed columns).
    std::vector<int> row_to_col;
    double cost = 0.0;
};

namespace detail {

/// Shortest augmenting path Hungarian method with potentials, rows <= cols.
inline std::vector<int> hungarian_wide(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    const int m = static_cast<int>(a.cols());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

} // namespace detail

/// Exact minimum-cost one-to-one assignment on a rectangular non-negative matrix. Every
/// row is assigned when rows <= cols, every column otherwise.
inline Assignment optimal_assignment(const Eigen::MatrixXd& cost) {
    if (!cost.allFinite() || (cost.size() > 0 && cost.minCoeff() < 0.0))
        throw PreconditionError("optimal_assignment: costs must be finite and non-negative");
    Assignment out;
    const auto rows = cost.rows();
    const auto cols = cost.cols();
    out.row_to_col.assign(static_cast<std::size_t>(rows), -1);
    if (rows == 0 || cols == 0) return out;
    if (rows <= cols) {
        out.row_to_col = detail::hungarian_wide(cost);
    } else {
        const auto col_to_row = detail::hungarian_wide(cost.transpose());
        for (int j = 0; j < static_cast<int>(cols); ++j) out.row_to_col[col_to_row[j]] = j;
    }
    for (Eigen::Index i = 0; i < rows; ++i)
        if (out.row_to_col[i] >= 0) out.cost += cost(i, out.row_to_col[i]);
    return out;
}

} // namespace cofuse::metrics
