#include "roadtrack/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roadtrack {

ScoreMatrix::ScoreMatrix(std::initializer_list<std::initializer_list<double>> init)
    : rows_(init.size()), cols_(init.size() ? init.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
        if (row.size() != cols_) throw std::invalid_argument("ScoreMatrix: ragged initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

namespace {

// Minimum-cost assignment of every row (n <= m) to a distinct column.
// Returns col_of_row.
std::vector<std::size_t> min_cost_rows(const std::vector<double>& cost, std::size_t n, std::size_t m) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
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
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> col_of_row(n, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
    }
    return col_of_row;
}

}  // namespace

Assignment hungarian(const ScoreMatrix& scores) {
    Assignment result;
    const std::size_t rows = scores.rows();
    const std::size_t cols = scores.cols();
    if (rows == 0 || cols == 0) return result;

    const bool transpose = rows > cols;
    const std::size_t n = transpose ? cols : rows;
    const std::size_t m = transpose ? rows : cols;

    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double s = scores(r, c);
            if (std::isnan(s) || s == std::numeric_limits<double>::infinity()) {
                throw std::invalid_argument("hungarian: scores must be finite or kForbidden");
            }
        }
    }

    // Leaving a row unmatched is worth 0, so forbidden and negative cells cost 0
    // and are dropped afterwards; the optimum is a maximum-weight partial matching.
    std::vector<double> cost(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double s = transpose ? scores(j, i) : scores(i, j);
            cost[i * m + j] = s > 0.0 ? -s : 0.0;
        }
    }

    const auto col_of_row = min_cost_rows(cost, n, m);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = transpose ? col_of_row[i] : i;
        const std::size_t c = transpose ? i : col_of_row[i];
        if (scores(r, c) == kForbidden || scores(r, c) < 0.0) continue;
        result.pairs.emplace_back(r, c);
        result.total += scores(r, c);
    }
    std::sort(result.pairs.begin(), result.pairs.end());
    return result;
}

}  // namespace roadtrack
