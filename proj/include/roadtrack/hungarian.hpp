#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace roadtrack {

/// Row-major dense matrix of scores.
class ScoreMatrix {
public:
    ScoreMatrix() = default;
    ScoreMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    ScoreMatrix(std::initializer_list<std::initializer_list<double>> init);

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Marks a pair that must never be matched.
inline constexpr double kForbidden = -std::numeric_limits<double>::infinity();

struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), sorted by row
    double total = 0.0;
};

/// Maximum-total-score one-to-one assignment (Kuhn-Munkres with potentials,
/// O(n^2 m)). Rectangular input is allowed; forbidden entries stay unmatched.
Assignment hungarian(const ScoreMatrix& scores);

}  // namespace roadtrack
