#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace projlab {

/// Dense row-major matrix of doubles. Rows are points, columns are features
/// or coordinates. Deliberately minimal: the numeric kernels own the math.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * cols_, cols_};
    }

    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    bool all_finite() const noexcept;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Feature matrix loaded from user data (n points, D features). Loaders
/// guarantee every value is finite.
using DataMatrix = Matrix;

/// Throws std::invalid_argument naming `what` if the matrix contains NaN/Inf
/// or is empty.
void require_finite(const Matrix& m, std::string_view what);

}  // namespace projlab
