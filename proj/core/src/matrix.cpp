#include "projlab/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace projlab {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw std::invalid_argument("Matrix: " + std::to_string(values_.size()) +
                                    " values do not fill " + std::to_string(rows_) + "x" +
                                    std::to_string(cols_));
    }
}

bool Matrix::all_finite() const noexcept {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require_finite(const Matrix& m, std::string_view what) {
    if (m.rows() == 0 || m.cols() == 0) {
        throw std::invalid_argument(std::string(what) + ": matrix is empty");
    }
    if (!m.all_finite()) {
        throw std::invalid_argument(std::string(what) + ": matrix contains NaN or Inf");
    }
}

}  // namespace projlab
