#pragma once

#include <cstddef>
#include <vector>

#include "projlab/matrix.hpp"

namespace projlab::pca {

/// Fitted principal-component model: the subtracted column means, the
/// component directions (one per row, orthonormal), and the explained
/// variances in descending order.
struct Model {
    std::vector<double> mean;  // length D
    Matrix components;         // out_dim x D
    std::vector<double> variances;

    std::size_t input_dim() const noexcept { return components.cols(); }
    std::size_t output_dim() const noexcept { return components.rows(); }
};

/// Fits the top out_dim principal components of x via the sample covariance
/// (divisor n - 1). Requires 1 <= out_dim <= min(n - 1, D). Fails on
/// zero-variance data and on components whose variance collapses below
/// 1e-12 of the leading one. Each component's largest-magnitude entry is
/// made positive so outputs are reproducible.
Model fit(const DataMatrix& x, std::size_t out_dim);

/// Projects rows of x onto the model: out(i, j) = components[j] . (x_i - mean).
DataMatrix transform(const DataMatrix& x, const Model& model);

}  // namespace projlab::pca
