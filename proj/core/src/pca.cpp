#include "projlab/pca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "projlab/dataset.hpp"
#include "projlab/numerics.hpp"

namespace projlab::pca {

Model fit(const DataMatrix& x, std::size_t out_dim) {
    require_finite(x, "pca::fit input");
    const std::size_t n = x.rows();
    const std::size_t dim = x.cols();
    if (n < 2) throw std::invalid_argument("pca::fit: need at least 2 rows");
    const std::size_t max_dim = std::min(n - 1, dim);
    if (out_dim == 0 || out_dim > max_dim) {
        throw std::invalid_argument("pca::fit: out_dim " + std::to_string(out_dim) +
                                    " outside [1, " + std::to_string(max_dim) + "]");
    }

    auto [centered, mean] = center_columns(x);

    Matrix cov(dim, dim);
    const double divisor = static_cast<double>(n - 1);
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = a; b < dim; ++b) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += centered(i, a) * centered(i, b);
            const double value = sum / divisor;
            cov(a, b) = value;
            cov(b, a) = value;
        }
    }

    double total_variance = 0.0;
    for (std::size_t a = 0; a < dim; ++a) total_variance += cov(a, a);
    if (total_variance == 0.0) {
        throw std::invalid_argument("pca::fit: data has zero variance (all rows identical)");
    }

    const EigenResult eig = symmetric_eigen(cov, out_dim);

    Model model;
    model.mean = std::move(mean);
    model.components = Matrix(out_dim, dim);
    model.variances.resize(out_dim);
    for (std::size_t j = 0; j < out_dim; ++j) {
        const double variance = eig.eigenvalues[j];
        if (variance <= 1e-12 * eig.eigenvalues[0]) {
            throw std::invalid_argument("pca::fit: component " + std::to_string(j + 1) +
                                        " has vanishing variance; reduce out_dim");
        }
        model.variances[j] = variance;
        for (std::size_t a = 0; a < dim; ++a) model.components(j, a) = eig.eigenvectors(a, j);
    }

    // Sign convention: flip each component so its largest-magnitude entry is
    // positive.
    for (std::size_t j = 0; j < out_dim; ++j) {
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
            const double mag = std::abs(model.components(j, a));
            if (mag > best) {
                best = mag;
                arg = a;
            }
        }
        if (model.components(j, arg) < 0.0) {
            for (std::size_t a = 0; a < dim; ++a) model.components(j, a) = -model.components(j, a);
        }
    }
    return model;
}

DataMatrix transform(const DataMatrix& x, const Model& model) {
    require_finite(x, "pca::transform input");
    if (x.cols() != model.input_dim()) {
        throw std::invalid_argument("pca::transform: input has " + std::to_string(x.cols()) +
                                    " columns, model expects " +
                                    std::to_string(model.input_dim()));
    }
    const std::size_t n = x.rows();
    const std::size_t out_dim = model.output_dim();
    DataMatrix out(n, out_dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < out_dim; ++j) {
            double dot = 0.0;
            for (std::size_t a = 0; a < model.input_dim(); ++a) {
                dot += model.components(j, a) * (x(i, a) - model.mean[a]);
            }
            out(i, j) = dot;
        }
    }
    return out;
}

}  // namespace projlab::pca
