#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "projlab/dataset.hpp"
#include "projlab/embedding.hpp"
#include "projlab/matrix.hpp"

namespace projlab::tsne {

struct Config {
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    double learning_rate = 200.0;
    double momentum_initial = 0.5;
    double momentum_final = 0.8;
    std::size_t momentum_switch_iter = 250;
    double exaggeration_factor = 4.0;
    std::size_t exaggeration_iters = 100;
    std::size_t out_dim = 2;
    double init_scale = 1e-2;
    std::uint64_t seed = 0;
};

/// Throws if the config violates its invariants for an n-point input
/// (perplexity in (1, n), exaggeration_iters <= iterations, positive rates).
void validate(const Config& config, std::size_t n);

/// Gaussian conditional probabilities p_{j|i} for one point: given the row
/// of squared distances and the bandwidth sigma, returns the normalized row
/// (self entry zero, sums to 1). Computed with max-subtraction so large
/// distances cannot overflow. Throws when every neighbor is infinitely far.
std::vector<double> conditional_probabilities(std::span<const double> sq_dists, std::size_t self,
                                              double sigma);

/// Perplexity 2^H (H = Shannon entropy in bits) of one probability row.
double row_perplexity(std::span<const double> probs, std::size_t self);

/// Per-point bandwidths such that each conditional row's perplexity matches
/// the target: bracket-doubling from sigma = 1, then bisection (200 steps
/// max). Requires 1 < perplexity < n.
std::vector<double> calibrate_sigmas(const Matrix& sq_dists, double perplexity);

/// Adds 1e-12 to zero off-diagonal squared distances so duplicate points
/// keep the sigma search well-posed.
void apply_duplicate_floor(Matrix& sq_dists);

/// All conditional rows stacked into a matrix (row i = p_{.|i}).
Matrix conditional_matrix(const Matrix& sq_dists, std::span<const double> sigmas);

/// Symmetrized joint affinities p_ij = (p_{j|i} + p_{i|j}) / 2n.
Matrix joint_affinities(const Matrix& conditionals);

/// Student-t low-dimensional affinities q_ij = w_ij / sum_{k != l} w_kl with
/// w_ij = (1 + |y_i - y_j|^2)^-1, normalized over all distinct ordered
/// pairs.
Matrix low_dim_affinities(const Matrix& y);

/// KL divergence sum_{i != j} p log(p / q), natural log. Entries are floored
/// at 1e-12 inside the log; p_ij = 0 terms contribute 0.
double kl_cost(const Matrix& p, const Matrix& q);

/// KL gradient: dC/dy_i = 4 sum_j (p_ij - q_ij)(y_i - y_j)(1 + |y_i - y_j|^2)^-1.
Matrix gradient(const Matrix& p, const Matrix& q, const Matrix& y);

/// Throws unless m is a valid affinity matrix: symmetric, zero diagonal,
/// entries in [0, 1], total mass 1 +- 1e-9.
void check_affinity(const Matrix& m, std::string_view what);

/// Observer invoked after each gradient step with the iteration index and
/// the current (re-centered) coordinates.
using IterationCallback = std::function<void(std::size_t iter, const Matrix& y)>;

/// Full t-SNE run: optional PCA to pca_dims, sigma calibration, joint
/// affinities with early exaggeration, then momentum gradient descent from a
/// seeded Gaussian start. The embedding is re-centered after every step.
/// Deterministic for a fixed config and thread-count independent.
Embedding run(const DataMatrix& x, const LabelVector& labels, const Config& config,
              std::optional<std::size_t> pca_dims = std::nullopt,
              DistanceKind distance = DistanceKind::Euclidean,
              const IterationCallback& on_iteration = {});

}  // namespace projlab::tsne
