#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "projlab/dataset.hpp"
#include "projlab/matrix.hpp"

namespace projlab {

/// Sparse matrix in compressed-row form, built once from triplets and then
/// immutable. Duplicate (row, col) pairs, out-of-range indices and non-finite
/// values are rejected at construction.
class SparseMatrix {
public:
    struct Triplet {
        std::size_t row;
        std::size_t col;
        double value;
    };

    SparseMatrix() = default;
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> entries);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    /// out = A x  (out.size() == rows())
    void multiply(std::span<const double> x, std::span<double> out) const;
    /// out = A^T y  (out.size() == cols())
    void multiply_transpose(std::span<const double> y, std::span<double> out) const;

    std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
    std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_offsets_;  // length rows_ + 1
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

/// Top-k eigenpairs of a symmetric matrix, eigenvalues descending,
/// eigenvectors stored as orthonormal columns.
struct EigenResult {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;  // size x k, column j pairs with eigenvalues[j]
};

/// Cyclic Jacobi eigensolver. Requires max|M - M^T| <= 1e-9; throws if the
/// off-diagonal mass has not vanished after 200 sweeps (reports the
/// residual). Deterministic: fixed rotation order, no randomness.
EigenResult symmetric_eigen(const Matrix& m, std::size_t k);

struct MdsResult {
    Matrix coords;  // n x out_dim, centered at the origin
    bool degenerate = false;
};

/// Classical (Torgerson) MDS: double-center -1/2 D^2, take the top-d
/// eigenpairs, scale eigenvectors by sqrt(lambda). Nonpositive eigenvalues
/// clamp to zero-width axes. An all-zero distance matrix yields all-zero
/// coordinates with the degenerate flag set.
MdsResult classical_mds(const DistanceMatrix& d, std::size_t out_dim);

struct MedoidAssignment {
    std::vector<std::size_t> medoids;     // point index of each cluster's medoid
    std::vector<std::size_t> assignment;  // cluster id per point
    double cost = 0.0;                    // sum of point-to-medoid distances
};

/// Alternating (Voronoi-iteration) k-medoids: seeded random distinct initial
/// medoids drawn with squared-distance weighting, then alternate
/// nearest-medoid assignment with in-cluster medoid updates until stable or
/// 100 rounds. Ties (equal distances, equal costs) break toward the lowest
/// index. Deterministic given the seed; the total cost never increases
/// across rounds (checked).
MedoidAssignment k_medoids(const DistanceMatrix& d, std::size_t k, std::uint64_t seed);

/// Solves min |Ax - b|^2 via conjugate gradient on the normal equations
/// A^T A x = A^T b, to relative residual 1e-10 (cap 10*n iterations).
/// Requires full column rank; CG breakdown or residual stagnation is
/// reported as rank deficiency together with the achieved residual.
std::vector<double> sparse_least_squares(const SparseMatrix& a, std::span<const double> b);

}  // namespace projlab
