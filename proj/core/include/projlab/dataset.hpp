#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "projlab/matrix.hpp"

namespace projlab {

/// Integer class labels, one per data row. `ids` are dense codes assigned by
/// first appearance in the source file; `names` keeps the original strings
/// for report output (names[code]).
struct LabelVector {
    std::vector<int> ids;
    std::vector<std::string> names;

    std::size_t size() const noexcept { return ids.size(); }
    std::size_t num_classes() const noexcept { return names.size(); }
};

enum class DistanceKind { Euclidean, Cosine };

DistanceKind parse_distance_kind(std::string_view name);
std::string_view to_string(DistanceKind kind);

/// Symmetric pairwise distance matrix with zero diagonal. Stored dense; the
/// set(i, j) mutator keeps both triangles in sync.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

    /// Validates symmetry, zero diagonal and non-negativity before adopting
    /// the values. Used when a distance matrix comes from outside
    /// pairwise_distances (tests, custom metrics).
    static DistanceMatrix from_matrix(const Matrix& m);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double value) noexcept {
        values_[i * n_ + j] = value;
        values_[j * n_ + i] = value;
    }
    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * n_, n_};
    }

    /// Distance submatrix over the given point indices, in their order.
    DistanceMatrix restricted_to(std::span<const std::size_t> indices) const;

    bool all_zero() const noexcept;

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

struct Dataset {
    DataMatrix features;
    LabelVector labels;
};

/// Loads a UTF-8 CSV with a header row: one label column (by name), all other
/// columns real-valued features. Row order defines point indices 0..n-1.
/// Throws std::runtime_error naming the file/row/column on any malformed
/// input (missing file, missing label column, ragged rows, non-numeric cell).
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column);

struct CenterResult {
    DataMatrix centered;
    std::vector<double> mean;  // subtracted column means, length D
};

/// Subtracts the column means; output columns have mean 0 within floating
/// tolerance.
CenterResult center_columns(const DataMatrix& x);

/// Optional per-column standardization: (x - mean) / stddev. Errors on a
/// zero-variance column (names it).
DataMatrix standardize_columns(const DataMatrix& x);

/// Full pairwise distance matrix. Euclidean is the L2 norm of row
/// differences; Cosine is 1 - dot(a,b)/(|a||b|) and requires every row to
/// have nonzero norm (the offending row is named otherwise). Each pair is
/// computed exactly once, so the result is symmetric by construction.
DistanceMatrix pairwise_distances(const DataMatrix& x, DistanceKind kind);

}  // namespace projlab
