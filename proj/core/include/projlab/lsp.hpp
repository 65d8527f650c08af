#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "projlab/dataset.hpp"
#include "projlab/embedding.hpp"
#include "projlab/matrix.hpp"
#include "projlab/numerics.hpp"

namespace projlab::lsp {

struct Config {
    std::size_t control_points = 25;  // nc
    std::size_t neighbors = 10;       // k
    DistanceKind distance = DistanceKind::Euclidean;
    std::size_t out_dim = 2;
    std::uint64_t seed = 0;
};

/// Throws if the config violates 1 <= nc <= n or 1 <= k < n.
void validate(const Config& config, std::size_t n);

/// Per-point neighbor index lists V_i (i excluded, no duplicates).
struct NeighborhoodGraph {
    std::vector<std::vector<std::size_t>> neighbors;
};

/// Control points: their indices into the data set and their seeded
/// low-dimensional coordinates.
struct ControlPointSet {
    std::vector<std::size_t> indices;
    Matrix coords;  // nc x out_dim
};

/// The rectangular system of the projection: A is (n + nc) x n (Laplacian
/// rows on top, one unit control row per control point below), and rhs holds
/// one right-hand side per output coordinate (zeros for Laplacian rows, the
/// control point's seeded coordinate for control rows).
struct LaplacianSystem {
    SparseMatrix a;
    std::vector<std::vector<double>> rhs;
};

struct ControlSelection {
    std::vector<std::size_t> indices;  // the nc medoid indices
    MedoidAssignment clustering;       // full assignment, reused for neighborhoods
};

/// Picks control points as the medoids of a k-medoids split into nc
/// clusters.
ControlSelection select_control_points(const DistanceMatrix& d, std::size_t nc,
                                       std::uint64_t seed);

/// Seeds the control points in the output space with classical MDS on their
/// distance submatrix. Requires nc >= out_dim + 1.
Matrix project_control_points(const DistanceMatrix& control_dists, std::size_t out_dim);

/// Builds each point's k-nearest-neighbor list from a clustered candidate
/// set: the point's own cluster plus the nearest other cluster (by medoid
/// distance). Falls back to an exact global k-NN search for points whose
/// candidate set is smaller than k. Ties break toward the lowest index.
NeighborhoodGraph build_neighborhoods(const DistanceMatrix& d, const MedoidAssignment& clustering,
                                      std::size_t k);

/// Assembles the augmented system: Laplacian rows with unit diagonal and
/// -1/k_i on the neighbors (each row sums to zero), then unit control rows.
LaplacianSystem assemble_system(const NeighborhoodGraph& graph, const ControlPointSet& controls,
                                std::size_t n);

/// Full LSP run: distances, k-medoids control points, MDS seeding,
/// neighborhood graph, system assembly, one least-squares solve per output
/// coordinate. Deterministic given the seed.
Embedding run(const DataMatrix& x, const LabelVector& labels, const Config& config);

}  // namespace projlab::lsp
