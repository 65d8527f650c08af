#include "projlab/lsp.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include "projlab/parallel.hpp"

namespace projlab::lsp {

void validate(const Config& config, std::size_t n) {
    if (config.control_points == 0 || config.control_points > n) {
        throw std::invalid_argument("lsp: control_points must lie in [1, n]");
    }
    if (config.neighbors == 0 || config.neighbors >= n) {
        throw std::invalid_argument("lsp: neighbors must lie in [1, n-1]");
    }
    if (config.out_dim == 0) throw std::invalid_argument("lsp: out_dim must be >= 1");
}

ControlSelection select_control_points(const DistanceMatrix& d, std::size_t nc,
                                       std::uint64_t seed) {
    MedoidAssignment clustering = k_medoids(d, nc, seed);
    ControlSelection selection;
    selection.indices = clustering.medoids;
    selection.clustering = std::move(clustering);
    return selection;
}

Matrix project_control_points(const DistanceMatrix& control_dists, std::size_t out_dim) {
    const MdsResult mds = classical_mds(control_dists, out_dim);
    return mds.coords;
}

NeighborhoodGraph build_neighborhoods(const DistanceMatrix& d, const MedoidAssignment& clustering,
                                      std::size_t k) {
    const std::size_t n = d.size();
    if (k == 0 || k >= n) {
        throw std::invalid_argument("build_neighborhoods: k must lie in [1, n-1]");
    }
    if (clustering.assignment.size() != n) {
        throw std::invalid_argument("build_neighborhoods: clustering does not cover all points");
    }
    const std::size_t num_clusters = clustering.medoids.size();

    std::vector<std::vector<std::size_t>> members(num_clusters);
    for (std::size_t i = 0; i < n; ++i) members[clustering.assignment[i]].push_back(i);

    // Nearest other cluster per cluster, by medoid-to-medoid distance.
    std::vector<std::size_t> nearest_cluster(num_clusters, 0);
    for (std::size_t c = 0; c < num_clusters; ++c) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = c;
        for (std::size_t other = 0; other < num_clusters; ++other) {
            if (other == c) continue;
            const double dist = d(clustering.medoids[c], clustering.medoids[other]);
            if (dist < best) {
                best = dist;
                arg = other;
            }
        }
        nearest_cluster[c] = arg;
    }

    NeighborhoodGraph graph;
    graph.neighbors.resize(n);
    parallel_for(0, n, [&](std::size_t i) {
        const std::size_t own = clustering.assignment[i];
        std::vector<std::size_t> candidates;
        candidates.reserve(members[own].size() + members[nearest_cluster[own]].size());
        for (std::size_t j : members[own]) {
            if (j != i) candidates.push_back(j);
        }
        if (nearest_cluster[own] != own) {
            for (std::size_t j : members[nearest_cluster[own]]) candidates.push_back(j);
        }

        // The clustered candidate search is a speedup heuristic; it must not
        // produce undersized neighborhoods, so fall back to the exact global
        // search when too few candidates exist.
        if (candidates.size() < k) {
            candidates.clear();
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) candidates.push_back(j);
            }
        }

        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                          candidates.end(), [&](std::size_t a, std::size_t b) {
                              return d(i, a) != d(i, b) ? d(i, a) < d(i, b) : a < b;
                          });
        candidates.resize(k);
        graph.neighbors[i] = std::move(candidates);
    });
    return graph;
}

LaplacianSystem assemble_system(const NeighborhoodGraph& graph, const ControlPointSet& controls,
                                std::size_t n) {
    if (graph.neighbors.size() != n) {
        throw std::invalid_argument("assemble_system: graph does not cover all points");
    }
    const std::size_t nc = controls.indices.size();
    const std::size_t out_dim = controls.coords.cols();
    if (controls.coords.rows() != nc) {
        throw std::invalid_argument("assemble_system: control coords do not match indices");
    }

    std::vector<SparseMatrix::Triplet> triplets;
    std::size_t nnz = n + nc;
    for (const auto& neighbors : graph.neighbors) nnz += neighbors.size();
    triplets.reserve(nnz);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& neighbors = graph.neighbors[i];
        if (neighbors.empty()) {
            throw std::invalid_argument("assemble_system: point " + std::to_string(i) +
                                        " has no neighbors");
        }
        triplets.push_back({i, i, 1.0});
        const double alpha = 1.0 / static_cast<double>(neighbors.size());
        for (std::size_t j : neighbors) {
            if (j == i) {
                throw std::invalid_argument("assemble_system: point " + std::to_string(i) +
                                            " lists itself as neighbor");
            }
            triplets.push_back({i, j, -alpha});
        }
    }
    for (std::size_t t = 0; t < nc; ++t) {
        if (controls.indices[t] >= n) {
            throw std::invalid_argument("assemble_system: control index out of range");
        }
        triplets.push_back({n + t, controls.indices[t], 1.0});
    }

    LaplacianSystem system;
    system.a = SparseMatrix::from_triplets(n + nc, n, std::move(triplets));
    system.rhs.resize(out_dim);
    for (std::size_t dim = 0; dim < out_dim; ++dim) {
        std::vector<double> b(n + nc, 0.0);
        for (std::size_t t = 0; t < nc; ++t) b[n + t] = controls.coords(t, dim);
        system.rhs[dim] = std::move(b);
    }
    return system;
}

namespace {

// The augmented system loses column rank exactly when a connected component
// of the neighborhood graph holds no control point (its coordinates are only
// constrained up to a common shift). Detect that structurally instead of
// waiting for the iterative solver to wander.
void require_controls_in_every_component(const NeighborhoodGraph& graph,
                                         const std::vector<std::size_t>& control_indices,
                                         std::size_t n) {
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    const auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : graph.neighbors[i]) parent[find(i)] = find(j);
    }

    std::vector<bool> anchored(n, false);
    for (std::size_t c : control_indices) anchored[find(c)] = true;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (!anchored[root]) {
            std::size_t size = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (find(j) == root) ++size;
            }
            throw std::runtime_error(
                "lsp: rank-deficient system, neighborhood component containing point " +
                std::to_string(i) + " (" + std::to_string(size) +
                " points) has no control point");
        }
    }
}

}  // namespace

Embedding run(const DataMatrix& x, const LabelVector& labels, const Config& config) {
    require_finite(x, "lsp::run input");
    const std::size_t n = x.rows();
    validate(config, n);
    if (labels.size() != n) {
        throw std::invalid_argument("lsp::run: labels do not match input rows");
    }

    const DistanceMatrix dist = pairwise_distances(x, config.distance);
    const ControlSelection selection =
        select_control_points(dist, config.control_points, config.seed);
    const DistanceMatrix control_dists = dist.restricted_to(selection.indices);

    ControlPointSet controls;
    controls.indices = selection.indices;
    controls.coords = project_control_points(control_dists, config.out_dim);

    const NeighborhoodGraph graph = build_neighborhoods(dist, selection.clustering,
                                                        config.neighbors);
    require_controls_in_every_component(graph, controls.indices, n);
    const LaplacianSystem system = assemble_system(graph, controls, n);

    Matrix coords(n, config.out_dim);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    // The per-coordinate solves are independent.
    parallel_for(0, config.out_dim, [&](std::size_t dim) {
        try {
            const std::vector<double> solution = sparse_least_squares(system.a, system.rhs[dim]);
            for (std::size_t i = 0; i < n; ++i) coords(i, dim) = solution[i];
        } catch (const std::exception& e) {
            std::scoped_lock lock(failure_mutex);
            if (!failure) {
                failure = std::make_exception_ptr(std::runtime_error(
                    "lsp::run: solve for output coordinate " + std::to_string(dim) +
                    " failed: " + e.what()));
            }
        }
    });
    if (failure) std::rethrow_exception(failure);

    return Embedding{std::move(coords), labels};
}

}  // namespace projlab::lsp
