#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "projlab/dataset.hpp"
#include "projlab/embedding.hpp"
#include "projlab/metrics.hpp"

namespace projlab {

enum class Method { Tsne, Lsp };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

/// Declarative parameter sweep: a dataset, a method, and the per-method
/// parameter grids. Cells are enumerated in declared order (outer grids
/// first), each with seed = base seed + cell index.
struct SweepConfig {
    std::filesystem::path input;
    std::string label_column = "label";
    Method method = Method::Tsne;
    DistanceKind distance = DistanceKind::Euclidean;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = ".";
    bool standardize = false;
    std::size_t hit_curve_k_max = 30;

    // lsp grid
    std::vector<std::size_t> control_points;
    std::vector<std::size_t> neighbors;

    // tsne grid
    std::vector<double> perplexities;
    std::vector<std::size_t> iterations;
    std::vector<std::size_t> pca_dims;  // empty = no PCA preprocessing
};

/// One line of the sweep report.
struct ReportRow {
    std::string method;
    std::vector<std::pair<std::string, std::string>> params;  // name -> printed value
    std::string cell_name;  // filename-safe id, e.g. lsp_cp25_nn10
    std::optional<double> silhouette;
    double seconds = 0.0;
    std::uint64_t seed = 0;
    std::string error;  // non-empty when the cell failed
};

struct SweepCell {
    ReportRow row;
    std::optional<Embedding> embedding;  // absent when the cell failed
    metrics::HitCurve hit_curve;
};

/// Parses a flat key = value config file ('#' starts a comment). Unknown
/// keys are rejected by name.
SweepConfig parse_config_file(const std::filesystem::path& path);

/// Validates grids (non-empty, values satisfy the method's invariants).
void validate(const SweepConfig& config);

/// Executes every grid cell in declared order. Per-cell failures are
/// recorded in the row without aborting the remaining cells. Reruns with an
/// identical config produce identical rows (modulo wall-clock seconds).
std::vector<SweepCell> run_sweep(const SweepConfig& config);

/// run_sweep plus file output into config.output_dir: report.csv, one
/// embedding_<cell>.csv and scatter_<cell>.svg per successful cell, and a
/// combined hitcurve.csv. Returns the cells.
std::vector<SweepCell> run_sweep_to_files(const SweepConfig& config);

}  // namespace projlab
