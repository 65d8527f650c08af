// Command-line harness for the projection toolkit: runs single projections
// or parameter sweeps and writes report/embedding/scatter/hit-curve files.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "projlab/sweep.hpp"

namespace {

int report_outcome(const std::vector<projlab::SweepCell>& cells,
                   const projlab::SweepConfig& config) {
    std::size_t failed = 0;
    for (const projlab::SweepCell& cell : cells) {
        if (!cell.row.error.empty()) {
            ++failed;
            std::fprintf(stderr, "cell %s failed: %s\n", cell.row.cell_name.c_str(),
                         cell.row.error.c_str());
        } else if (cell.row.silhouette) {
            std::printf("%-28s silhouette %.4f  (%.3f s)\n", cell.row.cell_name.c_str(),
                        *cell.row.silhouette, cell.row.seconds);
        }
    }
    std::printf("wrote %s\n", (config.output_dir / "report.csv").string().c_str());
    if (failed > 0) {
        std::fprintf(stderr, "%zu of %zu cells failed\n", failed, cells.size());
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multidimensional projection toolkit: t-SNE and LSP with quality reports"};
    app.require_subcommand(1);

    // --- sweep: run a parameter grid from a config file -------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
    std::string config_path;
    sweep_cmd->add_option("--config", config_path, "Flat key = value sweep config file")
        ->required();
    std::string sweep_input, sweep_label_col, sweep_out, sweep_distance;
    std::uint64_t sweep_seed = 0;
    auto* sweep_input_opt = sweep_cmd->add_option("--input", sweep_input, "Override input CSV");
    auto* sweep_label_opt =
        sweep_cmd->add_option("--label-col", sweep_label_col, "Override label column");
    auto* sweep_out_opt = sweep_cmd->add_option("--out", sweep_out, "Override output directory");
    auto* sweep_seed_opt = sweep_cmd->add_option("--seed", sweep_seed, "Override base seed");
    auto* sweep_dist_opt =
        sweep_cmd->add_option("--distance", sweep_distance, "Override distance (euclidean|cosine)");

    // --- run: a single projection cell ------------------------------------
    auto* run_cmd = app.add_subcommand("run", "Run a single projection");
    std::string method, run_input, run_label_col = "label", run_out = ".",
                        run_distance = "euclidean";
    std::uint64_t run_seed = 0;
    bool standardize = false;
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    std::size_t pca_dims = 0;
    std::size_t control_points = 25;
    std::size_t neighbors = 10;
    std::size_t hit_k_max = 30;

    run_cmd->add_option("--method", method, "Projection method (tsne|lsp)")->required();
    run_cmd->add_option("--input", run_input, "Input CSV with a header row")->required();
    run_cmd->add_option("--label-col", run_label_col, "Label column name (default: label)");
    run_cmd->add_option("--out", run_out, "Output directory");
    run_cmd->add_option("--seed", run_seed, "Random seed");
    run_cmd->add_option("--distance", run_distance, "Distance kind (euclidean|cosine)");
    run_cmd->add_flag("--standardize", standardize, "Standardize feature columns before use");
    run_cmd->add_option("--perplexity", perplexity, "t-SNE perplexity");
    run_cmd->add_option("--iterations", iterations, "t-SNE gradient-descent iterations");
    run_cmd->add_option("--pca-dims", pca_dims, "PCA dimensions before t-SNE (0 = off)");
    run_cmd->add_option("--control-points", control_points, "LSP control point count");
    run_cmd->add_option("--neighbors", neighbors, "LSP neighborhood size");
    run_cmd->add_option("--hit-k-max", hit_k_max, "Largest k for the neighborhood-hit curve");

    CLI11_PARSE(app, argc, argv);

    try {
        projlab::SweepConfig config;
        if (sweep_cmd->parsed()) {
            config = projlab::parse_config_file(config_path);
            if (sweep_input_opt->count() > 0) config.input = sweep_input;
            if (sweep_label_opt->count() > 0) config.label_column = sweep_label_col;
            if (sweep_out_opt->count() > 0) config.output_dir = sweep_out;
            if (sweep_seed_opt->count() > 0) config.seed = sweep_seed;
            if (sweep_dist_opt->count() > 0) {
                config.distance = projlab::parse_distance_kind(sweep_distance);
            }
        } else {
            config.method = projlab::parse_method(method);
            config.input = run_input;
            config.label_column = run_label_col;
            config.output_dir = run_out;
            config.seed = run_seed;
            config.distance = projlab::parse_distance_kind(run_distance);
            config.standardize = standardize;
            config.hit_curve_k_max = hit_k_max;
            if (config.method == projlab::Method::Tsne) {
                config.perplexities = {perplexity};
                config.iterations = {iterations};
                if (pca_dims > 0) config.pca_dims = {pca_dims};
            } else {
                config.control_points = {control_points};
                config.neighbors = {neighbors};
            }
        }

        const std::vector<projlab::SweepCell> cells = projlab::run_sweep_to_files(config);
        return report_outcome(cells, config);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
