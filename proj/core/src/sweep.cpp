#include "projlab/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "projlab/lsp.hpp"
#include "projlab/report.hpp"
#include "projlab/tsne.hpp"

namespace projlab {

Method parse_method(std::string_view name) {
    if (name == "tsne") return Method::Tsne;
    if (name == "lsp") return Method::Lsp;
    throw std::runtime_error("unknown method '" + std::string(name) +
                             "' (expected tsne or lsp)");
}

std::string_view to_string(Method method) {
    return method == Method::Tsne ? "tsne" : "lsp";
}

namespace {

std::string trim(std::string s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.front())) s.erase(s.begin());
    while (!s.empty() && is_space(s.back())) s.pop_back();
    return s;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= value.size()) {
        const std::size_t comma = value.find(',', start);
        items.push_back(trim(value.substr(start, comma == std::string::npos ? comma
                                                                            : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return items;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw std::runtime_error("config key '" + key + "': invalid value '" + text + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_number_list(const std::string& value, const std::string& key) {
    std::vector<T> out;
    for (const std::string& item : split_list(value)) out.push_back(parse_number<T>(item, key));
    return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::runtime_error("config key '" + key + "': invalid boolean '" + value + "'");
}

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%g", v);
    return buffer;
}

}  // namespace

SweepConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + path.string() + "'");
    }

    SweepConfig config;
    bool saw_input = false;
    bool saw_method = false;

    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "input") {
            config.input = value;
            saw_input = true;
        } else if (key == "label_column") {
            config.label_column = value;
        } else if (key == "method") {
            config.method = parse_method(value);
            saw_method = true;
        } else if (key == "distance") {
            config.distance = parse_distance_kind(value);
        } else if (key == "seed") {
            config.seed = parse_number<std::uint64_t>(value, key);
        } else if (key == "output") {
            config.output_dir = value;
        } else if (key == "standardize") {
            config.standardize = parse_bool(value, key);
        } else if (key == "hit_k_max") {
            config.hit_curve_k_max = parse_number<std::size_t>(value, key);
        } else if (key == "control_points") {
            config.control_points = parse_number_list<std::size_t>(value, key);
        } else if (key == "neighbors") {
            config.neighbors = parse_number_list<std::size_t>(value, key);
        } else if (key == "perplexity") {
            config.perplexities = parse_number_list<double>(value, key);
        } else if (key == "iterations") {
            config.iterations = parse_number_list<std::size_t>(value, key);
        } else if (key == "pca_dims") {
            config.pca_dims = parse_number_list<std::size_t>(value, key);
        } else {
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     ": unknown key '" + key + "'");
        }
    }

    if (!saw_input) throw std::runtime_error("config: missing required key 'input'");
    if (!saw_method) throw std::runtime_error("config: missing required key 'method'");
    return config;
}

void validate(const SweepConfig& config) {
    if (config.input.empty()) throw std::runtime_error("sweep config: input path is empty");
    if (config.label_column.empty()) {
        throw std::runtime_error("sweep config: label column name is empty");
    }
    if (config.hit_curve_k_max == 0) {
        throw std::runtime_error("sweep config: hit_k_max must be >= 1");
    }

    if (config.method == Method::Lsp) {
        if (config.control_points.empty()) {
            throw std::runtime_error("sweep config: lsp requires a non-empty control_points grid");
        }
        if (config.neighbors.empty()) {
            throw std::runtime_error("sweep config: lsp requires a non-empty neighbors grid");
        }
        for (std::size_t cp : config.control_points) {
            if (cp == 0) throw std::runtime_error("sweep config: control_points values must be >= 1");
        }
        for (std::size_t nn : config.neighbors) {
            if (nn == 0) throw std::runtime_error("sweep config: neighbors values must be >= 1");
        }
    } else {
        if (config.perplexities.empty()) {
            throw std::runtime_error("sweep config: tsne requires a non-empty perplexity grid");
        }
        if (config.iterations.empty()) {
            throw std::runtime_error("sweep config: tsne requires a non-empty iterations grid");
        }
        for (double p : config.perplexities) {
            if (!(p > 1.0)) {
                throw std::runtime_error("sweep config: perplexity values must be > 1, got " +
                                         format_double(p));
            }
        }
        for (std::size_t it : config.iterations) {
            if (it == 0) throw std::runtime_error("sweep config: iterations values must be >= 1");
        }
        for (std::size_t pd : config.pca_dims) {
            if (pd == 0) throw std::runtime_error("sweep config: pca_dims values must be >= 1");
        }
    }
}

namespace {

struct Cell {
    std::vector<std::pair<std::string, std::string>> params;
    std::string name;
    // lsp
    std::size_t control_points = 0;
    std::size_t neighbors = 0;
    // tsne
    double perplexity = 0.0;
    std::size_t iterations = 0;
    std::optional<std::size_t> pca_dims;
};

std::vector<Cell> enumerate_cells(const SweepConfig& config) {
    std::vector<Cell> cells;
    if (config.method == Method::Lsp) {
        for (std::size_t cp : config.control_points) {
            for (std::size_t nn : config.neighbors) {
                Cell cell;
                cell.control_points = cp;
                cell.neighbors = nn;
                cell.params = {{"control_points", std::to_string(cp)},
                               {"neighbors", std::to_string(nn)}};
                cell.name = "lsp_cp" + std::to_string(cp) + "_nn" + std::to_string(nn);
                cells.push_back(std::move(cell));
            }
        }
    } else {
        const bool with_pca = !config.pca_dims.empty();
        std::vector<std::optional<std::size_t>> pca_axis;
        if (with_pca) {
            for (std::size_t pd : config.pca_dims) pca_axis.emplace_back(pd);
        } else {
            pca_axis.emplace_back(std::nullopt);
        }
        for (const auto& pd : pca_axis) {
            for (std::size_t it : config.iterations) {
                for (double perp : config.perplexities) {
                    Cell cell;
                    cell.perplexity = perp;
                    cell.iterations = it;
                    cell.pca_dims = pd;
                    if (with_pca) {
                        cell.params.emplace_back("pca_dims", std::to_string(pd.value()));
                    }
                    cell.params.emplace_back("perplexity", format_double(perp));
                    cell.params.emplace_back("iterations", std::to_string(it));
                    cell.name = "tsne";
                    if (with_pca) cell.name += "_pca" + std::to_string(pd.value());
                    cell.name += "_perp" + format_double(perp) + "_it" + std::to_string(it);
                    cells.push_back(std::move(cell));
                }
            }
        }
    }
    return cells;
}

}  // namespace

std::vector<SweepCell> run_sweep(const SweepConfig& config) {
    validate(config);
    Dataset dataset = load_csv(config.input, config.label_column);
    if (config.standardize) {
        dataset.features = standardize_columns(dataset.features);
    }
    const std::size_t n = dataset.features.rows();
    const std::size_t hit_k_max = std::min(config.hit_curve_k_max, n > 1 ? n - 1 : 1);

    const std::vector<Cell> cells = enumerate_cells(config);
    std::vector<SweepCell> results;
    results.reserve(cells.size());

    for (std::size_t index = 0; index < cells.size(); ++index) {
        const Cell& cell = cells[index];
        SweepCell result;
        result.row.method = std::string(to_string(config.method));
        result.row.params = cell.params;
        result.row.cell_name = cell.name;
        result.row.seed = config.seed + index;

        const auto start = std::chrono::steady_clock::now();
        try {
            Embedding embedding;
            if (config.method == Method::Lsp) {
                lsp::Config lc;
                lc.control_points = cell.control_points;
                lc.neighbors = cell.neighbors;
                lc.distance = config.distance;
                lc.seed = result.row.seed;
                embedding = lsp::run(dataset.features, dataset.labels, lc);
            } else {
                tsne::Config tc;
                tc.perplexity = cell.perplexity;
                tc.iterations = cell.iterations;
                // Short runs keep the early-exaggeration phase proportional.
                tc.exaggeration_iters = std::min(tc.exaggeration_iters, cell.iterations);
                tc.momentum_switch_iter = std::min(tc.momentum_switch_iter, cell.iterations);
                tc.seed = result.row.seed;
                embedding = tsne::run(dataset.features, dataset.labels, tc, cell.pca_dims,
                                      config.distance);
            }
            result.row.silhouette = metrics::silhouette(embedding);
            result.hit_curve = metrics::neighborhood_hit_curve(embedding, hit_k_max);
            result.embedding = std::move(embedding);
        } catch (const std::exception& e) {
            result.row.error = e.what();
        }
        const auto stop = std::chrono::steady_clock::now();
        result.row.seconds = std::chrono::duration<double>(stop - start).count();

        results.push_back(std::move(result));
    }
    return results;
}

std::vector<SweepCell> run_sweep_to_files(const SweepConfig& config) {
    std::vector<SweepCell> cells = run_sweep(config);
    std::filesystem::create_directories(config.output_dir);

    std::vector<ReportRow> rows;
    rows.reserve(cells.size());
    for (const SweepCell& cell : cells) rows.push_back(cell.row);
    write_report_csv(rows, config.output_dir / "report.csv");

    std::vector<std::string> curve_names;
    std::vector<metrics::HitCurve> curves;
    for (const SweepCell& cell : cells) {
        if (!cell.embedding) continue;
        write_embedding_csv(*cell.embedding,
                            config.output_dir / ("embedding_" + cell.row.cell_name + ".csv"));
        write_svg_scatter(*cell.embedding,
                          config.output_dir / ("scatter_" + cell.row.cell_name + ".svg"));
        curve_names.push_back(cell.row.cell_name);
        curves.push_back(cell.hit_curve);
    }
    if (!curves.empty()) {
        write_hit_curve_csv(curve_names, curves, config.output_dir / "hitcurve.csv");
    }
    return cells;
}

}  // namespace projlab
