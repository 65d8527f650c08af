#include "projlab/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "projlab/parallel.hpp"

namespace projlab {

DistanceKind parse_distance_kind(std::string_view name) {
    if (name == "euclidean") return DistanceKind::Euclidean;
    if (name == "cosine") return DistanceKind::Cosine;
    throw std::runtime_error("unknown distance kind '" + std::string(name) +
                             "' (expected euclidean or cosine)");
}

std::string_view to_string(DistanceKind kind) {
    return kind == DistanceKind::Euclidean ? "euclidean" : "cosine";
}

DistanceMatrix DistanceMatrix::from_matrix(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("DistanceMatrix: input must be square");
    }
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {
        if (m(i, i) != 0.0) {
            throw std::invalid_argument("DistanceMatrix: nonzero diagonal at index " +
                                        std::to_string(i));
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = m(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                throw std::invalid_argument("DistanceMatrix: invalid distance at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (v != m(j, i)) {
                throw std::invalid_argument("DistanceMatrix: asymmetric at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
            }
        }
    }
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d.values_[i * n + j] = m(i, j);
    return d;
}

DistanceMatrix DistanceMatrix::restricted_to(std::span<const std::size_t> indices) const {
    DistanceMatrix sub(indices.size());
    for (std::size_t a = 0; a < indices.size(); ++a) {
        for (std::size_t b = a + 1; b < indices.size(); ++b) {
            sub.set(a, b, (*this)(indices[a], indices[b]));
        }
    }
    return sub;
}

bool DistanceMatrix::all_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string cell = line.substr(start, comma == std::string::npos ? comma : comma - start);
        // Trim surrounding whitespace and stray CR from CRLF files.
        const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
        while (!cell.empty() && is_space(cell.front())) cell.erase(cell.begin());
        while (!cell.empty() && is_space(cell.back())) cell.pop_back();
        cells.push_back(std::move(cell));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_cell(const std::string& cell, std::size_t line_number, const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || cell.empty()) {
        throw std::runtime_error("non-numeric cell '" + cell + "' at line " +
                                 std::to_string(line_number) + ", column '" + column + "'");
    }
    if (!std::isfinite(value)) {
        throw std::runtime_error("non-finite value at line " + std::to_string(line_number) +
                                 ", column '" + column + "'");
    }
    return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open input file '" + path.string() + "'");
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("input file '" + path.string() + "' is empty");
    }
    const std::vector<std::string> header = split_line(line);

    std::size_t label_index = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == label_column) {
            label_index = c;
            break;
        }
    }
    if (label_index == header.size()) {
        throw std::runtime_error("label column '" + label_column + "' not found in '" +
                                 path.string() + "'");
    }
    if (header.size() < 2) {
        throw std::runtime_error("input file '" + path.string() + "' has no feature columns");
    }

    std::vector<double> values;
    std::vector<int> label_ids;
    std::vector<std::string> label_names;
    std::unordered_map<std::string, int> label_codes;

    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("ragged row at line " + std::to_string(line_number) +
                                     ": expected " + std::to_string(header.size()) +
                                     " cells, got " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_index) continue;
            values.push_back(parse_cell(cells[c], line_number, header[c]));
        }
        const std::string& label = cells[label_index];
        auto [it, inserted] = label_codes.try_emplace(label, static_cast<int>(label_names.size()));
        if (inserted) label_names.push_back(label);
        label_ids.push_back(it->second);
    }

    const std::size_t cols = header.size() - 1;
    const std::size_t rows = label_ids.size();
    if (rows == 0) {
        throw std::runtime_error("input file '" + path.string() + "' has no data rows");
    }

    return Dataset{DataMatrix(rows, cols, std::move(values)),
                   LabelVector{std::move(label_ids), std::move(label_names)}};
}

CenterResult center_columns(const DataMatrix& x) {
    require_finite(x, "center_columns input");
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j);
    }
    for (double& m : mean) m /= static_cast<double>(n);

    DataMatrix centered(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) centered(i, j) = x(i, j) - mean[j];
    }
    return CenterResult{std::move(centered), std::move(mean)};
}

DataMatrix standardize_columns(const DataMatrix& x) {
    auto [centered, mean] = center_columns(x);
    const std::size_t n = centered.rows();
    const std::size_t d = centered.cols();
    for (std::size_t j = 0; j < d; ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += centered(i, j) * centered(i, j);
        const double stddev = std::sqrt(ss / static_cast<double>(n > 1 ? n - 1 : 1));
        if (stddev == 0.0) {
            throw std::runtime_error("standardize_columns: column " + std::to_string(j) +
                                     " has zero variance");
        }
        for (std::size_t i = 0; i < n; ++i) centered(i, j) /= stddev;
    }
    return std::move(centered);
}

DistanceMatrix pairwise_distances(const DataMatrix& x, DistanceKind kind) {
    require_finite(x, "pairwise_distances input");
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    DistanceMatrix dist(n);

    std::vector<double> norms;
    if (kind == DistanceKind::Cosine) {
        norms.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double ss = 0.0;
            for (double v : x.row(i)) ss += v * v;
            norms[i] = std::sqrt(ss);
            if (norms[i] == 0.0) {
                throw std::runtime_error("cosine distance undefined: row " + std::to_string(i) +
                                         " has zero norm");
            }
        }
    }

    // Each (i, j) pair with j > i is computed exactly once and mirrored, so
    // the matrix is symmetric to the bit regardless of parallel split.
    parallel_for(0, n, [&](std::size_t i) {
        const auto ri = x.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto rj = x.row(j);
            double value = 0.0;
            if (kind == DistanceKind::Euclidean) {
                double ss = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    const double diff = ri[c] - rj[c];
                    ss += diff * diff;
                }
                value = std::sqrt(ss);
            } else {
                double dot = 0.0;
                for (std::size_t c = 0; c < d; ++c) dot += ri[c] * rj[c];
                value = std::max(0.0, 1.0 - dot / (norms[i] * norms[j]));
            }
            dist.set(i, j, value);
        }
    });
    return dist;
}

}  // namespace projlab
