#include "projlab/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace projlab {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
    if (!out) {
        throw std::runtime_error("cannot write output file '" + path.string() + "'");
    }
    return out;
}

std::string quote_csv(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string format(const char* fmt, double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, fmt, v);
    return buffer;
}

// Ten well-separated fill colors; COREL-sized label sets use one each.
constexpr const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
    if (rows.empty()) {
        throw std::invalid_argument("write_report_csv: no rows");
    }
    for (const ReportRow& row : rows) {
        if (row.params.size() != rows.front().params.size()) {
            throw std::invalid_argument("write_report_csv: rows have inconsistent parameters");
        }
    }

    std::ofstream out = open_output(path);
    out << "method";
    for (const auto& [name, value] : rows.front().params) out << ',' << name;
    out << ",silhouette,seconds,seed,error\n";

    for (const ReportRow& row : rows) {
        out << row.method;
        for (const auto& [name, value] : row.params) out << ',' << value;
        out << ',';
        if (row.silhouette) out << format("%.4f", *row.silhouette);
        out << ',' << format("%.3f", row.seconds);
        out << ',' << row.seed;
        out << ',' << quote_csv(row.error);
        out << '\n';
    }
}

void write_embedding_csv(const Embedding& emb, const std::filesystem::path& path) {
    if (emb.coords.cols() != 2) {
        throw std::invalid_argument("write_embedding_csv: embedding must be 2-D");
    }
    if (emb.labels.size() != emb.coords.rows()) {
        throw std::invalid_argument("write_embedding_csv: labels do not match coordinates");
    }
    std::ofstream out = open_output(path);
    out << "index,x,y,label\n";
    for (std::size_t i = 0; i < emb.coords.rows(); ++i) {
        const auto label_id = static_cast<std::size_t>(emb.labels.ids[i]);
        out << i << ',' << format("%.9g", emb.coords(i, 0)) << ','
            << format("%.9g", emb.coords(i, 1)) << ','
            << quote_csv(emb.labels.names[label_id]) << '\n';
    }
}

Embedding read_embedding_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open embedding file '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("index,x,y,label", 0) != 0) {
        throw std::runtime_error("embedding file '" + path.string() + "' has unexpected header");
    }

    std::vector<double> coords;
    std::vector<int> ids;
    std::vector<std::string> names;
    std::unordered_map<std::string, int> codes;

    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line == "\r") continue;
        // index,x,y,label -- label may be quoted.
        std::size_t pos = 0;
        std::array<std::string, 3> numeric;
        for (auto& cell : numeric) {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) {
                throw std::runtime_error("embedding file: short row at line " +
                                         std::to_string(line_number));
            }
            cell = line.substr(pos, comma - pos);
            pos = comma + 1;
        }
        std::string label = line.substr(pos);
        if (!label.empty() && label.back() == '\r') label.pop_back();
        if (label.size() >= 2 && label.front() == '"' && label.back() == '"') {
            std::string unquoted;
            for (std::size_t i = 1; i + 1 < label.size(); ++i) {
                if (label[i] == '"' && i + 2 < label.size() && label[i + 1] == '"') ++i;
                unquoted += label[i];
            }
            label = std::move(unquoted);
        }

        for (std::size_t c = 1; c <= 2; ++c) {
            double v = 0.0;
            const std::string& cell = numeric[c];
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw std::runtime_error("embedding file: bad coordinate at line " +
                                         std::to_string(line_number));
            }
            coords.push_back(v);
        }
        auto [it, inserted] = codes.try_emplace(label, static_cast<int>(names.size()));
        if (inserted) names.push_back(label);
        ids.push_back(it->second);
    }

    const std::size_t n = ids.size();
    return Embedding{Matrix(n, 2, std::move(coords)), LabelVector{std::move(ids), std::move(names)}};
}

void write_svg_scatter(const Embedding& emb, const std::filesystem::path& path) {
    if (emb.coords.cols() != 2) {
        throw std::invalid_argument("write_svg_scatter: embedding must be 2-D");
    }
    if (emb.labels.size() != emb.coords.rows()) {
        throw std::invalid_argument("write_svg_scatter: labels do not match coordinates");
    }
    const std::size_t n = emb.coords.rows();

    double min_x = emb.coords(0, 0), max_x = emb.coords(0, 0);
    double min_y = emb.coords(0, 1), max_y = emb.coords(0, 1);
    for (std::size_t i = 1; i < n; ++i) {
        min_x = std::min(min_x, emb.coords(i, 0));
        max_x = std::max(max_x, emb.coords(i, 0));
        min_y = std::min(min_y, emb.coords(i, 1));
        max_y = std::max(max_y, emb.coords(i, 1));
    }

    constexpr double kCanvas = 1000.0;
    constexpr double kMargin = 0.05 * kCanvas;
    const double usable = kCanvas - 2.0 * kMargin;
    const auto map_x = [&](double x) {
        if (max_x == min_x) return kCanvas / 2.0;
        return kMargin + (x - min_x) / (max_x - min_x) * usable;
    };
    const auto map_y = [&](double y) {
        if (max_y == min_y) return kCanvas / 2.0;
        return kCanvas - kMargin - (y - min_y) / (max_y - min_y) * usable;
    };

    const std::size_t num_labels = emb.labels.num_classes();
    const auto marker = [&](std::ostream& out, double cx, double cy, std::size_t label) {
        const char* fill = kPalette[label % 10];
        switch ((label / 10) % 3) {
            case 0:
                out << "  <circle cx=\"" << format("%.2f", cx) << "\" cy=\"" << format("%.2f", cy)
                    << "\" r=\"4\" fill=\"" << fill << "\"/>\n";
                break;
            case 1:
                out << "  <rect x=\"" << format("%.2f", cx - 4) << "\" y=\""
                    << format("%.2f", cy - 4) << "\" width=\"8\" height=\"8\" fill=\"" << fill
                    << "\"/>\n";
                break;
            default:
                out << "  <polygon points=\"" << format("%.2f", cx) << ","
                    << format("%.2f", cy - 5) << " " << format("%.2f", cx - 4.5) << ","
                    << format("%.2f", cy + 4) << " " << format("%.2f", cx + 4.5) << ","
                    << format("%.2f", cy + 4) << "\" fill=\"" << fill << "\"/>\n";
                break;
        }
    };

    std::ofstream out = open_output(path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" "
           "viewBox=\"0 0 1000 1000\">\n"
        << "  <rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n";

    for (std::size_t i = 0; i < n; ++i) {
        marker(out, map_x(emb.coords(i, 0)), map_y(emb.coords(i, 1)),
               static_cast<std::size_t>(emb.labels.ids[i]));
    }

    // Legend: one entry per label name, marker shape varies when the palette
    // cycles past ten labels.
    for (std::size_t label = 0; label < num_labels; ++label) {
        const double ly = 20.0 + 18.0 * static_cast<double>(label);
        marker(out, 16.0, ly, label);
        out << "  <text x=\"28\" y=\"" << format("%.2f", ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << emb.labels.names[label];
        if (num_labels > 10) out << " [shape " << (label / 10) % 3 + 1 << "]";
        out << "</text>\n";
    }
    out << "</svg>\n";
}

void write_hit_curve_csv(const std::vector<std::string>& names,
                         const std::vector<metrics::HitCurve>& curves,
                         const std::filesystem::path& path) {
    if (curves.empty() || names.size() != curves.size()) {
        throw std::invalid_argument("write_hit_curve_csv: need one name per curve");
    }
    for (const metrics::HitCurve& curve : curves) {
        if (curve.ks != curves.front().ks) {
            throw std::invalid_argument("write_hit_curve_csv: mismatched k ranges");
        }
    }

    std::ofstream out = open_output(path);
    out << 'k';
    for (const std::string& name : names) out << ',' << quote_csv(name);
    out << '\n';
    for (std::size_t row = 0; row < curves.front().ks.size(); ++row) {
        out << curves.front().ks[row];
        for (const metrics::HitCurve& curve : curves) {
            out << ',' << format("%.6f", curve.rates[row]);
        }
        out << '\n';
    }
}

}  // namespace projlab
