#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "projlab/embedding.hpp"
#include "projlab/metrics.hpp"
#include "projlab/sweep.hpp"

namespace projlab {

/// Writes the sweep report: header `method,<params...>,silhouette,seconds,
/// seed,error`, one row per grid cell in order. Scores are fixed 4-decimal;
/// a failed cell leaves the score empty and fills the error column.
void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path);

/// Writes `index,x,y,label` rows, coordinates printed with 9 significant
/// digits. 2-D embeddings only.
void write_embedding_csv(const Embedding& emb, const std::filesystem::path& path);

/// Reads a file written by write_embedding_csv back into an Embedding.
Embedding read_embedding_csv(const std::filesystem::path& path);

/// Standalone SVG scatter plot: one marker per point in a 1000x1000 viewBox
/// with a 5% margin, colored by label from a fixed 10-color palette, plus a
/// legend of label names. A degenerate coordinate range maps to the canvas
/// midpoint. Labels beyond the palette cycle the colors with a varied marker
/// shape, noted in the legend. 2-D embeddings only.
void write_svg_scatter(const Embedding& emb, const std::filesystem::path& path);

/// Writes `k,<name1>,<name2>,...` with one row per k. All curves must share
/// the same k range.
void write_hit_curve_csv(const std::vector<std::string>& names,
                         const std::vector<metrics::HitCurve>& curves,
                         const std::filesystem::path& path);

}  // namespace projlab
