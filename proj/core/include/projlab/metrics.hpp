#pragma once

#include <cstddef>
#include <vector>

#include "projlab/embedding.hpp"

namespace projlab::metrics {

/// Mean hit rate of the k nearest embedded neighbors sharing the query
/// point's label, for k = 1..k_max.
struct HitCurve {
    std::vector<std::size_t> ks;
    std::vector<double> rates;
};

/// Silhouette coefficient of the embedding against its labels, Euclidean
/// distance in embedding space. a_i is the mean distance to same-label
/// points (excluding i), b_i the smallest mean distance to any other label;
/// s_i = (b_i - a_i) / max(a_i, b_i), singleton classes contribute 0.
/// Requires n >= 2 and at least two distinct labels.
double silhouette(const Embedding& emb);

/// hit(k) = mean over points of the fraction of the k nearest embedded
/// neighbors (self excluded, ties to the lowest index) with the same label.
/// Requires 1 <= k_max < n.
HitCurve neighborhood_hit_curve(const Embedding& emb, std::size_t k_max);

}  // namespace projlab::metrics
