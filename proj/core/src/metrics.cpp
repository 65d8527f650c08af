#include "projlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "projlab/parallel.hpp"

namespace projlab::metrics {

namespace {

double point_distance(const Matrix& y, std::size_t i, std::size_t j) {
    double ss = 0.0;
    for (std::size_t c = 0; c < y.cols(); ++c) {
        const double diff = y(i, c) - y(j, c);
        ss += diff * diff;
    }
    return std::sqrt(ss);
}

void validate_embedding(const Embedding& emb) {
    if (emb.coords.rows() != emb.labels.size()) {
        throw std::invalid_argument("metrics: embedding has " +
                                    std::to_string(emb.coords.rows()) + " points but " +
                                    std::to_string(emb.labels.size()) + " labels");
    }
    require_finite(emb.coords, "metrics: embedding coordinates");
}

}  // namespace

double silhouette(const Embedding& emb) {
    validate_embedding(emb);
    const std::size_t n = emb.coords.rows();
    const std::size_t num_labels = emb.labels.num_classes();
    if (n < 2) throw std::invalid_argument("silhouette: need at least 2 points");
    if (num_labels < 2) {
        throw std::invalid_argument("silhouette: need at least 2 distinct labels");
    }

    std::vector<std::size_t> class_sizes(num_labels, 0);
    for (int id : emb.labels.ids) class_sizes[static_cast<std::size_t>(id)]++;

    // Per-point scores computed independently, then summed in index order so
    // the result does not depend on the parallel split.
    std::vector<double> scores(n, 0.0);
    parallel_for(0, n, [&](std::size_t i) {
        const auto own = static_cast<std::size_t>(emb.labels.ids[i]);
        if (class_sizes[own] <= 1) return;  // singleton class: s_i = 0

        std::vector<double> sums(num_labels, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sums[static_cast<std::size_t>(emb.labels.ids[j])] += point_distance(emb.coords, i, j);
        }

        const double a = sums[own] / static_cast<double>(class_sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < num_labels; ++c) {
            if (c == own || class_sizes[c] == 0) continue;
            b = std::min(b, sums[c] / static_cast<double>(class_sizes[c]));
        }

        const double denom = std::max(a, b);
        scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    });

    double total = 0.0;
    for (double s : scores) total += s;
    return total / static_cast<double>(n);
}

HitCurve neighborhood_hit_curve(const Embedding& emb, std::size_t k_max) {
    validate_embedding(emb);
    const std::size_t n = emb.coords.rows();
    if (k_max == 0 || k_max >= n) {
        throw std::invalid_argument("neighborhood_hit_curve: k_max must be in [1, n-1], got " +
                                    std::to_string(k_max));
    }

    // hit_sums[k-1] accumulates each point's same-label fraction among its k
    // nearest neighbors; ties on distance break toward the lower index.
    Matrix per_point(n, k_max);
    parallel_for(0, n, [&](std::size_t i) {
        std::vector<std::size_t> order;
        order.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) order.push_back(j);
        }
        std::vector<double> dist(n);
        for (std::size_t j : order) dist[j] = point_distance(emb.coords, i, j);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_max),
                          order.end(), [&](std::size_t a, std::size_t b) {
                              return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
                          });

        std::size_t same = 0;
        for (std::size_t k = 1; k <= k_max; ++k) {
            if (emb.labels.ids[order[k - 1]] == emb.labels.ids[i]) ++same;
            per_point(i, k - 1) = static_cast<double>(same) / static_cast<double>(k);
        }
    });

    HitCurve curve;
    curve.ks.resize(k_max);
    std::iota(curve.ks.begin(), curve.ks.end(), std::size_t{1});
    curve.rates.assign(k_max, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < k_max; ++k) curve.rates[k] += per_point(i, k);
    }
    for (double& r : curve.rates) r /= static_cast<double>(n);
    return curve;
}

}  // namespace projlab::metrics
