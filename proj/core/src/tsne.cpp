#include "projlab/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "projlab/parallel.hpp"
#include "projlab/pca.hpp"

namespace projlab::tsne {

namespace {

constexpr double kProbabilityFloor = 1e-12;
constexpr std::size_t kBisectionCap = 200;
constexpr std::size_t kBracketCap = 200;

// Uniform double in (0, 1] from the raw 64-bit stream; fully specified, so
// runs are reproducible across standard libraries.
double uniform_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller standard normal; consumes two draws per pair.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u = uniform_unit(rng_);
        const double v = uniform_unit(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u));
        const double angle = 2.0 * 3.141592653589793238462643383279502884 * v;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace

void validate(const Config& config, std::size_t n) {
    if (!(config.perplexity > 1.0)) {
        throw std::invalid_argument("tsne: perplexity must be > 1");
    }
    if (config.perplexity >= static_cast<double>(n)) {
        throw std::invalid_argument("tsne: perplexity " + std::to_string(config.perplexity) +
                                    " must be < n = " + std::to_string(n));
    }
    if (config.iterations == 0) throw std::invalid_argument("tsne: iterations must be >= 1");
    if (!(config.learning_rate > 0.0)) {
        throw std::invalid_argument("tsne: learning_rate must be > 0");
    }
    const auto momentum_ok = [](double m) { return m >= 0.0 && m < 1.0; };
    if (!momentum_ok(config.momentum_initial) || !momentum_ok(config.momentum_final)) {
        throw std::invalid_argument("tsne: momenta must lie in [0, 1)");
    }
    if (config.exaggeration_factor < 1.0) {
        throw std::invalid_argument("tsne: exaggeration_factor must be >= 1");
    }
    if (config.exaggeration_iters > config.iterations) {
        throw std::invalid_argument("tsne: exaggeration_iters exceeds iterations");
    }
    if (config.out_dim == 0) throw std::invalid_argument("tsne: out_dim must be >= 1");
    if (!(config.init_scale > 0.0)) throw std::invalid_argument("tsne: init_scale must be > 0");
}

std::vector<double> conditional_probabilities(std::span<const double> sq_dists, std::size_t self,
                                              double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("conditional_probabilities: sigma must be > 0");
    const std::size_t n = sq_dists.size();
    std::vector<double> probs(n, 0.0);

    const double inv = 1.0 / (2.0 * sigma * sigma);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self) continue;
        max_logit = std::max(max_logit, -sq_dists[j] * inv);
    }
    if (!std::isfinite(max_logit)) {
        throw std::runtime_error(
            "conditional_probabilities: degenerate row, all neighbors infinitely far");
    }

    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self) continue;
        const double w = std::exp(-sq_dists[j] * inv - max_logit);
        probs[j] = w;
        total += w;
    }
    for (double& p : probs) p /= total;
    return probs;
}

double row_perplexity(std::span<const double> probs, std::size_t self) {
    double entropy_bits = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (j == self || probs[j] <= 0.0) continue;
        entropy_bits -= probs[j] * std::log2(probs[j]);
    }
    return std::exp2(entropy_bits);
}

void apply_duplicate_floor(Matrix& sq_dists) {
    for (std::size_t i = 0; i < sq_dists.rows(); ++i) {
        for (std::size_t j = 0; j < sq_dists.cols(); ++j) {
            if (i != j && sq_dists(i, j) == 0.0) sq_dists(i, j) = 1e-12;
        }
    }
}

namespace {

double calibrate_row(std::span<const double> sq_row, std::size_t self, double target) {
    const auto achieved = [&](double sigma) {
        return row_perplexity(conditional_probabilities(sq_row, self, sigma), self);
    };

    // Bracket the target by doubling/halving from sigma = 1, then bisect.
    double lo = 1.0;
    double hi = 1.0;
    double perp = achieved(1.0);
    if (perp < target) {
        for (std::size_t step = 0; step < kBracketCap && perp < target; ++step) {
            lo = hi;
            hi *= 2.0;
            perp = achieved(hi);
        }
    } else {
        for (std::size_t step = 0; step < kBracketCap && perp > target; ++step) {
            hi = lo;
            lo *= 0.5;
            perp = achieved(lo);
        }
    }

    double sigma = 0.5 * (lo + hi);
    for (std::size_t step = 0; step < kBisectionCap; ++step) {
        sigma = 0.5 * (lo + hi);
        const double p = achieved(sigma);
        if (std::abs(p - target) <= 1e-6) return sigma;
        if (p < target) {
            lo = sigma;
        } else {
            hi = sigma;
        }
        if (lo == hi) break;
    }

    const double final_perp = achieved(sigma);
    if (std::abs(final_perp - target) > 1e-4) {
        throw std::runtime_error("calibrate_sigmas: perplexity " + std::to_string(target) +
                                 " unreachable (achieved " + std::to_string(final_perp) + ")");
    }
    return sigma;
}

}  // namespace

std::vector<double> calibrate_sigmas(const Matrix& sq_dists, double perplexity) {
    const std::size_t n = sq_dists.rows();
    if (sq_dists.cols() != n) {
        throw std::invalid_argument("calibrate_sigmas: matrix must be square");
    }
    if (!(perplexity > 1.0) || perplexity >= static_cast<double>(n)) {
        throw std::invalid_argument("calibrate_sigmas: perplexity must lie in (1, n)");
    }

    std::vector<double> sigmas(n, 0.0);
    parallel_for(0, n, [&](std::size_t i) {
        sigmas[i] = calibrate_row(sq_dists.row(i), i, perplexity);
    });
    return sigmas;
}

Matrix conditional_matrix(const Matrix& sq_dists, std::span<const double> sigmas) {
    const std::size_t n = sq_dists.rows();
    if (sigmas.size() != n) {
        throw std::invalid_argument("conditional_matrix: need one sigma per row");
    }
    Matrix conditionals(n, n);
    parallel_for(0, n, [&](std::size_t i) {
        const std::vector<double> row = conditional_probabilities(sq_dists.row(i), i, sigmas[i]);
        std::copy(row.begin(), row.end(), conditionals.row(i).begin());
    });
    return conditionals;
}

Matrix joint_affinities(const Matrix& conditionals) {
    const std::size_t n = conditionals.rows();
    if (conditionals.cols() != n) {
        throw std::invalid_argument("joint_affinities: matrix must be square");
    }
    Matrix joint(n, n);
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double value = (conditionals(i, j) + conditionals(j, i)) * scale;
            joint(i, j) = value;
            joint(j, i) = value;
        }
    }
    check_affinity(joint, "joint affinities P");
    return joint;
}

Matrix low_dim_affinities(const Matrix& y) {
    require_finite(y, "low_dim_affinities input");
    const std::size_t n = y.rows();
    const std::size_t d = y.cols();

    Matrix q(n, n);
    std::vector<double> row_sums(n, 0.0);
    parallel_for(0, n, [&](std::size_t i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = y(i, c) - y(j, c);
                sq += diff * diff;
            }
            const double w = 1.0 / (1.0 + sq);
            q(i, j) = w;
            sum += w;
        }
        row_sums[i] = sum;
    });

    // Normalize over all distinct ordered pairs; the row sums are reduced in
    // index order so the total is thread-count independent.
    double total = 0.0;
    for (double s : row_sums) total += s;
    const double inv_total = 1.0 / total;
    parallel_for(0, n, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) q(i, j) *= inv_total;
        }
    });
    check_affinity(q, "low-dimensional affinities Q");
    return q;
}

double kl_cost(const Matrix& p, const Matrix& q) {
    const std::size_t n = p.rows();
    if (q.rows() != n || p.cols() != n || q.cols() != n) {
        throw std::invalid_argument("kl_cost: P and Q must be square with equal size");
    }
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double pij = p(i, j);
            if (pij <= 0.0) continue;
            cost += pij * std::log(std::max(pij, kProbabilityFloor) /
                                   std::max(q(i, j), kProbabilityFloor));
        }
    }
    return cost;
}

Matrix gradient(const Matrix& p, const Matrix& q, const Matrix& y) {
    const std::size_t n = y.rows();
    const std::size_t d = y.cols();
    if (p.rows() != n || q.rows() != n) {
        throw std::invalid_argument("gradient: P/Q size does not match Y");
    }

    Matrix grad(n, d);
    parallel_for(0, n, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = y(i, c) - y(j, c);
                sq += diff * diff;
            }
            const double weight = 4.0 * (p(i, j) - q(i, j)) / (1.0 + sq);
            for (std::size_t c = 0; c < d; ++c) {
                grad(i, c) += weight * (y(i, c) - y(j, c));
            }
        }
    });
    return grad;
}

void check_affinity(const Matrix& m, std::string_view what) {
    const std::size_t n = m.rows();
    if (m.cols() != n) {
        throw std::logic_error(std::string(what) + ": affinity matrix must be square");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (m(i, i) != 0.0) {
            throw std::logic_error(std::string(what) + ": nonzero diagonal at " +
                                   std::to_string(i));
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double v = m(i, j);
            if (!(v >= 0.0) || v > 1.0) {
                throw std::logic_error(std::string(what) + ": entry out of [0,1] at (" +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (v != m(j, i)) {
                throw std::logic_error(std::string(what) + ": asymmetric at (" +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
            }
            total += v;
        }
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::logic_error(std::string(what) + ": total mass " + std::to_string(total) +
                               " differs from 1");
    }
}

Embedding run(const DataMatrix& x, const LabelVector& labels, const Config& config,
              std::optional<std::size_t> pca_dims, DistanceKind distance,
              const IterationCallback& on_iteration) {
    require_finite(x, "tsne::run input");
    const std::size_t n = x.rows();
    validate(config, n);
    if (labels.size() != n) {
        throw std::invalid_argument("tsne::run: labels do not match input rows");
    }
    if (pca_dims && *pca_dims > x.cols()) {
        throw std::invalid_argument("tsne::run: pca_dims exceeds input dimensionality");
    }

    DataMatrix features = x;
    if (pca_dims) {
        features = pca::transform(x, pca::fit(x, *pca_dims));
    }

    // Squared input distances with the duplicate floor, then P.
    const DistanceMatrix dist = pairwise_distances(features, distance);
    Matrix sq_dists(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sq_dists(i, j) = dist(i, j) * dist(i, j);
        }
    }
    apply_duplicate_floor(sq_dists);

    const std::vector<double> sigmas = calibrate_sigmas(sq_dists, config.perplexity);
    Matrix p = joint_affinities(conditional_matrix(sq_dists, sigmas));

    const bool exaggerate = config.exaggeration_iters > 0 && config.exaggeration_factor > 1.0;
    if (exaggerate) {
        for (double& v : p.values()) v *= config.exaggeration_factor;
    }

    // Seeded Gaussian start.
    Matrix y(n, config.out_dim);
    GaussianSource noise(config.seed);
    for (double& v : y.values()) v = noise.next() * config.init_scale;

    Matrix velocity(n, config.out_dim);
    std::vector<double> mean(config.out_dim);

    for (std::size_t iter = 0; iter < config.iterations; ++iter) {
        const Matrix q = low_dim_affinities(y);
        const Matrix grad = gradient(p, q, y);

        const double momentum =
            iter < config.momentum_switch_iter ? config.momentum_initial : config.momentum_final;
        for (std::size_t i = 0; i < y.values().size(); ++i) {
            velocity.values()[i] =
                momentum * velocity.values()[i] - config.learning_rate * grad.values()[i];
            y.values()[i] += velocity.values()[i];
        }

        // Translation gauge fix: keep the centroid pinned to the origin.
        std::fill(mean.begin(), mean.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < config.out_dim; ++c) mean[c] += y(i, c);
        }
        for (double& m : mean) m /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < config.out_dim; ++c) y(i, c) -= mean[c];
        }
        for (std::size_t c = 0; c < config.out_dim; ++c) {
            double residual = 0.0;
            for (std::size_t i = 0; i < n; ++i) residual += y(i, c);
            if (std::abs(residual / static_cast<double>(n)) > 1e-9) {
                throw std::logic_error("tsne::run: centroid drift after re-centering");
            }
        }

        if (exaggerate && iter + 1 == config.exaggeration_iters) {
            for (double& v : p.values()) v /= config.exaggeration_factor;
        }
        if (on_iteration) on_iteration(iter, y);
    }

    return Embedding{std::move(y), labels};
}

}  // namespace projlab::tsne
