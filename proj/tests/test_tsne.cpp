#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "projlab/metrics.hpp"
#include "projlab/tsne.hpp"
#include "support/blobs.hpp"
#include "support/oracles.hpp"

using namespace projlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix squared_distances(const DataMatrix& x, DistanceKind kind = DistanceKind::Euclidean) {
    const DistanceMatrix d = pairwise_distances(x, kind);
    Matrix sq(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) sq(i, j) = d(i, j) * d(i, j);
    }
    return sq;
}

}  // namespace

TEST_CASE("conditional_probabilities: equidistant finite neighbors share mass equally") {
    // 3 neighbors at squared distance 4, the rest at infinity.
    const std::vector<double> row{0.0, 4.0, 4.0, 4.0, kInf, kInf};
    const auto probs = tsne::conditional_probabilities(row, 0, 1.3);
    CHECK(probs[0] == 0.0);
    for (std::size_t j = 1; j <= 3; ++j) CHECK(probs[j] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(probs[4] == 0.0);
    CHECK(probs[5] == 0.0);
}

TEST_CASE("conditional_probabilities: huge sigma flattens to uniform") {
    const std::vector<double> row{0.0, 1.0, 9.0, 25.0, 2.0};
    const double sigma = 1e6 * 5.0;  // 1e6 times the largest distance
    const auto probs = tsne::conditional_probabilities(row, 0, sigma);
    for (std::size_t j = 1; j < row.size(); ++j) {
        CHECK(probs[j] == doctest::Approx(0.25).epsilon(1e-6));
    }
}

TEST_CASE("conditional_probabilities: direct evaluation of the Gaussian kernel") {
    // Distances^2 (1, 4) from point 0 with sigma = 1.
    const std::vector<double> row{0.0, 1.0, 4.0};
    const auto probs = tsne::conditional_probabilities(row, 0, 1.0);
    const double w1 = std::exp(-0.5), w2 = std::exp(-2.0);
    CHECK(probs[1] == doctest::Approx(w1 / (w1 + w2)).epsilon(1e-12));
    CHECK(probs[2] == doctest::Approx(w2 / (w1 + w2)).epsilon(1e-12));
    CHECK(probs[1] + probs[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conditional_probabilities: large distances do not overflow to NaN") {
    const std::vector<double> row{0.0, 1e8, 1.00001e8, 1.2e8};
    const auto probs = tsne::conditional_probabilities(row, 0, 1.0);
    double total = 0.0;
    for (double p : probs) {
        CHECK(std::isfinite(p));
        total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conditional_probabilities: all-infinite row is rejected") {
    const std::vector<double> row{0.0, kInf, kInf};
    CHECK_THROWS_WITH_AS(tsne::conditional_probabilities(row, 0, 1.0),
                         doctest::Contains("degenerate"), std::runtime_error);
}

TEST_CASE("calibrate_sigmas: mutually equidistant points achieve perplexity n - 1") {
    const std::size_t n = 6;
    Matrix sq(n, n, 9.0);
    for (std::size_t i = 0; i < n; ++i) sq(i, i) = 0.0;
    const auto sigmas = tsne::calibrate_sigmas(sq, static_cast<double>(n - 1));
    for (std::size_t i = 0; i < n; ++i) {
        const auto probs = tsne::conditional_probabilities(sq.row(i), i, sigmas[i]);
        CHECK(tsne::row_perplexity(probs, i) ==
              doctest::Approx(static_cast<double>(n - 1)).epsilon(1e-9));
    }
}

TEST_CASE("calibrate_sigmas: far-apart clusters keep conditional mass at home") {
    const auto data = testsupport::make_blobs(2, 10, 3, 100.0, 1.0, 5);
    Matrix sq = squared_distances(data.features);
    tsne::apply_duplicate_floor(sq);
    const auto sigmas = tsne::calibrate_sigmas(sq, 5.0);
    for (std::size_t i = 0; i < 20; ++i) {
        const auto probs = tsne::conditional_probabilities(sq.row(i), i, sigmas[i]);
        double home = 0.0;
        for (std::size_t j = 0; j < 20; ++j) {
            if (data.labels.ids[j] == data.labels.ids[i]) home += probs[j];
        }
        CHECK(home >= 0.99);
    }
}

TEST_CASE("calibrate_sigmas: achieved perplexity within 1e-3 on a blob set") {
    const auto data = testsupport::make_blobs(4, 50, 10, 8.0, 1.0, 6);
    Matrix sq = squared_distances(data.features);
    tsne::apply_duplicate_floor(sq);
    const auto sigmas = tsne::calibrate_sigmas(sq, 30.0);
    for (std::size_t i = 0; i < 200; ++i) {
        const auto probs = tsne::conditional_probabilities(sq.row(i), i, sigmas[i]);
        CHECK(std::abs(tsne::row_perplexity(probs, i) - 30.0) <= 1e-3);
    }
}

TEST_CASE("calibrate_sigmas rejects out-of-range perplexity") {
    Matrix sq(5, 5, 1.0);
    for (std::size_t i = 0; i < 5; ++i) sq(i, i) = 0.0;
    CHECK_THROWS_AS(tsne::calibrate_sigmas(sq, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(tsne::calibrate_sigmas(sq, 5.0), std::invalid_argument);
}

TEST_CASE("apply_duplicate_floor raises only zero off-diagonal entries") {
    Matrix sq(3, 3);
    sq(0, 1) = sq(1, 0) = 0.0;
    sq(0, 2) = sq(2, 0) = 4.0;
    sq(1, 2) = sq(2, 1) = 4.0;
    tsne::apply_duplicate_floor(sq);
    CHECK(sq(0, 1) == 1e-12);
    CHECK(sq(0, 2) == 4.0);
    CHECK(sq(0, 0) == 0.0);
}

TEST_CASE("joint_affinities symmetrizes and normalizes") {
    SUBCASE("already-symmetric conditionals give p_ij = p_{j|i} / n") {
        const std::size_t n = 4;
        Matrix cond(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) cond(i, j) = 1.0 / 3.0;
            }
        }
        const Matrix p = tsne::joint_affinities(cond);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) CHECK(p(i, j) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
            }
        }
    }

    SUBCASE("n = 2 forces the single pair to carry all mass") {
        Matrix cond(2, 2);
        cond(0, 1) = 1.0;
        cond(1, 0) = 1.0;
        const Matrix p = tsne::joint_affinities(cond);
        CHECK(p(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("random conditionals: total mass 1, exact symmetry") {
        const std::size_t n = 5;
        Matrix sq = squared_distances(testsupport::random_matrix(n, 3, 7));
        const auto sigmas = tsne::calibrate_sigmas(sq, 3.0);
        const Matrix p = tsne::joint_affinities(tsne::conditional_matrix(sq, sigmas));
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(p(i, j) == p(j, i));
                total += p(i, j);
            }
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("low_dim_affinities basics") {
    SUBCASE("n = 2: the pair has q = 1/2 regardless of separation") {
        Matrix y(2, 2, {0.0, 0.0, 123.0, -9.0});
        const Matrix q = tsne::low_dim_affinities(y);
        CHECK(q(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(q(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("equilateral triangle: all off-diagonal q equal 1/6") {
        const double h = std::sqrt(3.0) / 2.0;
        Matrix y(3, 2, {0.0, 0.0, 1.0, 0.0, 0.5, h});
        const Matrix q = tsne::low_dim_affinities(y);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                if (i != j) CHECK(q(i, j) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
            }
        }
    }

    SUBCASE("random configuration matches the brute-force double loop") {
        const Matrix y = testsupport::random_matrix(5, 2, 11, -2.0, 2.0);
        const Matrix q = tsne::low_dim_affinities(y);
        double z = 0.0;
        for (std::size_t k = 0; k < 5; ++k) {
            for (std::size_t l = 0; l < 5; ++l) {
                if (k == l) continue;
                double sq = 0.0;
                for (std::size_t c = 0; c < 2; ++c) {
                    const double diff = y(k, c) - y(l, c);
                    sq += diff * diff;
                }
                z += 1.0 / (1.0 + sq);
            }
        }
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                if (i == j) continue;
                double sq = 0.0;
                for (std::size_t c = 0; c < 2; ++c) {
                    const double diff = y(i, c) - y(j, c);
                    sq += diff * diff;
                }
                CHECK(std::abs(q(i, j) - (1.0 / (1.0 + sq)) / z) <= 1e-12);
            }
        }
    }
}

TEST_CASE("kl_cost identities and hand value") {
    const Matrix p = testsupport::random_affinity(6, 13);
    CHECK(tsne::kl_cost(p, p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    // Uniform vs uniform.
    const std::size_t n = 4;
    Matrix uniform(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) uniform(i, j) = 1.0 / static_cast<double>(n * n - n);
        }
    }
    CHECK(tsne::kl_cost(uniform, uniform) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    // Two-pair distributions {0.7, 0.3} vs {0.5, 0.5}: matrices with two
    // symmetric pairs carrying the mass.
    Matrix p2(3, 3), q2(3, 3);
    p2(0, 1) = p2(1, 0) = 0.35;
    p2(0, 2) = p2(2, 0) = 0.15;
    q2(0, 1) = q2(1, 0) = 0.25;
    q2(0, 2) = q2(2, 0) = 0.25;
    const double expected = 0.7 * std::log(1.4) + 0.3 * std::log(0.6);
    CHECK(tsne::kl_cost(p2, q2) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.08228).epsilon(1e-4));
}

TEST_CASE("kl_cost is non-negative on random affinity pairs") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix p = testsupport::random_affinity(7, 100 + seed);
        const Matrix q = testsupport::random_affinity(7, 200 + seed);
        CHECK(tsne::kl_cost(p, q) >= -1e-12);
    }
}

TEST_CASE("gradient vanishes when P equals Q") {
    const Matrix y = testsupport::random_matrix(6, 2, 17, -1.0, 1.0);
    const Matrix q = tsne::low_dim_affinities(y);
    const Matrix grad = tsne::gradient(q, q, y);
    for (double g : grad.values()) CHECK(std::abs(g) <= 1e-12);
}

TEST_CASE("gradient components sum to zero (translation invariance)") {
    const Matrix y = testsupport::random_matrix(8, 2, 19, -2.0, 2.0);
    const Matrix p = testsupport::random_affinity(8, 23);
    const Matrix q = tsne::low_dim_affinities(y);
    const Matrix grad = tsne::gradient(p, q, y);
    for (std::size_t c = 0; c < 2; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < 8; ++i) sum += grad(i, c);
        CHECK(std::abs(sum) <= 1e-10);
    }
}

TEST_CASE("gradient matches central finite differences of the KL cost") {
    const std::size_t n = 6;
    const Matrix p = testsupport::random_affinity(n, 29);
    Matrix y = testsupport::random_matrix(n, 2, 31, -1.5, 1.5);

    const Matrix analytic = tsne::gradient(p, tsne::low_dim_affinities(y), y);
    const double h = 1e-5;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 2; ++c) {
            const double saved = y(i, c);
            y(i, c) = saved + h;
            const double up = tsne::kl_cost(p, tsne::low_dim_affinities(y));
            y(i, c) = saved - h;
            const double down = tsne::kl_cost(p, tsne::low_dim_affinities(y));
            y(i, c) = saved;
            const double fd = (up - down) / (2.0 * h);
            const double scale = std::max({std::abs(fd), std::abs(analytic(i, c)), 1e-8});
            CHECK(std::abs(analytic(i, c) - fd) / scale <= 1e-4);
        }
    }
}

TEST_CASE("check_affinity rejects broken matrices") {
    Matrix ok = testsupport::random_affinity(4, 37);
    CHECK_NOTHROW(tsne::check_affinity(ok, "test"));

    Matrix diag = ok;
    diag(1, 1) = 1e-3;
    CHECK_THROWS_AS(tsne::check_affinity(diag, "test"), std::logic_error);

    Matrix asym = ok;
    asym(0, 1) += 1e-6;
    CHECK_THROWS_AS(tsne::check_affinity(asym, "test"), std::logic_error);

    Matrix heavy = ok;
    for (double& v : heavy.values()) v *= 1.5;
    CHECK_THROWS_AS(tsne::check_affinity(heavy, "test"), std::logic_error);
}

TEST_CASE("tsne::validate enforces config invariants") {
    tsne::Config config;
    CHECK_NOTHROW(tsne::validate(config, 100));
    CHECK_THROWS_AS(tsne::validate(config, 20), std::invalid_argument);  // perplexity >= n

    tsne::Config bad = config;
    bad.perplexity = 1.0;
    CHECK_THROWS_AS(tsne::validate(bad, 100), std::invalid_argument);

    bad = config;
    bad.exaggeration_iters = bad.iterations + 1;
    CHECK_THROWS_AS(tsne::validate(bad, 100), std::invalid_argument);

    bad = config;
    bad.momentum_final = 1.0;
    CHECK_THROWS_AS(tsne::validate(bad, 100), std::invalid_argument);

    bad = config;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(tsne::validate(bad, 100), std::invalid_argument);
}

TEST_CASE("tsne::run separates three well-separated blobs") {
    const auto data = testsupport::make_blobs(3, 50, 10, 10.0, 1.0, 42);
    tsne::Config config;
    config.perplexity = 20.0;
    config.iterations = 1000;
    config.seed = 3;
    const Embedding emb = tsne::run(data.features, data.labels, config);
    CHECK(emb.coords.rows() == 150);
    CHECK(emb.coords.cols() == 2);
    CHECK(metrics::silhouette(emb) >= 0.7);
}

TEST_CASE("tsne::run is deterministic: same seed, bit-identical embedding") {
    const auto data = testsupport::make_blobs(3, 20, 5, 8.0, 1.0, 15);
    tsne::Config config;
    config.perplexity = 10.0;
    config.iterations = 150;
    config.seed = 99;
    const Embedding a = tsne::run(data.features, data.labels, config);
    const Embedding b = tsne::run(data.features, data.labels, config);
    CHECK(a.coords.values() == b.coords.values());

    tsne::Config other = config;
    other.seed = 100;
    const Embedding c = tsne::run(data.features, data.labels, other);
    CHECK(a.coords.values() != c.coords.values());
}

TEST_CASE("tsne::run keeps the embedding centroid at the origin every iteration") {
    const auto data = testsupport::make_blobs(2, 15, 4, 6.0, 1.0, 21);
    tsne::Config config;
    config.perplexity = 8.0;
    config.iterations = 60;
    config.exaggeration_iters = 20;
    config.seed = 4;
    std::size_t iterations_seen = 0;
    tsne::run(data.features, data.labels, config, std::nullopt, DistanceKind::Euclidean,
              [&](std::size_t, const Matrix& y) {
                  ++iterations_seen;
                  for (std::size_t c = 0; c < y.cols(); ++c) {
                      double mean = 0.0;
                      for (std::size_t i = 0; i < y.rows(); ++i) mean += y(i, c);
                      CHECK(std::abs(mean / static_cast<double>(y.rows())) <= 1e-9);
                  }
              });
    CHECK(iterations_seen == 60);
}

TEST_CASE("tsne::run KL cost is non-increasing over the last 100 iterations") {
    const auto data = testsupport::make_blobs(3, 50, 10, 10.0, 1.0, 42);
    tsne::Config config;
    config.perplexity = 20.0;
    config.iterations = 600;
    config.seed = 3;

    // Rebuild P the way run() does, for cost evaluation at observed iterates.
    Matrix sq = squared_distances(data.features);
    tsne::apply_duplicate_floor(sq);
    const auto sigmas = tsne::calibrate_sigmas(sq, config.perplexity);
    const Matrix p = tsne::joint_affinities(tsne::conditional_matrix(sq, sigmas));

    std::vector<double> costs;
    tsne::run(data.features, data.labels, config, std::nullopt, DistanceKind::Euclidean,
              [&](std::size_t iter, const Matrix& y) {
                  if (iter + 100 >= config.iterations) {
                      costs.push_back(tsne::kl_cost(p, tsne::low_dim_affinities(y)));
                  }
              });
    REQUIRE(costs.size() == 100);
    for (std::size_t i = 1; i < costs.size(); ++i) {
        CHECK(costs[i] <= costs[i - 1]);
    }
}

TEST_CASE("tsne::run is bit-identical across thread budgets") {
    const auto data = testsupport::make_blobs(3, 25, 6, 8.0, 1.0, 51);
    tsne::Config config;
    config.perplexity = 10.0;
    config.iterations = 120;
    config.exaggeration_iters = 40;
    config.seed = 8;

    setenv("PROJLAB_THREADS", "1", 1);
    const Embedding serial = tsne::run(data.features, data.labels, config);
    setenv("PROJLAB_THREADS", "4", 1);
    const Embedding threaded = tsne::run(data.features, data.labels, config);
    unsetenv("PROJLAB_THREADS");
    CHECK(serial.coords.values() == threaded.coords.values());
}

TEST_CASE("tsne::run with duplicate points still calibrates") {
    DataMatrix x(6, 2, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0});
    LabelVector labels{{0, 0, 0, 1, 1, 1}, {"a", "b"}};
    tsne::Config config;
    config.perplexity = 2.0;
    config.iterations = 50;
    config.exaggeration_iters = 20;
    CHECK_NOTHROW(tsne::run(x, labels, config));
}

TEST_CASE("tsne::run accepts cosine distances and PCA preprocessing") {
    const auto data = testsupport::make_blobs(2, 20, 6, 8.0, 1.0, 33);
    tsne::Config config;
    config.perplexity = 10.0;
    config.iterations = 100;

    const Embedding cosine =
        tsne::run(data.features, data.labels, config, std::nullopt, DistanceKind::Cosine);
    CHECK(cosine.coords.all_finite());

    const Embedding reduced = tsne::run(data.features, data.labels, config, 3);
    CHECK(reduced.coords.all_finite());

    CHECK_THROWS_AS(tsne::run(data.features, data.labels, config, 7), std::invalid_argument);
}
