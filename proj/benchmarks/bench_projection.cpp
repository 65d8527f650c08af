#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "projlab/dataset.hpp"
#include "projlab/lsp.hpp"
#include "projlab/metrics.hpp"
#include "projlab/numerics.hpp"
#include "projlab/tsne.hpp"

using namespace projlab;

namespace {

DataMatrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    DataMatrix x(n, d);
    for (double& v : x.values()) {
        v = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    }
    return x;
}

LabelVector cyclic_labels(std::size_t n, std::size_t classes) {
    std::vector<int> ids(n);
    std::vector<std::string> names;
    for (std::size_t c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(i % classes);
    return LabelVector{std::move(ids), std::move(names)};
}

}  // namespace

static void PairwiseDistances(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DataMatrix x = random_points(n, 32, 1);
    for (auto _ : state) {
        DistanceMatrix d = pairwise_distances(x, DistanceKind::Euclidean);
        benchmark::DoNotOptimize(d);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(PairwiseDistances)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

static void SigmaCalibration(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DataMatrix x = random_points(n, 16, 2);
    const DistanceMatrix d = pairwise_distances(x, DistanceKind::Euclidean);
    Matrix sq(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sq(i, j) = d(i, j) * d(i, j);
    }
    tsne::apply_duplicate_floor(sq);
    for (auto _ : state) {
        auto sigmas = tsne::calibrate_sigmas(sq, 30.0);
        benchmark::DoNotOptimize(sigmas);
    }
}
BENCHMARK(SigmaCalibration)->Arg(256)->Arg(512);

static void TsneIterationStep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix y = random_points(n, 2, 3);
    const Matrix q = tsne::low_dim_affinities(y);
    for (auto _ : state) {
        Matrix next_q = tsne::low_dim_affinities(y);
        Matrix grad = tsne::gradient(q, next_q, y);
        benchmark::DoNotOptimize(grad);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(TsneIterationStep)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

static void KMedoids(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DataMatrix x = random_points(n, 8, 4);
    const DistanceMatrix d = pairwise_distances(x, DistanceKind::Euclidean);
    for (auto _ : state) {
        MedoidAssignment assignment = k_medoids(d, 25, 7);
        benchmark::DoNotOptimize(assignment);
    }
}
BENCHMARK(KMedoids)->Arg(512)->Arg(1024);

static void LspSolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DataMatrix x = random_points(n, 8, 5);
    const LabelVector labels = cyclic_labels(n, 10);
    lsp::Config config;
    config.control_points = 25;
    config.neighbors = 10;
    config.seed = 1;
    for (auto _ : state) {
        Embedding emb = lsp::run(x, labels, config);
        benchmark::DoNotOptimize(emb);
    }
}
BENCHMARK(LspSolve)->Arg(256)->Arg(512);

static void SilhouetteScore(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Embedding emb{random_points(n, 2, 6), cyclic_labels(n, 10)};
    for (auto _ : state) {
        const double score = metrics::silhouette(emb);
        benchmark::DoNotOptimize(score);
    }
}
BENCHMARK(SilhouetteScore)->Arg(512)->Arg(1024);

BENCHMARK_MAIN();
