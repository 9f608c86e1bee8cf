#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "censorpred/embeddings.hpp"
#include "censorpred/models.hpp"
#include "censorpred/random.hpp"
#include "censorpred/tokenizer.hpp"

using namespace censorpred;

namespace {

SquareMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = uniform_real(rng) - 0.5;
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

void BM_Jacobi(benchmark::State& state) {
    const auto m = random_symmetric(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigenvalues(m));
}
BENCHMARK(BM_Jacobi)->Arg(8)->Arg(40)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_EigenFeaturesGram(benchmark::State& state) {
    Rng rng(2);
    const std::size_t dim = 200;
    EmbeddingTable table(dim);
    for (int w = 0; w < 500; ++w) {
        std::vector<double> v(dim);
        for (auto& x : v) x = uniform_real(rng) - 0.5;
        table.set("w" + std::to_string(w), v);
    }
    std::vector<Token> doc;
    for (int i = 0; i < state.range(0); ++i) doc.push_back({"w" + std::to_string(uniform_index(rng, 500)), "n"});
    for (auto _ : state) benchmark::DoNotOptimize(eigen_features(doc, table, {.k = 40}));
}
BENCHMARK(BM_EigenFeaturesGram)->Arg(20)->Arg(80)->Unit(benchmark::kMicrosecond);

void BM_SmoTrain(benchmark::State& state) {
    Rng rng(3);
    FeatureMatrix m;
    const std::size_t d = 50;
    for (std::size_t c = 0; c < d; ++c) {
        m.names.push_back("f" + std::to_string(c));
        m.groups.push_back(FeatureGroup::Linguistic);
    }
    for (int i = 0; i < state.range(0); ++i) {
        const bool c = i % 2 == 0;
        std::vector<double> row(d);
        for (auto& x : row) x = uniform_real(rng) + (c ? 0.1 : 0.0);
        m.ids.push_back(std::to_string(i));
        m.labels.push_back(c ? Label::Censored : Label::Uncensored);
        m.rows.push_back(row);
    }
    for (auto _ : state) benchmark::DoNotOptimize(svm_train(m));
}
BENCHMARK(BM_SmoTrain)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Segment(benchmark::State& state) {
    SegmenterDictionary dict;
    const char* words[] = {"我们", "今天", "天气", "政府", "污染", "空气", "问题", "一个", "没有", "人民"};
    for (const auto* w : words) dict.add(w, 1.0, "n");
    std::string text;
    Rng rng(4);
    for (int i = 0; i < 200; ++i) text += words[uniform_index(rng, 10)];
    for (auto _ : state) benchmark::DoNotOptimize(segment(text, dict));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Segment);

}  // namespace

BENCHMARK_MAIN();
