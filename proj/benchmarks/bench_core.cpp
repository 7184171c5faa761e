#include "polyret/dense_store.hpp"
#include "polyret/evalkit.hpp"
#include "polyret/fusion.hpp"
#include "polyret/sparse_index.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace polyret;

namespace {

std::string docid(std::size_t i) { return "d" + std::to_string(i); }

std::vector<Document> synthetic_corpus(std::size_t docs, std::size_t vocab, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
    std::uniform_int_distribution<std::size_t> length(20, 120);
    std::vector<Document> out;
    out.reserve(docs);
    for (std::size_t i = 0; i < docs; ++i) {
        std::string text;
        for (std::size_t n = length(rng); n > 0; --n) {
            text += "w" + std::to_string(word(rng)) + " ";
        }
        out.push_back({docid(i), "", std::move(text)});
    }
    return out;
}

Run random_run(std::size_t queries, std::size_t depth, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> score(0.0, 10.0);
    Run run;
    run.tag = "bench";
    for (std::size_t q = 0; q < queries; ++q) {
        auto &list = run.entries["q" + std::to_string(q)];
        for (std::size_t i = 0; i < depth; ++i) {
            list.push_back({docid(rng() % (depth * 4)), score(rng)});
        }
        std::sort(list.begin(), list.end(), [](auto const &a, auto const &b) { return a.docid < b.docid; });
        list.erase(std::unique(list.begin(), list.end(), [](auto const &a, auto const &b) { return a.docid == b.docid; }),
                   list.end());
    }
    run.canonicalize();
    return run;
}

void BM_IndexBuild(benchmark::State &state)
{
    auto const docs = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 5000, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_index(docs, ScriptPolicy::whitespace));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IndexBuild)->Arg(1000)->Arg(10000);

void BM_Bm25Search(benchmark::State &state)
{
    auto const index = build_index(synthetic_corpus(static_cast<std::size_t>(state.range(0)), 5000, 2),
                                   ScriptPolicy::whitespace);
    std::size_t i = 0;
    for (auto _ : state) {
        auto query = "w" + std::to_string(i % 5000) + " w" + std::to_string((i * 7) % 5000) + " w17";
        benchmark::DoNotOptimize(bm25_search(index, query, 100));
        ++i;
    }
}
BENCHMARK(BM_Bm25Search)->Arg(10000)->Arg(50000);

void BM_DenseSearch(benchmark::State &state)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<float> noise;
    std::size_t const dim = 768;
    EmbeddingStore docs;
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        std::vector<float> v(dim);
        for (auto &x : v) {
            x = noise(rng);
        }
        docs.add(docid(static_cast<std::size_t>(i)), v);
    }
    std::vector<float> query(dim);
    for (auto &x : query) {
        x = noise(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(dense_search(docs, query, 100));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DenseSearch)->Arg(10000)->Arg(50000);

void BM_Fuse(benchmark::State &state)
{
    auto const depth = static_cast<std::size_t>(state.range(0));
    std::vector<Run> runs = {normalize_run(random_run(100, depth, 4)), normalize_run(random_run(100, depth, 5))};
    std::vector<double> weights = {0.5, 0.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(fuse(runs, weights));
    }
}
BENCHMARK(BM_Fuse)->Arg(100)->Arg(1000);

void BM_Ndcg(benchmark::State &state)
{
    auto const run = random_run(1000, 100, 6);
    JudgmentSet qrels;
    std::mt19937_64 rng(7);
    for (std::size_t q = 0; q < 1000; ++q) {
        auto const first = rng() % 80;
        for (std::size_t j = 0; j < 5; ++j) {
            qrels.add("q" + std::to_string(q), docid(first + j * 80), static_cast<int>(rng() % 2));
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(ndcg_at_k(run, qrels, 10));
    }
}
BENCHMARK(BM_Ndcg);

} // namespace

BENCHMARK_MAIN();
