#include "polyret/ensemble.hpp"
#include "polyret/error.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace polyret;

namespace {

std::vector<std::string> docids(RankedList const &list)
{
    std::vector<std::string> out;
    for (auto const &e : list) {
        out.push_back(e.docid);
    }
    return out;
}

CorrelationMatrix matrix(std::size_t n, std::vector<double> values)
{
    return CorrelationMatrix{n, std::move(values)};
}

} // namespace

TEST(Spearman, SelfAndReverse)
{
    std::vector<double> a = {0.1, 0.5, 0.3, 0.9};
    std::vector<double> reversed = {0.9, 0.5, 0.7, 0.1};
    EXPECT_DOUBLE_EQ(*spearman(a, a), 1.0);
    EXPECT_DOUBLE_EQ(*spearman(a, reversed), -1.0);
}

TEST(Spearman, UndefinedCases)
{
    std::vector<double> one = {1.0};
    std::vector<double> flat = {2.0, 2.0, 2.0};
    std::vector<double> rising = {1.0, 2.0, 3.0};
    EXPECT_FALSE(spearman(one, one).has_value());
    EXPECT_FALSE(spearman(flat, rising).has_value());
    std::vector<double> shorter = {1.0, 2.0};
    EXPECT_FALSE(spearman(rising, shorter).has_value());
}

TEST(Spearman, MatchesTextbookFormulaWithoutTies)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        gen::Source src(seed);
        auto const n = src.size(2, 30);
        std::vector<double> a(n);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = src.real(-1, 1);
            b[i] = src.real(-1, 1);
        }
        ASSERT_NEAR(*spearman(a, b), oracle::spearman_distinct(a, b), 1e-12) << "seed " << seed;
    }
}

TEST(Spearman, MatchesAverageRankOracleWithTies)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        gen::Source src(seed);
        auto const n = src.size(3, 20);
        std::vector<double> a(n);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = static_cast<double>(src.size(0, 4));
            b[i] = static_cast<double>(src.size(0, 4));
        }
        auto const got = spearman(a, b);
        if (!got) {
            continue;
        }
        ASSERT_NEAR(*got, oracle::spearman_with_ties(a, b), 1e-12) << "seed " << seed;
    }
}

TEST(CorrelationMatrix, IdenticalRunsCorrelatePerfectly)
{
    gen::Source src(5);
    polyret::Run run;
    for (std::size_t i = 0; i < 10; ++i) {
        run.entries["q"].push_back({gen::id('d', i), static_cast<double>(i)});
    }
    run.canonicalize();
    std::vector<polyret::Run> runs = {run, run};
    auto corr = correlation_matrix(runs);
    EXPECT_EQ(corr.size, 2u);
    EXPECT_DOUBLE_EQ(corr(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(corr(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(corr.off_diagonal_mean(0), 1.0);

    EnsembleConfig config{{1.0, 1.0}, 0.5};
    auto weights = adjust_weights(config, corr);
    EXPECT_DOUBLE_EQ(weights[0], 0.5);
    EXPECT_DOUBLE_EQ(weights[1], 0.5);
}

TEST(CorrelationMatrix, ErrorsAndUnusableQueries)
{
    polyret::Run a;
    a.entries["q1"] = {{"d1", 1.0}, {"d2", 0.5}};
    polyret::Run b;
    b.entries["q2"] = {{"d1", 1.0}, {"d2", 0.5}};
    std::vector<polyret::Run> one = {a};
    EXPECT_THROW((void)correlation_matrix(one), InvalidArgument);
    std::vector<polyret::Run> disjoint = {a, b};
    EXPECT_THROW((void)correlation_matrix(disjoint), DataError);

    polyret::Run c;
    c.entries["q1"] = {{"d1", 1.0}, {"d9", 0.5}};
    std::vector<polyret::Run> thin = {a, c};
    EXPECT_EQ(correlation_matrix(thin)(0, 1), 0.0);
}

TEST(AdjustWeights, LambdaZeroKeepsBaseShares)
{
    auto corr = matrix(3, {1, 0.8, 0.4, 0.8, 1, 0.0, 0.4, 0.0, 1});
    EnsembleConfig config{{0.802, 0.792, 0.730}, 0.0};
    auto weights = adjust_weights(config, corr);
    double const total = 0.802 + 0.792 + 0.730;
    EXPECT_NEAR(weights[0], 0.802 / total, 1e-15);
    EXPECT_NEAR(weights[1], 0.792 / total, 1e-15);
    EXPECT_NEAR(weights[2], 0.730 / total, 1e-15);
}

TEST(AdjustWeights, HandComputedPenalty)
{
    // Mean off-diagonal correlations 0.6, 0.4 and 0.2.
    auto corr = matrix(3, {1, 0.8, 0.4, 0.8, 1, 0.0, 0.4, 0.0, 1});
    EnsembleConfig config{{0.802, 0.792, 0.730}, 0.5};
    auto weights = adjust_weights(config, corr);
    // Raw 0.5614, 0.6336, 0.657; total 1.852.
    EXPECT_NEAR(weights[0], 0.5614 / 1.852, 1e-12);
    EXPECT_NEAR(weights[1], 0.6336 / 1.852, 1e-12);
    EXPECT_NEAR(weights[2], 0.657 / 1.852, 1e-12);
}

TEST(AdjustWeights, NegativeCorrelationIsNotRewarded)
{
    auto corr = matrix(2, {1, -0.7, -0.7, 1});
    EnsembleConfig config{{0.3, 0.7}, 1.0};
    auto weights = adjust_weights(config, corr);
    EXPECT_NEAR(weights[0], 0.3, 1e-15);
    EXPECT_NEAR(weights[1], 0.7, 1e-15);
}

TEST(AdjustWeights, FallsBackWhenEverythingIsDamped)
{
    auto corr = matrix(2, {1, 1, 1, 1});
    EnsembleConfig config{{1.0, 3.0}, 1.0};
    auto weights = adjust_weights(config, corr);
    EXPECT_DOUBLE_EQ(weights[0], 0.25);
    EXPECT_DOUBLE_EQ(weights[1], 0.75);
}

TEST(AdjustWeights, RejectsBadConfig)
{
    auto corr = matrix(2, {1, 0, 0, 1});
    EXPECT_THROW((void)adjust_weights(EnsembleConfig{{1.0}, 0.5}, corr), InvalidArgument);
    EXPECT_THROW((void)adjust_weights(EnsembleConfig{{1.0, 1.0}, 1.5}, corr), InvalidArgument);
    EXPECT_THROW((void)adjust_weights(EnsembleConfig{{0.0, 0.0}, 0.5}, corr), InvalidArgument);
    EXPECT_THROW((void)adjust_weights(EnsembleConfig{{-1.0, 2.0}, 0.5}, corr), InvalidArgument);
}

TEST(AdjustWeights, RaisingLambdaNeverHelpsTheMostCorrelatedRun)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        gen::Source src(seed);
        auto const n = src.size(2, 5);
        std::vector<polyret::Run> runs;
        for (std::size_t i = 0; i < n; ++i) {
            runs.push_back(gen::run(src, 4, 15, 15, "r" + std::to_string(i)));
        }
        auto const corr = correlation_matrix(runs);
        std::size_t top = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (corr.off_diagonal_mean(i) > corr.off_diagonal_mean(top)) {
                top = i;
            }
        }
        std::vector<double> base(n);
        for (auto &w : base) {
            w = src.real(0.1, 1.0);
        }
        double const lo = src.real(0.0, 1.0);
        double const hi = src.real(lo, 1.0);
        auto const before = adjust_weights(EnsembleConfig{base, lo}, corr);
        auto const after = adjust_weights(EnsembleConfig{base, hi}, corr);
        ASSERT_LE(after[top], before[top] + 1e-12) << "seed " << seed;
    }
}

TEST(EnsembleRuns, CopiesReproduceTheRanking)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        gen::Source src(seed);
        auto const run = gen::run(src, 3, 20, 20);
        auto const copies = src.size(1, 5);
        std::vector<polyret::Run> runs(copies, run);
        std::vector<double> weights(copies, 1.0 / static_cast<double>(copies));
        auto const merged = ensemble_runs(runs, weights);
        EXPECT_EQ(merged.tag, "ensemble");
        for (auto const &[qid, list] : run.entries) {
            ASSERT_EQ(docids(merged.entries.at(qid)), docids(list)) << "seed " << seed;
        }
    }
}

TEST(EnsembleRuns, ZeroWeightRunIsIgnored)
{
    polyret::Run a;
    a.entries["q"] = {{"d1", 3.0}, {"d2", 2.0}};
    polyret::Run b;
    b.entries["q"] = {{"d3", 9.0}, {"d2", 1.0}};
    std::vector<polyret::Run> runs = {a, b};
    std::vector<double> weights = {1.0, 0.0};
    auto merged = ensemble_runs(runs, weights);
    EXPECT_EQ(docids(merged.entries.at("q")), (std::vector<std::string>{"d1", "d2"}));
}
