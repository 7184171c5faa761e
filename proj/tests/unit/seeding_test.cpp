#include "polyret/seeding.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace polyret;

TEST(StableHash, MatchesFnv1aReferenceValues)
{
    EXPECT_EQ(stable_hash(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(stable_hash("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(stable_hash("foobar"), 0x85944171f73967e8ULL);
}

TEST(DeriveSeed, SeparatesStagesKeysAndSeeds)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL}) {
        for (auto stage : {"negatives", "pseudo"}) {
            for (auto key : {"q1", "q2", "q10"}) {
                EXPECT_TRUE(seen.insert(derive_seed(seed, stage, key)).second);
            }
        }
    }
    EXPECT_EQ(derive_seed(3, "negatives", "q1"), derive_seed(3, "negatives", "q1"));
    // Concatenation ambiguity must not collide.
    EXPECT_NE(derive_seed(0, "ab", "c"), derive_seed(0, "a", "bc"));
}

TEST(SeededRng, BelowStaysInRangeAndIsRoughlyUniform)
{
    SeededRng rng(99);
    std::map<std::uint64_t, int> counts;
    for (int i = 0; i < 60000; ++i) {
        auto const x = rng.below(6);
        ASSERT_LT(x, 6u);
        ++counts[x];
    }
    for (auto const &[value, count] : counts) {
        EXPECT_NEAR(count, 10000, 600) << value;
    }
    EXPECT_EQ(rng.below(1), 0u);
}

TEST(SeededRng, SameSeedSameSequence)
{
    SeededRng a(123);
    SeededRng b(123);
    for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(a.below(1000), b.below(1000));
        double const u = a.unit();
        ASSERT_EQ(u, b.unit());
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}
