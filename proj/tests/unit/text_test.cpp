#include "polyret/error.hpp"
#include "polyret/text.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace polyret;

TEST(Tokenize, FoldsCaseAndSplitsPunctuation)
{
    EXPECT_EQ(tokenize("The Quick, quick fox", ScriptPolicy::whitespace),
              (TokenStream{"the", "quick", "quick", "fox"}));
}

TEST(Tokenize, EmptyInput)
{
    EXPECT_TRUE(tokenize("", ScriptPolicy::whitespace).empty());
    EXPECT_TRUE(tokenize("", ScriptPolicy::unigram).empty());
    EXPECT_TRUE(tokenize("", ScriptPolicy::automatic).empty());
}

TEST(Tokenize, CjkUnigrams)
{
    EXPECT_EQ(tokenize("北京市", ScriptPolicy::unigram), (TokenStream{"北", "京", "市"}));
    EXPECT_EQ(tokenize("北京市", ScriptPolicy::automatic), (TokenStream{"北", "京", "市"}));
}

TEST(Tokenize, WhitespacePolicyKeepsHanRuns)
{
    EXPECT_EQ(tokenize("北京市 abc", ScriptPolicy::whitespace), (TokenStream{"北京市", "abc"}));
}

TEST(Tokenize, MixedScriptsUnderUnigram)
{
    EXPECT_EQ(tokenize("Tokyo東京2024", ScriptPolicy::unigram), (TokenStream{"tokyo", "東", "京", "2024"}));
}

TEST(Tokenize, CyrillicAndDiacritics)
{
    EXPECT_EQ(tokenize("Привет, МИР!", ScriptPolicy::whitespace), (TokenStream{"привет", "мир"}));
    EXPECT_EQ(tokenize("Café naïve", ScriptPolicy::whitespace), (TokenStream{"café", "naïve"}));
}

TEST(Tokenize, InvalidUtf8ActsAsSeparator)
{
    std::string text = "ab";
    text += static_cast<char>(0xFF);
    text += "cd";
    EXPECT_EQ(tokenize(text, ScriptPolicy::whitespace), (TokenStream{"ab", "cd"}));
}

TEST(Tokenize, SpansPointIntoSource)
{
    std::string const text = "Hello, wide 世界";
    for (auto const &span : tokenize_spans(text, ScriptPolicy::unigram)) {
        ASSERT_LT(span.begin, span.end);
        ASSERT_LE(span.end, text.size());
        EXPECT_EQ(tokenize(text.substr(span.begin, span.end - span.begin), ScriptPolicy::unigram),
                  TokenStream{span.token});
    }
}

TEST(Tokenize, AutoPolicyFollowsMajorityScript)
{
    EXPECT_EQ(resolve_policy("hello world", ScriptPolicy::automatic), ScriptPolicy::whitespace);
    EXPECT_EQ(resolve_policy("你好世界 ok", ScriptPolicy::automatic), ScriptPolicy::unigram);
    EXPECT_EQ(resolve_policy("hello", ScriptPolicy::unigram), ScriptPolicy::unigram);
}

TEST(Tokenize, NeverEmitsEmptyTokens)
{
    gen::Source src(7);
    std::string const alphabet[] = {"a", "B", " ", ",", "é", "中", "ก", "\t", "-", "1", "ß", "\xCC\x81"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        auto const n = src.size(0, 30);
        for (std::size_t i = 0; i < n; ++i) {
            text += alphabet[src.size(0, std::size(alphabet) - 1)];
        }
        for (auto policy : {ScriptPolicy::whitespace, ScriptPolicy::unigram, ScriptPolicy::automatic}) {
            for (auto const &tok : tokenize(text, policy)) {
                ASSERT_FALSE(tok.empty()) << "text: " << text;
            }
        }
    }
}

TEST(ScriptPolicyName, RoundTrips)
{
    for (auto policy : {ScriptPolicy::whitespace, ScriptPolicy::unigram, ScriptPolicy::automatic}) {
        EXPECT_EQ(parse_script_policy(to_string(policy)), policy);
    }
    EXPECT_THROW((void)parse_script_policy("bigram"), InvalidArgument);
}

TEST(Utf8, Validity)
{
    EXPECT_TRUE(is_valid_utf8("plain"));
    EXPECT_TRUE(is_valid_utf8("Ελληνικά 中文"));
    EXPECT_FALSE(is_valid_utf8("\xC3"));
    EXPECT_FALSE(is_valid_utf8("\xC0\xAF"));
    EXPECT_FALSE(is_valid_utf8("\xED\xA0\x80"));
}

TEST(Strings, TrimAndSplit)
{
    EXPECT_EQ(trim("  a b \t\r\n"), "a b");
    EXPECT_EQ(trim(""), "");
    EXPECT_EQ(split_whitespace(" q1  Q0\td1 "), (std::vector<std::string_view>{"q1", "Q0", "d1"}));
    EXPECT_EQ(split_on("a\t\tb", '\t'), (std::vector<std::string_view>{"a", "", "b"}));
}

TEST(Numbers, ShortestRoundTrip)
{
    gen::Source src(11);
    for (int trial = 0; trial < 2000; ++trial) {
        double const x = src.real(-1e6, 1e6) * std::pow(10.0, src.real(-20, 5));
        auto const text = format_real(x);
        auto const back = parse_real(text);
        ASSERT_TRUE(back.has_value()) << text;
        ASSERT_EQ(*back, x) << text;
        ASSERT_EQ(format_real(*back), text);

        float const f = static_cast<float>(x);
        auto const ftext = format_real(f);
        ASSERT_EQ(parse_float(ftext), f) << ftext;
    }
    EXPECT_EQ(format_real(0.5), "0.5");
    EXPECT_EQ(format_real(1.0), "1");
}

TEST(Numbers, RejectsGarbage)
{
    EXPECT_FALSE(parse_real("x").has_value());
    EXPECT_FALSE(parse_real("1.5x").has_value());
    EXPECT_FALSE(parse_real("").has_value());
    EXPECT_FALSE(parse_float("nan").has_value());
    EXPECT_FALSE(parse_float("1e400").has_value());
    EXPECT_EQ(parse_int("-12"), -12);
    EXPECT_FALSE(parse_int("1.0").has_value());
    EXPECT_FALSE(parse_int("x").has_value());
}

TEST(Escape, RoundTripsArbitraryBytes)
{
    gen::Source src(5);
    std::string const pieces[] = {"a", "\\", "\t", "\n", "\r", "\\t", "n", " ", "é"};
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        auto const n = src.size(0, 20);
        for (std::size_t i = 0; i < n; ++i) {
            text += pieces[src.size(0, std::size(pieces) - 1)];
        }
        auto const escaped = escape_field(text);
        ASSERT_EQ(escaped.find('\t'), std::string::npos);
        ASSERT_EQ(escaped.find('\n'), std::string::npos);
        ASSERT_EQ(unescape_field(escaped), text);
    }
}
