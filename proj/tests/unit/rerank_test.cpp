#include "polyret/error.hpp"
#include "polyret/rerank.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace polyret;

namespace {

std::string scorer_command(std::string const &mode)
{
    return std::string("sh ") + POLYRET_FAKE_SCORER + " " + mode;
}

std::vector<PairInput> five_pairs()
{
    std::vector<PairInput> pairs;
    for (auto const *id : {"d3", "d1", "d5", "d2", "d4"}) {
        pairs.push_back({"q1", id, "query [SEP] title [SEP] body of " + std::string(id)});
    }
    return pairs;
}

} // namespace

TEST(PairInput, SplitsIntoThreeSegments)
{
    PairInput pair{"q", "d", "what is x [SEP] X [SEP] x is a letter"};
    auto seg = split_pair(pair);
    EXPECT_EQ(seg.query, "what is x");
    EXPECT_EQ(seg.title, "X");
    EXPECT_EQ(seg.body, "x is a letter");
    EXPECT_THROW((void)split_pair(PairInput{"q", "d", "no separators"}), DataError);
    EXPECT_THROW((void)split_pair(PairInput{"q", "d", "a [SEP] b [SEP] c [SEP] d"}), DataError);
}

TEST(PairInput, TokensSkipSeparators)
{
    PairInput pair{"q", "d", "a b [SEP] c [SEP] d e"};
    EXPECT_EQ(pair_tokens(pair, ScriptPolicy::whitespace), (TokenStream{"a", "b", "c", "d", "e"}));
}

TEST(BuildPairs, FormatsQueryTitleBody)
{
    CandidatePool pool;
    pool.k = 2;
    pool.lists["q1"] = {{"d1", 2.0}, {"d2", 1.0}};
    QueryTexts queries = {{"q1", "capital of kenya"}};
    auto docs = make_lookup({{"d1", "Nairobi", "Nairobi is the capital."}, {"d2", "", "Untitled body"}});
    auto pairs = build_pairs(pool, queries, docs);
    ASSERT_EQ(pairs.size(), 2u);
    EXPECT_EQ(pairs[0].text, "capital of kenya [SEP] Nairobi [SEP] Nairobi is the capital.");
    EXPECT_EQ(pairs[1].text, "capital of kenya [SEP]  [SEP] Untitled body");
    EXPECT_EQ(split_pair(pairs[1]).title, "");
    EXPECT_EQ(pairs[0].truncation_budget, 256u);

    pool.lists["q1"].push_back({"missing", 0.5});
    EXPECT_THROW((void)build_pairs(pool, queries, docs), DataError);
    pool.lists["q1"].pop_back();
    pool.lists["q9"] = {{"d1", 1.0}};
    EXPECT_THROW((void)build_pairs(pool, queries, docs), DataError);
}

TEST(BuildPairs, TruncatesToBudget)
{
    std::vector<std::string> body;
    for (std::size_t i = 0; i < 300; ++i) {
        body.push_back("w" + std::to_string(i));
    }
    CandidatePool pool;
    pool.lists["q"] = {{"d", 1.0}};
    QueryTexts queries = {{"q", "alpha beta"}};
    auto docs = make_lookup({{"d", "title words", gen::join(body)}});

    PairBuildOptions options;
    auto const full = build_pairs(pool, queries, docs, options);
    EXPECT_EQ(pair_tokens(full[0]).size(), 304u);

    options.truncate = true;
    auto const cut = build_pairs(pool, queries, docs, options);
    auto const tokens = pair_tokens(cut[0]);
    EXPECT_EQ(tokens.size(), 256u);
    EXPECT_EQ(tokens.back(), "w251");
    EXPECT_EQ(split_pair(cut[0]).title, "title words");

    options.budget = 0;
    EXPECT_THROW((void)build_pairs(pool, queries, docs, options), InvalidArgument);
}

TEST(LexicalScorer, WorkedValues)
{
    EXPECT_EQ(lexical_score(PairInput{"q", "d", "a b c [SEP] a [SEP] b x"}), 2.0 / 3.0);
    EXPECT_EQ(lexical_score(PairInput{"q", "d", "a a [SEP]  [SEP] a"}), 1.0);
    EXPECT_EQ(lexical_score(PairInput{"q", "d", " [SEP] a [SEP] b"}), 0.0);
    EXPECT_EQ(lexical_score(PairInput{"q", "d", "A [SEP]  [SEP] a"}), 1.0);
}

TEST(LexicalScorer, MatchesOverlapOracle)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        gen::Source src(seed);
        auto query = gen::words(src, 15, 0, 6);
        auto title = gen::words(src, 15, 0, 4);
        auto body = gen::words(src, 15, 0, 20);
        PairInput pair{"q", "d", gen::join(query) + " [SEP] " + gen::join(title) + " [SEP] " + gen::join(body)};
        std::vector<std::string> doc = title;
        doc.insert(doc.end(), body.begin(), body.end());
        EXPECT_DOUBLE_EQ(lexical_score(pair), oracle::overlap(query, doc)) << "seed " << seed;
    }
}

TEST(ScoreFileScorer, LooksUpScores)
{
    gen::TempDir dir("scores");
    {
        std::ofstream out(dir / "s.txt");
        out << "# comment\nq1 d1 0.25\nq1 d2 0.75\n";
    }
    ScoreFileScorer scorer(dir / "s.txt");
    std::vector<PairInput> pairs = {{"q1", "d2", " [SEP]  [SEP] "}, {"q1", "d1", " [SEP]  [SEP] "}};
    auto run = score_pairs(pairs, scorer);
    EXPECT_EQ(run.tag, "rerank");
    EXPECT_EQ(run.entries.at("q1")[0], (ScoredDoc{"d2", 0.75}));
    EXPECT_EQ(run.entries.at("q1")[1], (ScoredDoc{"d1", 0.25}));

    std::vector<PairInput> unknown = {{"q1", "d9", " [SEP]  [SEP] "}};
    EXPECT_THROW((void)scorer.score(unknown), Error);
}

TEST(ScorerHandle, ParsesSpecs)
{
    EXPECT_EQ(ScorerHandle::parse("lexical").kind, ScorerHandle::Kind::lexical_baseline);
    auto file = ScorerHandle::parse("file:/tmp/x");
    EXPECT_EQ(file.kind, ScorerHandle::Kind::score_file);
    EXPECT_EQ(file.location, "/tmp/x");
    auto cmd = ScorerHandle::parse("cmd:python score.py --gpu");
    EXPECT_EQ(cmd.kind, ScorerHandle::Kind::external_process);
    EXPECT_EQ(cmd.location, "python score.py --gpu");
    EXPECT_THROW((void)ScorerHandle::parse("model"), InvalidArgument);
}

TEST(ScoreRequest, EscapesText)
{
    PairInput pair{"q1", "d1", "a\tb [SEP] c\nd [SEP] e"};
    EXPECT_EQ(encode_score_request(pair), "SCORE\tq1\td1\ta\\tb [SEP] c\\nd [SEP] e");
}

TEST(ProcessScorer, EchoScoresTieByDocid)
{
    ProcessScorer scorer(scorer_command("echo 0.5"), 2);
    auto const pairs = five_pairs();
    auto scores = scorer.score(pairs);
    EXPECT_EQ(scores, std::vector<double>(5, 0.5));
    auto run = score_pairs(pairs, scorer);
    auto const &list = run.entries.at("q1");
    ASSERT_EQ(list.size(), 5u);
    for (std::size_t i = 0; i < list.size(); ++i) {
        EXPECT_EQ(list[i].docid, "d" + std::to_string(i + 1));
    }
}

TEST(ProcessScorer, ScoresManyBatches)
{
    ProcessScorer scorer(scorer_command("length"), 7);
    std::vector<PairInput> pairs;
    for (std::size_t i = 0; i < 100; ++i) {
        pairs.push_back({"q", gen::id('d', i), "q [SEP] t [SEP] " + std::string(i, 'x')});
    }
    auto scores = scorer.score(pairs);
    ASSERT_EQ(scores.size(), 100u);
    for (std::size_t i = 0; i < 100; ++i) {
        EXPECT_NEAR(scores[i], std::min(1.0, static_cast<double>(pairs[i].text.size()) / 100.0), 1e-6);
    }
}

TEST(ProcessScorer, ProtocolViolationsAreReported)
{
    auto const pairs = five_pairs();
    EXPECT_THROW(ProcessScorer(scorer_command("bad-handshake")), ProtocolError);
    for (auto const *mode : {"wrong-id", "out-of-range", "exit"}) {
        EXPECT_THROW(
            {
                ProcessScorer scorer(scorer_command(mode));
                (void)score_pairs(pairs, scorer);
            },
            ProtocolError)
            << mode;
    }
    EXPECT_THROW(ProcessScorer("/nonexistent/scorer-binary"), ProtocolError);
}
