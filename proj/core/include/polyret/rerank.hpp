#pragma once

#include "polyret/corpus_io.hpp"
#include "polyret/run.hpp"
#include "polyret/text.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace polyret {

inline constexpr std::string_view kPairSeparator = "[SEP]";

/// Cross-encoder input: "query [SEP] title [SEP] body".
struct PairInput {
    std::string qid;
    std::string docid;
    std::string text;
    std::size_t truncation_budget = 256;

    friend bool operator==(PairInput const &, PairInput const &) = default;
};

/// The three text segments of a pair, split at the separators.
struct PairSegments {
    std::string_view query;
    std::string_view title;
    std::string_view body;
};

/// Throws DataError unless the text holds exactly two separators.
[[nodiscard]] PairSegments split_pair(PairInput const &pair);

/// Tokens of all three segments; separator markers are not counted.
[[nodiscard]] TokenStream pair_tokens(PairInput const &pair, ScriptPolicy policy = ScriptPolicy::automatic);

using DocumentLookup = std::unordered_map<std::string, Document>;
[[nodiscard]] DocumentLookup make_lookup(std::vector<Document> documents);

struct PairBuildOptions {
    std::size_t budget = 256;
    /// Cut title+body so the pair has at most `budget` tokens. Only the
    /// lexical baseline needs this; model scorers truncate with their own
    /// subword tokenizer.
    bool truncate = false;
    ScriptPolicy policy = ScriptPolicy::automatic;
};

/// One pair per pool candidate, in pool order. Throws DataError naming any
/// candidate docid missing from `documents` or qid missing from `queries`.
[[nodiscard]] std::vector<PairInput> build_pairs(CandidatePool const &pool, QueryTexts const &queries,
                                                 DocumentLookup const &documents,
                                                 PairBuildOptions const &options = {});

/// Fraction of distinct query tokens present in title+body; 0 when the
/// query has no tokens.
[[nodiscard]] double lexical_score(PairInput const &pair, ScriptPolicy policy = ScriptPolicy::automatic);

/// Produces one relevance probability per pair.
class Scorer {
   public:
    virtual ~Scorer() = default;
    [[nodiscard]] virtual std::vector<double> score(std::span<PairInput const> pairs) = 0;
};

class LexicalScorer final : public Scorer {
   public:
    explicit LexicalScorer(ScriptPolicy policy = ScriptPolicy::automatic) : policy_(policy) {}
    [[nodiscard]] std::vector<double> score(std::span<PairInput const> pairs) override;

   private:
    ScriptPolicy policy_;
};

/// Looks scores up in a "qid docid score" table.
class ScoreFileScorer final : public Scorer {
   public:
    explicit ScoreFileScorer(std::filesystem::path const &path);
    explicit ScoreFileScorer(std::map<std::pair<std::string, std::string>, double> scores);
    [[nodiscard]] std::vector<double> score(std::span<PairInput const> pairs) override;

   private:
    std::map<std::pair<std::string, std::string>, double> scores_;
};

/// Talks to a child process over its standard streams.
///
///   -> HELLO 1
///   <- READY 1
///   -> SCORE<TAB>qid<TAB>docid<TAB>escaped-text     (one per pair)
///   <- qid<TAB>docid<TAB>score                       (one per request, in order)
///
/// Requests are sent in batches; the child may answer each line as soon as
/// it reads it. Any deviation raises ProtocolError.
class ProcessScorer final : public Scorer {
   public:
    explicit ProcessScorer(std::string command, std::size_t batch_size = 64,
                           std::chrono::milliseconds timeout = std::chrono::minutes(2));
    ~ProcessScorer() override;

    ProcessScorer(ProcessScorer const &) = delete;
    ProcessScorer &operator=(ProcessScorer const &) = delete;

    [[nodiscard]] std::vector<double> score(std::span<PairInput const> pairs) override;

   private:
    class Channel;
    std::unique_ptr<Channel> channel_;
    std::size_t batch_size_;
};

struct ScorerHandle {
    enum class Kind { external_process, score_file, lexical_baseline };

    Kind kind = Kind::lexical_baseline;
    std::string location;

    /// Accepts "cmd:<command line>", "file:<path>" or "lexical".
    [[nodiscard]] static ScorerHandle parse(std::string_view spec);

    /// Throws ProtocolError if an external scorer cannot be reached.
    [[nodiscard]] std::unique_ptr<Scorer> open() const;
};

/// Scores every pair and assembles a run in canonical order. Throws
/// ProtocolError on a count mismatch or a score outside [0, 1].
[[nodiscard]] Run score_pairs(std::span<PairInput const> pairs, Scorer &scorer, std::string tag = "rerank");
[[nodiscard]] Run score_pairs(std::span<PairInput const> pairs, ScorerHandle const &handle,
                              std::string tag = "rerank");

/// Wire encoding of one request line (no trailing newline).
[[nodiscard]] std::string encode_score_request(PairInput const &pair);

} // namespace polyret
