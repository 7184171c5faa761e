#pragma once

#include "polyret/corpus_io.hpp"
#include "polyret/dense_store.hpp"
#include "polyret/run.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polyret {

enum class PairSource { annotation, negative, q2q2d, pseudo };

[[nodiscard]] PairSource parse_pair_source(std::string_view name);
[[nodiscard]] std::string_view to_string(PairSource source) noexcept;

/// One labelled (query, document) example for ranking-model training.
struct TrainingPair {
    std::string qid;
    std::string query_text;
    std::string docid;
    double label = 0.0;
    PairSource source = PairSource::annotation;

    friend bool operator==(TrainingPair const &, TrainingPair const &) = default;
};

struct AugmentationParams {
    /// Noise damping applied to transferred Q2Q2D labels.
    double alpha = 0.9;
    /// Train neighbours considered per test query.
    std::size_t top_m = 1;
    /// Minimum cosine similarity for a train query to count as a neighbour.
    double tau = 0.8;
    /// Fixed scale applied to pseudo labels.
    static constexpr double pseudo_scale = 0.9;
    /// Share of scored triples kept as pseudo labels.
    double pseudo_fraction = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Output of the negative samplers: the pairs, plus how many queries had no
/// judgments at all and were left out.
struct NegativeSample {
    std::vector<TrainingPair> pairs;
    std::size_t skipped_queries = 0;
};

/// Label-0 pairs drawn uniformly without replacement from each query's pool
/// entries that are not judged positive (judged-zero documents qualify).
/// Per query the draw is a prefix of a seeded permutation, so a larger `n`
/// under the same seed yields a superset. Throws InvalidArgument for n < 0.
[[nodiscard]] NegativeSample sample_negatives(CandidatePool const &pool, JudgmentSet const &qrels,
                                              QueryTexts const &texts, std::int64_t n, std::uint64_t seed);

/// Same draw over the whole corpus instead of the pool, for every judged
/// query.
[[nodiscard]] NegativeSample sample_negatives_corpus(std::span<std::string const> corpus_ids,
                                                     JudgmentSet const &qrels, QueryTexts const &texts,
                                                     std::int64_t n, std::uint64_t seed);

/// Transfers judgments from each test query's nearest train queries
/// (cosine, sim >= tau, at most top_m, ties by qid) with label
/// sim * grade * alpha. Grades above 1 count as 1; zero grades are carried
/// as label 0. Throws DataError naming any query without a vector.
[[nodiscard]] std::vector<TrainingPair> q2q2d_augment(std::span<Query const> test_queries,
                                                      std::span<Query const> train_queries,
                                                      JudgmentSet const &train_qrels,
                                                      EmbeddingStore const &query_vectors,
                                                      AugmentationParams const &params);

/// Samples floor(fraction * total) (qid, docid, score) triples from the
/// whole run without replacement and emits soft labels 0.9 * score.
/// Scores must lie in [0, 1]; output keeps run order.
[[nodiscard]] std::vector<TrainingPair> pseudo_label(Run const &scored_run, QueryTexts const &texts,
                                                     AugmentationParams const &params);

/// Judged pairs as training data; grades above 1 clamp to label 1.
[[nodiscard]] std::vector<TrainingPair> annotation_pairs(JudgmentSet const &qrels, QueryTexts const &texts);

/// "qid<TAB>docid<TAB>label<TAB>source<TAB>query_text" per pair. The query
/// text is escaped so it stays on one line.
void write_training_pairs(std::ostream &out, std::span<TrainingPair const> pairs,
                          std::span<std::string const> header = {});
[[nodiscard]] std::vector<TrainingPair> read_training_pairs(std::istream &in,
                                                            std::string const &source = "<pairs>");
[[nodiscard]] std::vector<TrainingPair> read_training_pairs(std::filesystem::path const &path);

} // namespace polyret
