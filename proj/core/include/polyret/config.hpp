#pragma once

#include "polyret/data_forge.hpp"
#include "polyret/dense_store.hpp"
#include "polyret/fusion.hpp"
#include "polyret/sparse_index.hpp"
#include "polyret/text.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polyret {

inline constexpr std::string_view kExperimentSchema = "polyret.experiment/1";

/// Pipeline stages in dependency order.
enum class Stage { index, bm25, dense, fuse, negatives, q2q2d, rerank, pseudo, ensemble, eval };

[[nodiscard]] Stage parse_stage(std::string_view name);
[[nodiscard]] std::string_view to_string(Stage stage) noexcept;

/// Everything one pipeline invocation needs. Path fields may contain
/// "{lang}", which expands to each language code in turn; relative paths
/// resolve against `base_dir`.
struct ExperimentConfig {
    std::filesystem::path base_dir = ".";
    std::uint64_t seed = 0;
    std::vector<std::string> languages;
    std::vector<Stage> stages;
    std::string output_dir = "out";
    unsigned threads = 1;

    std::string corpus;
    std::string topics;
    std::string qrels;
    std::string doc_vectors;
    std::string query_vectors;

    ScriptPolicy script_policy = ScriptPolicy::automatic;
    Bm25Params bm25;
    std::size_t bm25_depth = 1000;
    Similarity dense_metric = Similarity::dot;
    std::size_t dense_depth = 1000;
    std::vector<double> fuse_weights = {0.5, 0.5};
    Normalization fuse_normalization = Normalization::minmax;
    std::size_t pool_k = 200;

    std::int64_t negatives_n = 100;
    std::string negatives_universe = "pool";  // "pool" or "corpus"

    std::string q2q2d_test_topics;
    std::string q2q2d_train_topics;
    std::string q2q2d_train_qrels;
    std::string q2q2d_query_vectors;
    AugmentationParams augmentation;

    std::string rerank_scorer = "lexical";
    std::size_t rerank_budget = 256;

    std::vector<std::string> ensemble_inputs = {"rerank", "hybrid"};
    std::vector<double> ensemble_base_weights = {0.5, 0.5};
    double ensemble_lambda = 0.5;

    std::size_t eval_ndcg_k = 10;
    std::optional<std::size_t> eval_recall_k;  // defaults to pool_k

    /// Expands "{lang}" and resolves against base_dir. Empty stays empty.
    [[nodiscard]] std::filesystem::path resolve(std::string const &pattern, std::string const &language) const;
    [[nodiscard]] std::filesystem::path language_dir(std::string const &language) const;
};

/// Parses the flat "key = value" format. '#' starts a comment; list values
/// are comma separated. The first setting must be `schema`. Unknown keys and
/// malformed values throw DataError with the line number.
[[nodiscard]] ExperimentConfig parse_experiment_config(std::istream &in, std::string const &source,
                                                       std::filesystem::path base_dir);
[[nodiscard]] ExperimentConfig load_experiment_config(std::filesystem::path const &path);

} // namespace polyret
