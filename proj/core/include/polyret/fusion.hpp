#pragma once

#include "polyret/run.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polyret {

enum class Normalization { none, minmax };

[[nodiscard]] Normalization parse_normalization(std::string_view name);

/// Per query, maps scores to (s - min) / (max - min). A query whose scores
/// are all equal gets 1.0 everywhere. Ranking order is unchanged.
[[nodiscard]] Run normalize_run(Run const &run, Normalization method = Normalization::minmax);

/// Weighted sum over the per-query union of candidates; a run that did not
/// retrieve a document contributes 0 for it, and a run with weight 0
/// contributes no candidates at all. Weights must be finite,
/// non-negative and not all zero, one per run. The result does not depend
/// on the order in which (run, weight) pairs are given.
[[nodiscard]] Run fuse(std::span<Run const> runs, std::span<double const> weights,
                       std::string tag = "hybrid");

/// Throws InvalidArgument unless weights are usable for `runs` inputs.
void check_weights(std::span<double const> weights, std::size_t runs);

/// First min(K, len) entries per query.
[[nodiscard]] CandidatePool cut_pool(Run const &run, std::size_t k = 200);

} // namespace polyret
