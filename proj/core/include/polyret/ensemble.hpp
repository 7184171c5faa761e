#pragma once

#include "polyret/run.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace polyret {

/// Square, symmetric, row-major.
struct CorrelationMatrix {
    std::size_t size = 0;
    std::vector<double> values;

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return values[i * size + j]; }
    double &operator()(std::size_t i, std::size_t j) { return values[i * size + j]; }

    /// Mean of row i without the diagonal.
    [[nodiscard]] double off_diagonal_mean(std::size_t i) const;
};

struct EnsembleConfig {
    /// One per run, typically leaderboard scores. Non-negative, not all zero.
    std::vector<double> base_weights;
    /// Strength of the correlation penalty, in [0, 1].
    double lambda = 0.5;

    void validate(std::size_t runs) const;
};

/// Spearman rank correlation with average ranks for ties. Returns nullopt
/// when fewer than two values are given or either side is constant.
[[nodiscard]] std::optional<double> spearman(std::span<double const> a, std::span<double const> b);

/// Entry (i, j) is the mean over shared queries of the Spearman correlation
/// between runs i and j on the candidates both retrieved. Queries with fewer
/// than two shared candidates, or constant scores on either side, are
/// skipped; a pair with no usable query gets 0. Throws InvalidArgument for
/// fewer than two runs and DataError if no query is shared by any pair.
[[nodiscard]] CorrelationMatrix correlation_matrix(std::span<Run const> runs);

/// w_i = max(0, base_i * (1 - lambda * clamp(mean off-diagonal corr_i, 0, 1))),
/// normalized to sum 1. Falls back to normalized base weights if every
/// weight is damped to zero.
[[nodiscard]] std::vector<double> adjust_weights(EnsembleConfig const &config, CorrelationMatrix const &corr);

/// Per-query min-max normalization of each run, then the weighted sum over
/// the union of candidates (absent -> 0). Tag "ensemble".
[[nodiscard]] Run ensemble_runs(std::span<Run const> runs, std::span<double const> weights);

} // namespace polyret
