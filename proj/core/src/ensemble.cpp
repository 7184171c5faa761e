#include "polyret/ensemble.hpp"

#include "polyret/error.hpp"
#include "polyret/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string_view>
#include <unordered_map>

namespace polyret {

namespace {

std::vector<double> average_ranks(std::span<double const> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        double const rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

std::optional<double> pair_correlation(Run const &a, Run const &b)
{
    double total = 0.0;
    std::size_t used = 0;
    std::vector<double> xs;
    std::vector<double> ys;
    for (auto const &[qid, list_a] : a.entries) {
        auto const *list_b = b.find(qid);
        if (list_b == nullptr) {
            continue;
        }
        std::unordered_map<std::string_view, double> scores_b;
        for (auto const &entry : *list_b) {
            scores_b.emplace(entry.docid, entry.score);
        }
        xs.clear();
        ys.clear();
        for (auto const &entry : list_a) {
            auto it = scores_b.find(entry.docid);
            if (it != scores_b.end()) {
                xs.push_back(entry.score);
                ys.push_back(it->second);
            }
        }
        if (auto rho = spearman(xs, ys)) {
            total += *rho;
            ++used;
        }
    }
    if (used == 0) {
        return std::nullopt;
    }
    return total / static_cast<double>(used);
}

bool share_query(Run const &a, Run const &b)
{
    return std::any_of(a.entries.begin(), a.entries.end(),
                       [&](auto const &entry) { return b.find(entry.first) != nullptr; });
}

} // namespace

double CorrelationMatrix::off_diagonal_mean(std::size_t i) const
{
    if (size < 2) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
        if (j != i) {
            total += (*this)(i, j);
        }
    }
    return total / static_cast<double>(size - 1);
}

void EnsembleConfig::validate(std::size_t runs) const
{
    check_weights(base_weights, runs);
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw InvalidArgument("lambda must lie in [0, 1]");
    }
}

std::optional<double> spearman(std::span<double const> a, std::span<double const> b)
{
    if (a.size() != b.size() || a.size() < 2) {
        return std::nullopt;
    }
    auto const ra = average_ranks(a);
    auto const rb = average_ranks(b);
    double const mean = (static_cast<double>(a.size()) + 1.0) / 2.0;
    double cov = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double const da = ra[i] - mean;
        double const db = rb[i] - mean;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) {
        return std::nullopt;
    }
    return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(std::span<Run const> runs)
{
    if (runs.size() < 2) {
        throw InvalidArgument("correlation needs at least two runs");
    }
    CorrelationMatrix corr{runs.size(), std::vector<double>(runs.size() * runs.size(), 0.0)};
    bool any_shared = false;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        corr(i, i) = 1.0;
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            any_shared = any_shared || share_query(runs[i], runs[j]);
            double const rho = pair_correlation(runs[i], runs[j]).value_or(0.0);
            corr(i, j) = rho;
            corr(j, i) = rho;
        }
    }
    if (!any_shared) {
        throw DataError("runs share no queries");
    }
    return corr;
}

std::vector<double> adjust_weights(EnsembleConfig const &config, CorrelationMatrix const &corr)
{
    config.validate(corr.size);
    auto normalized = [](std::vector<double> w) {
        double const total = std::accumulate(w.begin(), w.end(), 0.0);
        for (double &x : w) {
            x /= total;
        }
        return w;
    };

    std::vector<double> weights(corr.size);
    double total = 0.0;
    for (std::size_t i = 0; i < corr.size; ++i) {
        double const rho = std::clamp(corr.off_diagonal_mean(i), 0.0, 1.0);
        weights[i] = std::max(0.0, config.base_weights[i] * (1.0 - config.lambda * rho));
        total += weights[i];
    }
    if (!(total > 0.0)) {
        return normalized(config.base_weights);
    }
    return normalized(std::move(weights));
}

Run ensemble_runs(std::span<Run const> runs, std::span<double const> weights)
{
    check_weights(weights, runs.size());
    std::vector<Run> normalized;
    normalized.reserve(runs.size());
    for (auto const &run : runs) {
        normalized.push_back(normalize_run(run, Normalization::minmax));
    }
    return fuse(normalized, weights, "ensemble");
}

} // namespace polyret
