#include "polyret/fusion.hpp"

#include "polyret/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace polyret {

Normalization parse_normalization(std::string_view name)
{
    if (name == "minmax") {
        return Normalization::minmax;
    }
    if (name == "none") {
        return Normalization::none;
    }
    throw InvalidArgument("unknown normalization '" + std::string(name) + "'");
}

Run normalize_run(Run const &run, Normalization method)
{
    Run out = run;
    if (method == Normalization::none) {
        return out;
    }
    for (auto &[qid, list] : out.entries) {
        if (list.empty()) {
            continue;
        }
        auto [lo, hi] = std::minmax_element(list.begin(), list.end(),
                                            [](ScoredDoc const &a, ScoredDoc const &b) { return a.score < b.score; });
        double const min = lo->score;
        double const range = hi->score - min;
        // The map is monotone, so list order is kept as is even if rounding
        // collapses two adjacent scores.
        for (auto &entry : list) {
            entry.score = range > 0.0 ? (entry.score - min) / range : 1.0;
        }
    }
    return out;
}

void check_weights(std::span<double const> weights, std::size_t runs)
{
    if (weights.size() != runs) {
        throw InvalidArgument("expected " + std::to_string(runs) + " weights, got " + std::to_string(weights.size()));
    }
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw InvalidArgument("weights must be finite and non-negative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw InvalidArgument("weights must not all be zero");
    }
}

Run fuse(std::span<Run const> runs, std::span<double const> weights, std::string tag)
{
    check_weights(weights, runs.size());

    std::set<std::string_view> qids;
    for (auto const &run : runs) {
        for (auto const &[qid, list] : run.entries) {
            qids.insert(qid);
        }
    }

    Run fused;
    fused.tag = std::move(tag);
    std::unordered_map<std::string_view, std::vector<double>> contributions;
    for (auto qid : qids) {
        contributions.clear();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            auto const *list = runs[i].find(qid);
            // A zero-weight run adds no candidates of its own.
            if (list == nullptr || weights[i] == 0.0) {
                continue;
            }
            for (auto const &entry : *list) {
                contributions[entry.docid].push_back(weights[i] * entry.score);
            }
        }
        RankedList out;
        out.reserve(contributions.size());
        for (auto &[docid, parts] : contributions) {
            // Summing in sorted order makes the total independent of run order.
            std::sort(parts.begin(), parts.end());
            double total = 0.0;
            for (double p : parts) {
                total += p;
            }
            out.push_back(ScoredDoc{std::string(docid), total});
        }
        if (out.empty()) {
            continue;
        }
        std::sort(out.begin(), out.end(), ranks_before);
        fused.entries.emplace(std::string(qid), std::move(out));
    }
    return fused;
}

CandidatePool cut_pool(Run const &run, std::size_t k)
{
    return CandidatePool::from_run(run, k);
}

} // namespace polyret
