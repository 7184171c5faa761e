#pragma once

#include "polyret/corpus_io.hpp"
#include "polyret/run.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace polyret {

enum class EvalMetric { ndcg, recall };

[[nodiscard]] EvalMetric parse_eval_metric(std::string_view name);
[[nodiscard]] std::string_view to_string(EvalMetric metric) noexcept;

/// Per-query values and their mean.
///
/// The evaluated set is every query with at least one positive judgment;
/// such a query missing from the run scores 0. Run queries that have no
/// judgments, or only zero grades, are counted in `skipped_queries`.
struct MetricReport {
    EvalMetric metric = EvalMetric::ndcg;
    std::size_t k = 10;
    std::map<std::string, double, std::less<>> per_query;
    double mean = 0.0;
    std::size_t evaluated_queries = 0;
    std::size_t skipped_queries = 0;

    [[nodiscard]] std::string label() const;  // e.g. "ndcg@10"
};

/// Linear gains: DCG = sum_{i<=k} grade(d_i) / log2(i + 1); the ideal DCG
/// uses the judged grades sorted descending. Throws InvalidArgument on
/// empty qrels.
[[nodiscard]] MetricReport ndcg_at_k(Run const &run, JudgmentSet const &qrels, std::size_t k = 10);

/// |positives within the top k| / |positives|.
[[nodiscard]] MetricReport recall_at_k(Run const &run, JudgmentSet const &qrels, std::size_t k);

[[nodiscard]] MetricReport evaluate(Run const &run, JudgmentSet const &qrels, EvalMetric metric, std::size_t k);

/// Unweighted mean of the reports' means. Throws InvalidArgument if empty.
[[nodiscard]] double macro_average(std::span<MetricReport const> reports);
[[nodiscard]] double macro_average(std::span<double const> means);

/// "metric<TAB>qid<TAB>value" lines (per query when asked), then a final
/// "metric<TAB>all<TAB>mean" line.
void write_report_tsv(std::ostream &out, MetricReport const &report, bool per_query);

/// Short human-readable summary.
void write_report_summary(std::ostream &out, MetricReport const &report, std::string_view run_name = {});

} // namespace polyret
