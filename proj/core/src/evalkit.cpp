#include "polyret/evalkit.hpp"

#include "polyret/error.hpp"
#include "polyret/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <vector>

namespace polyret {

namespace {

using QueryMetric = std::function<double(RankedList const &, JudgmentSet::QueryJudgments const &, std::size_t)>;

bool has_positive(JudgmentSet::QueryJudgments const &judged)
{
    return std::any_of(judged.begin(), judged.end(), [](auto const &entry) { return entry.second >= 1; });
}

int gain_of(JudgmentSet::QueryJudgments const &judged, std::string const &docid)
{
    auto it = judged.find(docid);
    return it == judged.end() ? 0 : it->second;
}

double query_ndcg(RankedList const &ranking, JudgmentSet::QueryJudgments const &judged, std::size_t k)
{
    double dcg = 0.0;
    auto const depth = std::min(k, ranking.size());
    for (std::size_t i = 0; i < depth; ++i) {
        dcg += gain_of(judged, ranking[i].docid) / std::log2(static_cast<double>(i) + 2.0);
    }
    std::vector<int> grades;
    grades.reserve(judged.size());
    for (auto const &[docid, grade] : judged) {
        grades.push_back(grade);
    }
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double ideal = 0.0;
    for (std::size_t i = 0; i < std::min(k, grades.size()); ++i) {
        ideal += grades[i] / std::log2(static_cast<double>(i) + 2.0);
    }
    return ideal > 0.0 ? dcg / ideal : 0.0;
}

double query_recall(RankedList const &ranking, JudgmentSet::QueryJudgments const &judged, std::size_t k)
{
    std::size_t relevant = 0;
    for (auto const &[docid, grade] : judged) {
        relevant += grade >= 1 ? 1 : 0;
    }
    std::size_t found = 0;
    auto const depth = std::min(k, ranking.size());
    for (std::size_t i = 0; i < depth; ++i) {
        found += gain_of(judged, ranking[i].docid) >= 1 ? 1 : 0;
    }
    return static_cast<double>(found) / static_cast<double>(relevant);
}

MetricReport evaluate_with(Run const &run, JudgmentSet const &qrels, EvalMetric metric, std::size_t k,
                           QueryMetric const &per_query)
{
    if (qrels.empty()) {
        throw InvalidArgument("qrels are empty");
    }
    MetricReport report;
    report.metric = metric;
    report.k = k;
    RankedList const empty;
    for (auto const &[qid, judged] : qrels.by_query()) {
        if (!has_positive(judged)) {
            continue;
        }
        auto const *ranking = run.find(qid);
        report.per_query.emplace(qid, per_query(ranking ? *ranking : empty, judged, k));
    }
    for (auto const &[qid, list] : run.entries) {
        auto const *judged = qrels.judgments_for(qid);
        if (judged == nullptr || !has_positive(*judged)) {
            ++report.skipped_queries;
        }
    }
    report.evaluated_queries = report.per_query.size();
    double total = 0.0;
    for (auto const &[qid, value] : report.per_query) {
        total += value;
    }
    report.mean = report.evaluated_queries == 0 ? 0.0 : total / static_cast<double>(report.evaluated_queries);
    return report;
}

} // namespace

EvalMetric parse_eval_metric(std::string_view name)
{
    if (name == "ndcg") {
        return EvalMetric::ndcg;
    }
    if (name == "recall") {
        return EvalMetric::recall;
    }
    throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(EvalMetric metric) noexcept
{
    return metric == EvalMetric::ndcg ? "ndcg" : "recall";
}

std::string MetricReport::label() const
{
    return std::string(to_string(metric)) + "@" + std::to_string(k);
}

MetricReport ndcg_at_k(Run const &run, JudgmentSet const &qrels, std::size_t k)
{
    return evaluate_with(run, qrels, EvalMetric::ndcg, k, query_ndcg);
}

MetricReport recall_at_k(Run const &run, JudgmentSet const &qrels, std::size_t k)
{
    return evaluate_with(run, qrels, EvalMetric::recall, k, query_recall);
}

MetricReport evaluate(Run const &run, JudgmentSet const &qrels, EvalMetric metric, std::size_t k)
{
    return metric == EvalMetric::ndcg ? ndcg_at_k(run, qrels, k) : recall_at_k(run, qrels, k);
}

double macro_average(std::span<double const> means)
{
    if (means.empty()) {
        throw InvalidArgument("macro average of zero reports");
    }
    return std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(means.size());
}

double macro_average(std::span<MetricReport const> reports)
{
    std::vector<double> means;
    means.reserve(reports.size());
    for (auto const &r : reports) {
        means.push_back(r.mean);
    }
    return macro_average(means);
}

void write_report_tsv(std::ostream &out, MetricReport const &report, bool per_query)
{
    auto const label = report.label();
    if (per_query) {
        for (auto const &[qid, value] : report.per_query) {
            out << label << '\t' << qid << '\t' << format_real(value) << '\n';
        }
    }
    out << label << "\tall\t" << format_real(report.mean) << '\n';
}

void write_report_summary(std::ostream &out, MetricReport const &report, std::string_view run_name)
{
    char mean[32];
    std::snprintf(mean, sizeof(mean), "%.4f", report.mean);
    if (!run_name.empty()) {
        out << run_name << ": ";
    }
    out << report.label() << " = " << mean << " over " << report.evaluated_queries << " queries";
    if (report.skipped_queries > 0) {
        out << " (" << report.skipped_queries << " run queries without positive judgments skipped)";
    }
    out << '\n';
}

} // namespace polyret
