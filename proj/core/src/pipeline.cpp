#include "polyret/pipeline.hpp"

#include "polyret/corpus_io.hpp"
#include "polyret/data_forge.hpp"
#include "polyret/dense_store.hpp"
#include "polyret/ensemble.hpp"
#include "polyret/error.hpp"
#include "polyret/evalkit.hpp"
#include "polyret/fusion.hpp"
#include "polyret/rerank.hpp"
#include "polyret/run.hpp"
#include "polyret/sparse_index.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

namespace polyret {

namespace fs = std::filesystem;

namespace {

struct RunFile {
    std::string_view name;
    Stage producer;
};

// Runs the pipeline can emit, in the order they are evaluated.
constexpr RunFile kRunFiles[] = {
    {"bm25", Stage::bm25},   {"dense", Stage::dense},       {"hybrid", Stage::fuse},
    {"pool", Stage::fuse},   {"rerank", Stage::rerank},     {"ensemble", Stage::ensemble},
};

std::optional<Stage> producer_of(std::string_view run_name)
{
    for (auto const &file : kRunFiles) {
        if (file.name == run_name) {
            return file.producer;
        }
    }
    return std::nullopt;
}

template <typename Write>
void write_artifact(fs::path const &path, Write &&write)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(path.string(), 0, "cannot open for writing");
    }
    write(out);
    out.flush();
    if (!out) {
        throw DataError(path.string(), 0, "write failed");
    }
}

class LanguageRun {
   public:
    LanguageRun(ExperimentConfig const &config, std::string language, std::ostream *log)
        : config_(config), language_(std::move(language)), dir_(config.language_dir(language_)), log_(log)
    {
        fs::create_directories(dir_);
    }

    void run_stage(Stage stage, PipelineSummary &summary);

   private:
    fs::path artifact(std::string_view name) const { return dir_ / std::string(name); }

    std::vector<std::string> header(Stage stage) const
    {
        return {artifact_header(config_.seed, to_string(stage), language_)};
    }

    fs::path require(std::string_view file, Stage current, Stage producer) const
    {
        auto path = artifact(file);
        if (!fs::exists(path)) {
            throw DependencyError(std::string(to_string(producer)),
                                  "stage '" + std::string(to_string(current)) + "' needs " + std::string(file) +
                                      " for language '" + language_ + "'; run stage '" +
                                      std::string(to_string(producer)) + "' first");
        }
        return path;
    }

    fs::path input(std::string const &pattern, std::string_view key) const
    {
        if (pattern.empty()) {
            throw DataError("config", 0, std::string(key) + " is not set");
        }
        return config_.resolve(pattern, language_);
    }

    std::vector<Query> const &topics()
    {
        if (!topics_) {
            topics_ = load_topics(input(config_.topics, "topics"), language_);
        }
        return *topics_;
    }

    JudgmentSet const &qrels()
    {
        if (!qrels_) {
            qrels_ = load_qrels(input(config_.qrels, "qrels"));
        }
        return *qrels_;
    }

    std::vector<Document> const &corpus()
    {
        if (!corpus_) {
            corpus_ = load_corpus(input(config_.corpus, "corpus"));
        }
        return *corpus_;
    }

    void note(Stage stage, std::string const &what) const
    {
        if (log_ != nullptr) {
            *log_ << '[' << language_ << "] " << to_string(stage) << ": " << what << '\n';
        }
    }

    void emit_run(Stage stage, std::string_view name, Run const &run, PipelineSummary &summary,
                  std::vector<std::string> head)
    {
        auto path = artifact(std::string(name) + ".trec");
        write_artifact(path, [&](std::ostream &out) { write_trec_run(out, run, head); });
        summary.artifacts.push_back(path);
        note(stage, std::to_string(run.entries.size()) + " queries -> " + path.filename().string());
    }

    void emit_pairs(Stage stage, std::string_view name, std::vector<TrainingPair> const &pairs,
                    PipelineSummary &summary)
    {
        auto path = artifact(name);
        auto head = header(stage);
        write_artifact(path, [&](std::ostream &out) { write_training_pairs(out, pairs, head); });
        summary.artifacts.push_back(path);
        note(stage, std::to_string(pairs.size()) + " pairs -> " + path.filename().string());
    }

    void index_stage(PipelineSummary &summary);
    void bm25_stage(PipelineSummary &summary);
    void dense_stage(PipelineSummary &summary);
    void fuse_stage(PipelineSummary &summary);
    void negatives_stage(PipelineSummary &summary);
    void q2q2d_stage(PipelineSummary &summary);
    void rerank_stage(PipelineSummary &summary);
    void pseudo_stage(PipelineSummary &summary);
    void ensemble_stage(PipelineSummary &summary);
    void eval_stage(PipelineSummary &summary);

    ExperimentConfig const &config_;
    std::string language_;
    fs::path dir_;
    std::ostream *log_;
    std::optional<std::vector<Query>> topics_;
    std::optional<JudgmentSet> qrels_;
    std::optional<std::vector<Document>> corpus_;
};

void LanguageRun::run_stage(Stage stage, PipelineSummary &summary)
{
    switch (stage) {
    case Stage::index: index_stage(summary); break;
    case Stage::bm25: bm25_stage(summary); break;
    case Stage::dense: dense_stage(summary); break;
    case Stage::fuse: fuse_stage(summary); break;
    case Stage::negatives: negatives_stage(summary); break;
    case Stage::q2q2d: q2q2d_stage(summary); break;
    case Stage::rerank: rerank_stage(summary); break;
    case Stage::pseudo: pseudo_stage(summary); break;
    case Stage::ensemble: ensemble_stage(summary); break;
    case Stage::eval: eval_stage(summary); break;
    }
}

void LanguageRun::index_stage(PipelineSummary &summary)
{
    CorpusReader reader(input(config_.corpus, "corpus"));
    auto index = build_index(reader, config_.script_policy, config_.threads);
    auto path = artifact("index.bin");
    index.save(path);
    summary.artifacts.push_back(path);
    note(Stage::index, std::to_string(index.doc_count()) + " documents, " + std::to_string(index.term_count()) +
                           " terms -> index.bin");
}

void LanguageRun::bm25_stage(PipelineSummary &summary)
{
    config_.bm25.validate();
    auto index = InvertedIndex::load(require("index.bin", Stage::bm25, Stage::index));
    auto run = bm25_retrieve(index, topics(), config_.bm25_depth, config_.bm25, config_.threads);
    emit_run(Stage::bm25, "bm25", run, summary, header(Stage::bm25));
}

void LanguageRun::dense_stage(PipelineSummary &summary)
{
    auto docs = EmbeddingStore::load(input(config_.doc_vectors, "doc_vectors"), config_.dense_metric);
    auto queries = EmbeddingStore::load(input(config_.query_vectors, "query_vectors"), config_.dense_metric);
    std::vector<std::string> qids;
    for (auto const &q : topics()) {
        qids.push_back(q.qid);
    }
    auto run = dense_retrieve(docs, queries, config_.dense_depth, qids, config_.threads);
    emit_run(Stage::dense, "dense", run, summary, header(Stage::dense));
}

void LanguageRun::fuse_stage(PipelineSummary &summary)
{
    std::vector<Run> runs;
    runs.push_back(read_trec_run(require("bm25.trec", Stage::fuse, Stage::bm25)));
    runs.push_back(read_trec_run(require("dense.trec", Stage::fuse, Stage::dense)));
    check_weights(config_.fuse_weights, runs.size());
    for (auto &run : runs) {
        run = normalize_run(run, config_.fuse_normalization);
    }
    auto hybrid = fuse(runs, config_.fuse_weights, "hybrid");
    emit_run(Stage::fuse, "hybrid", hybrid, summary, header(Stage::fuse));
    auto pool = cut_pool(hybrid, config_.pool_k).as_run();
    pool.tag = "pool";
    emit_run(Stage::fuse, "pool", pool, summary, header(Stage::fuse));
}

void LanguageRun::negatives_stage(PipelineSummary &summary)
{
    auto texts = query_texts(topics());
    NegativeSample sample;
    if (config_.negatives_universe == "corpus") {
        std::vector<std::string> ids;
        for (auto const &doc : corpus()) {
            ids.push_back(doc.docid);
        }
        sample = sample_negatives_corpus(ids, qrels(), texts, config_.negatives_n, config_.seed);
    } else {
        auto pool = CandidatePool::from_run(read_trec_run(require("pool.trec", Stage::negatives, Stage::fuse)),
                                            config_.pool_k);
        sample = sample_negatives(pool, qrels(), texts, config_.negatives_n, config_.seed);
    }
    if (sample.skipped_queries > 0) {
        note(Stage::negatives, std::to_string(sample.skipped_queries) + " queries without judgments skipped");
    }
    emit_pairs(Stage::negatives, "negatives.tsv", sample.pairs, summary);
}

void LanguageRun::q2q2d_stage(PipelineSummary &summary)
{
    auto params = config_.augmentation;
    params.seed = config_.seed;
    params.validate();
    auto test = config_.q2q2d_test_topics.empty()
                    ? topics()
                    : load_topics(input(config_.q2q2d_test_topics, "q2q2d.test_topics"), language_);
    auto train = load_topics(input(config_.q2q2d_train_topics, "q2q2d.train_topics"), language_);
    auto train_qrels = load_qrels(input(config_.q2q2d_train_qrels, "q2q2d.train_qrels"));
    auto const &vector_pattern =
        config_.q2q2d_query_vectors.empty() ? config_.query_vectors : config_.q2q2d_query_vectors;
    auto vectors = EmbeddingStore::load(input(vector_pattern, "q2q2d.query_vectors"), Similarity::cosine);
    auto pairs = q2q2d_augment(test, train, train_qrels, vectors, params);
    emit_pairs(Stage::q2q2d, "q2q2d.tsv", pairs, summary);
}

void LanguageRun::rerank_stage(PipelineSummary &summary)
{
    auto pool = CandidatePool::from_run(read_trec_run(require("pool.trec", Stage::rerank, Stage::fuse)),
                                        config_.pool_k);
    auto handle = ScorerHandle::parse(config_.rerank_scorer);
    PairBuildOptions options;
    options.budget = config_.rerank_budget;
    options.truncate = handle.kind == ScorerHandle::Kind::lexical_baseline;
    options.policy = config_.script_policy;
    auto lookup = make_lookup(corpus());
    auto pairs = build_pairs(pool, query_texts(topics()), lookup, options);
    auto run = score_pairs(pairs, handle, "rerank");
    emit_run(Stage::rerank, "rerank", run, summary, header(Stage::rerank));
}

void LanguageRun::pseudo_stage(PipelineSummary &summary)
{
    auto params = config_.augmentation;
    params.seed = config_.seed;
    params.validate();
    auto scored = read_trec_run(require("rerank.trec", Stage::pseudo, Stage::rerank));
    auto pairs = pseudo_label(scored, query_texts(topics()), params);
    emit_pairs(Stage::pseudo, "pseudo.tsv", pairs, summary);
}

void LanguageRun::ensemble_stage(PipelineSummary &summary)
{
    if (config_.ensemble_inputs.size() != config_.ensemble_base_weights.size()) {
        throw InvalidArgument("ensemble.inputs and ensemble.base_weights differ in length");
    }
    std::vector<Run> runs;
    for (auto const &name : config_.ensemble_inputs) {
        auto producer = producer_of(name);
        if (!producer) {
            throw InvalidArgument("ensemble input '" + name + "' is not a pipeline run");
        }
        runs.push_back(read_trec_run(require(name + ".trec", Stage::ensemble, *producer)));
    }
    EnsembleConfig ensemble{config_.ensemble_base_weights, config_.ensemble_lambda};
    ensemble.validate(runs.size());
    auto corr = correlation_matrix(runs);
    auto weights = adjust_weights(ensemble, corr);
    auto run = ensemble_runs(runs, weights);

    auto head = header(Stage::ensemble);
    std::ostringstream line;
    line << "weights";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        line << ' ' << config_.ensemble_inputs[i] << '=' << format_real(weights[i]);
    }
    head.push_back(line.str());
    emit_run(Stage::ensemble, "ensemble", run, summary, std::move(head));
}

void LanguageRun::eval_stage(PipelineSummary &summary)
{
    auto const &judged = qrels();
    auto const recall_k = config_.eval_recall_k.value_or(config_.pool_k);
    std::vector<std::pair<std::string, MetricReport>> reports;
    for (auto const &file : kRunFiles) {
        if (file.name == "pool") {
            continue;
        }
        auto path = artifact(std::string(file.name) + ".trec");
        if (!fs::exists(path)) {
            continue;
        }
        auto run = read_trec_run(path);
        reports.emplace_back(std::string(file.name), ndcg_at_k(run, judged, config_.eval_ndcg_k));
        reports.emplace_back(std::string(file.name), recall_at_k(run, judged, recall_k));
    }
    if (reports.empty()) {
        throw DependencyError("bm25", "stage 'eval' found no run files for language '" + language_ +
                                          "'; run stage 'bm25' first");
    }
    auto path = artifact("eval.tsv");
    write_artifact(path, [&](std::ostream &out) {
        out << "# " << artifact_header(config_.seed, "eval", language_) << '\n';
        for (auto const &[name, report] : reports) {
            for (auto const &[qid, value] : report.per_query) {
                out << name << '\t' << report.label() << '\t' << qid << '\t' << format_real(value) << '\n';
            }
            out << name << '\t' << report.label() << "\tall\t" << format_real(report.mean) << '\n';
        }
    });
    summary.artifacts.push_back(path);
    for (auto const &[name, report] : reports) {
        summary.metrics.push_back(SummaryRow{language_, name, report.label(), report.mean});
        if (log_ != nullptr) {
            *log_ << '[' << language_ << "] eval: ";
            write_report_summary(*log_, report, name);
        }
    }
}

std::vector<SummaryRow> macro_rows(std::vector<SummaryRow> const &rows, std::size_t languages)
{
    std::map<std::pair<std::string, std::string>, std::vector<double>> grouped;
    std::vector<std::pair<std::string, std::string>> order;
    for (auto const &row : rows) {
        auto key = std::make_pair(row.run, row.label);
        auto [it, inserted] = grouped.try_emplace(key);
        if (inserted) {
            order.push_back(key);
        }
        it->second.push_back(row.value);
    }
    std::vector<SummaryRow> out;
    for (auto const &key : order) {
        auto const &values = grouped.at(key);
        if (values.size() == languages) {
            out.push_back(SummaryRow{"macro", key.first, key.second, macro_average(values)});
        }
    }
    return out;
}

} // namespace

std::string artifact_header(std::uint64_t seed, std::string_view stage, std::string_view language)
{
    std::string line = "polyret seed=" + std::to_string(seed) + " stage=" + std::string(stage);
    if (!language.empty()) {
        line += " lang=" + std::string(language);
    }
    return line;
}

void write_summary(std::ostream &out, std::vector<SummaryRow> const &rows, std::string const &header)
{
    if (!header.empty()) {
        out << "# " << header << '\n';
    }
    for (auto const &row : rows) {
        out << row.language << '\t' << row.run << '\t' << row.label << '\t' << format_real(row.value) << '\n';
    }
}

PipelineSummary run_pipeline(ExperimentConfig const &config, std::ostream *log)
{
    if (config.languages.empty()) {
        throw InvalidArgument("no languages configured");
    }
    std::set<std::string> distinct(config.languages.begin(), config.languages.end());
    if (distinct.size() != config.languages.size()) {
        throw InvalidArgument("a language is listed twice");
    }
    auto stages = config.stages;
    std::sort(stages.begin(), stages.end());
    stages.erase(std::unique(stages.begin(), stages.end()), stages.end());

    PipelineSummary summary;
    for (auto const &language : config.languages) {
        LanguageRun lang(config, language, log);
        for (auto stage : stages) {
            lang.run_stage(stage, summary);
        }
    }

    if (!summary.metrics.empty()) {
        auto rows = summary.metrics;
        auto macro = macro_rows(summary.metrics, config.languages.size());
        rows.insert(rows.end(), macro.begin(), macro.end());
        summary.metrics = rows;
        auto path = config.resolve(config.output_dir, "") / "summary.tsv";
        write_artifact(path, [&](std::ostream &out) {
            write_summary(out, rows, artifact_header(config.seed, "eval"));
        });
        summary.artifacts.push_back(path);
    }
    return summary;
}

} // namespace polyret
