// polyret: command-line front end for the retrieval toolkit.

#include "polyret/config.hpp"
#include "polyret/corpus_io.hpp"
#include "polyret/data_forge.hpp"
#include "polyret/dense_store.hpp"
#include "polyret/ensemble.hpp"
#include "polyret/error.hpp"
#include "polyret/evalkit.hpp"
#include "polyret/fusion.hpp"
#include "polyret/pipeline.hpp"
#include "polyret/rerank.hpp"
#include "polyret/run.hpp"
#include "polyret/sparse_index.hpp"
#include "polyret/validate.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace polyret;

namespace {

enum Exit { ok = 0, usage = 1, data = 2, protocol = 3 };

void with_output(std::string const &path, std::function<void(std::ostream &)> const &write)
{
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(path, 0, "cannot open for writing");
    }
    write(out);
    out.flush();
    if (!out) {
        throw DataError(path, 0, "write failed");
    }
}

std::vector<double> parse_weight_list(std::string const &text)
{
    std::vector<double> weights;
    for (auto field : split_on(text, ',')) {
        auto value = parse_real(trim(field));
        if (!value) {
            throw InvalidArgument("'" + std::string(field) + "' is not a number");
        }
        weights.push_back(*value);
    }
    return weights;
}

std::vector<Run> read_runs(std::vector<std::string> const &paths)
{
    std::vector<Run> runs;
    for (auto const &path : paths) {
        runs.push_back(read_trec_run(fs::path(path)));
    }
    return runs;
}

std::vector<std::string> header_for(std::uint64_t seed, std::string_view stage, std::string const &lang)
{
    return {artifact_header(seed, stage, lang)};
}

// Parses "split=path" into the map, rejecting unknown splits.
template <typename Load, typename Map>
void load_split_files(std::vector<std::string> const &items, Map &into, Load &&load)
{
    for (auto const &item : items) {
        auto const eq = item.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("expected split=path, got '" + item + "'");
        }
        auto split = parse_split(item.substr(0, eq));
        into[split] = load(fs::path(item.substr(eq + 1)), split);
    }
}

struct Options {
    unsigned threads = 1;
    std::string out;

    std::string corpus;
    std::string topics;
    std::string qrels;
    std::string index;
    std::string policy = "auto";
    std::size_t k = 1000;
    double k1 = 0.9;
    double b = 0.4;

    std::string doc_vectors;
    std::string query_vectors;
    std::string metric = "dot";

    std::vector<std::string> runs;
    std::string weights = "0.5,0.5";
    std::string normalize = "minmax";
    std::string tag;

    std::string pool;
    std::int64_t n = 100;
    std::uint64_t seed = 0;
    std::string universe = "pool";
    std::string lang;
    std::string test_topics;
    std::string train_topics;
    std::string train_qrels;
    double alpha = 0.9;
    std::size_t top_m = 1;
    double tau = 0.8;
    std::string run;
    double fraction = 0.5;

    std::string scorer = "lexical";
    std::size_t budget = 256;
    std::size_t batch = 64;

    std::string base_weights;
    double lambda = 0.5;

    std::string eval_metric = "ndcg";
    bool per_query = false;

    std::vector<std::string> split_topics;
    std::vector<std::string> split_qrels;

    std::string kind;
    std::vector<std::string> files;

    std::string config;
};

int cmd_index(Options const &o)
{
    CorpusReader reader{fs::path(o.corpus)};
    auto index = build_index(reader, parse_script_policy(o.policy), o.threads);
    index.save(o.out);
    std::cerr << "indexed " << index.doc_count() << " documents, " << index.term_count() << " terms\n";
    return ok;
}

int cmd_bm25(Options const &o)
{
    Bm25Params params{o.k1, o.b};
    params.validate();
    auto index = InvertedIndex::load(o.index);
    auto queries = load_topics(fs::path(o.topics));
    auto run = bm25_retrieve(index, queries, o.k, params, o.threads);
    if (!o.tag.empty()) {
        run.tag = o.tag;
    }
    with_output(o.out, [&](std::ostream &out) { write_trec_run(out, run); });
    return ok;
}

int cmd_dense(Options const &o)
{
    auto metric = parse_similarity(o.metric);
    auto docs = EmbeddingStore::load(o.doc_vectors, metric);
    auto queries = EmbeddingStore::load(o.query_vectors, metric);
    std::vector<std::string> qids;
    if (!o.topics.empty()) {
        for (auto const &q : load_topics(fs::path(o.topics))) {
            qids.push_back(q.qid);
        }
    }
    auto run = dense_retrieve(docs, queries, o.k, qids, o.threads);
    if (!o.tag.empty()) {
        run.tag = o.tag;
    }
    with_output(o.out, [&](std::ostream &out) { write_trec_run(out, run); });
    return ok;
}

int cmd_fuse(Options const &o)
{
    auto runs = read_runs(o.runs);
    auto weights = parse_weight_list(o.weights);
    check_weights(weights, runs.size());
    auto method = parse_normalization(o.normalize);
    for (auto &run : runs) {
        run = normalize_run(run, method);
    }
    auto fused = fuse(runs, weights, o.tag.empty() ? "hybrid" : o.tag);
    auto pool = cut_pool(fused, o.k).as_run();
    with_output(o.out, [&](std::ostream &out) { write_trec_run(out, pool); });
    return ok;
}

int cmd_negatives(Options const &o)
{
    auto texts = query_texts(load_topics(fs::path(o.topics)));
    auto qrels = load_qrels(fs::path(o.qrels));
    NegativeSample sample;
    if (o.universe == "corpus") {
        std::vector<std::string> ids;
        for_each_document(o.corpus, [&](Document &&doc) { ids.push_back(std::move(doc.docid)); });
        sample = sample_negatives_corpus(ids, qrels, texts, o.n, o.seed);
    } else if (o.universe == "pool") {
        auto pool = CandidatePool::from_run(read_trec_run(fs::path(o.pool)), o.k);
        sample = sample_negatives(pool, qrels, texts, o.n, o.seed);
    } else {
        throw InvalidArgument("--universe must be pool or corpus");
    }
    if (sample.skipped_queries > 0) {
        std::cerr << sample.skipped_queries << " queries without judgments skipped\n";
    }
    auto head = header_for(o.seed, "negatives", o.lang);
    with_output(o.out, [&](std::ostream &out) { write_training_pairs(out, sample.pairs, head); });
    return ok;
}

int cmd_q2q2d(Options const &o)
{
    AugmentationParams params;
    params.alpha = o.alpha;
    params.top_m = o.top_m;
    params.tau = o.tau;
    params.seed = o.seed;
    params.validate();
    auto test = load_topics(fs::path(o.test_topics));
    auto train = load_topics(fs::path(o.train_topics));
    auto train_qrels = load_qrels(fs::path(o.train_qrels));
    auto vectors = EmbeddingStore::load(o.query_vectors, Similarity::cosine);
    auto pairs = q2q2d_augment(test, train, train_qrels, vectors, params);
    auto head = header_for(o.seed, "q2q2d", o.lang);
    with_output(o.out, [&](std::ostream &out) { write_training_pairs(out, pairs, head); });
    return ok;
}

int cmd_pseudo(Options const &o)
{
    AugmentationParams params;
    params.pseudo_fraction = o.fraction;
    params.seed = o.seed;
    params.validate();
    auto run = read_trec_run(fs::path(o.run));
    auto texts = query_texts(load_topics(fs::path(o.topics)));
    auto pairs = pseudo_label(run, texts, params);
    auto head = header_for(o.seed, "pseudo", o.lang);
    with_output(o.out, [&](std::ostream &out) { write_training_pairs(out, pairs, head); });
    return ok;
}

int cmd_rerank(Options const &o)
{
    auto pool = CandidatePool::from_run(read_trec_run(fs::path(o.pool)), o.k);
    auto handle = ScorerHandle::parse(o.scorer);
    PairBuildOptions options;
    options.budget = o.budget;
    options.truncate = handle.kind == ScorerHandle::Kind::lexical_baseline;
    options.policy = parse_script_policy(o.policy);
    auto lookup = make_lookup(load_corpus(fs::path(o.corpus)));
    auto pairs = build_pairs(pool, query_texts(load_topics(fs::path(o.topics))), lookup, options);
    std::unique_ptr<Scorer> scorer;
    if (handle.kind == ScorerHandle::Kind::external_process) {
        scorer = std::make_unique<ProcessScorer>(handle.location, o.batch);
    } else {
        scorer = handle.open();
    }
    auto run = score_pairs(pairs, *scorer, o.tag.empty() ? "rerank" : o.tag);
    with_output(o.out, [&](std::ostream &out) { write_trec_run(out, run); });
    return ok;
}

int cmd_ensemble(Options const &o)
{
    auto runs = read_runs(o.runs);
    EnsembleConfig config;
    config.base_weights =
        o.base_weights.empty() ? std::vector<double>(runs.size(), 1.0) : parse_weight_list(o.base_weights);
    config.lambda = o.lambda;
    config.validate(runs.size());
    auto corr = correlation_matrix(runs);
    auto weights = adjust_weights(config, corr);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::cerr << o.runs[i] << "\tmean_corr=" << format_real(corr.off_diagonal_mean(i))
                  << "\tweight=" << format_real(weights[i]) << '\n';
    }
    auto run = ensemble_runs(runs, weights);
    if (!o.tag.empty()) {
        run.tag = o.tag;
    }
    with_output(o.out, [&](std::ostream &out) { write_trec_run(out, run); });
    return ok;
}

int cmd_eval(Options const &o)
{
    auto run = read_trec_run(fs::path(o.run));
    auto qrels = load_qrels(fs::path(o.qrels));
    auto report = evaluate(run, qrels, parse_eval_metric(o.eval_metric), o.k);
    with_output(o.out, [&](std::ostream &out) { write_report_tsv(out, report, o.per_query); });
    write_report_summary(std::cerr, report, fs::path(o.run).filename().string());
    return ok;
}

int cmd_stats(Options const &o)
{
    std::map<Split, std::vector<Query>> topics;
    std::map<Split, JudgmentSet> qrels;
    load_split_files(o.split_topics, topics,
                     [&](fs::path const &p, Split split) { return load_topics(p, o.lang, split); });
    load_split_files(o.split_qrels, qrels, [](fs::path const &p, Split) { return load_qrels(p); });
    std::size_t passages = 0;
    for (auto const &path : o.files) {
        for_each_document(path, [&](Document &&) { ++passages; });
    }
    auto row = corpus_stats(o.lang, passages, topics, qrels);
    with_output(o.out, [&](std::ostream &out) { write_stats(out, std::span<StatsRow const>(&row, 1)); });
    return ok;
}

int cmd_validate(Options const &o)
{
    std::optional<ArtifactKind> kind;
    if (!o.kind.empty()) {
        kind = parse_artifact_kind(o.kind);
    }
    std::vector<fs::path> paths(o.files.begin(), o.files.end());
    auto found = validate_artifacts(paths, kind);
    for (auto const &d : found) {
        write_diagnostic(std::cout, d);
    }
    std::cerr << paths.size() << " files checked, " << found.size() << " problems\n";
    return found.empty() ? ok : data;
}

int cmd_pipeline(Options const &o, bool threads_given)
{
    auto config = load_experiment_config(o.config);
    if (threads_given) {
        config.threads = o.threads;
    }
    auto summary = run_pipeline(config, &std::cerr);
    if (!summary.metrics.empty()) {
        write_summary(std::cout, summary.metrics);
    }
    return ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Multilingual passage retrieval toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "polyret 0.1.0");
    Options o;

    auto threads_option = [&](CLI::App *cmd) {
        return cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    };
    auto out_option = [&](CLI::App *cmd, bool required) {
        auto *opt = cmd->add_option("--out,-o", o.out, "Output path (stdout when omitted)");
        if (required) {
            opt->required();
        }
    };

    auto *index = app.add_subcommand("index", "Inverted index operations");
    index->require_subcommand(1);
    auto *index_build = index->add_subcommand("build", "Build a BM25 index from a JSONL corpus");
    index_build->add_option("--corpus", o.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    index_build->add_option("--script-policy", o.policy, "whitespace, unigram or auto");
    out_option(index_build, true);
    threads_option(index_build);

    auto *retrieve = app.add_subcommand("retrieve", "First-stage retrieval");
    retrieve->require_subcommand(1);
    auto *bm25 = retrieve->add_subcommand("bm25", "BM25 over a built index");
    bm25->add_option("--index", o.index, "Index file")->required()->check(CLI::ExistingFile);
    bm25->add_option("--topics", o.topics, "Topics TSV")->required()->check(CLI::ExistingFile);
    bm25->add_option("-k,--depth", o.k, "Hits per query")->check(CLI::PositiveNumber);
    bm25->add_option("--k1", o.k1, "BM25 k1");
    bm25->add_option("--b", o.b, "BM25 b");
    bm25->add_option("--tag", o.tag, "Run tag");
    out_option(bm25, false);
    threads_option(bm25);

    auto *dense = retrieve->add_subcommand("dense", "Exhaustive vector search");
    dense->add_option("--docs", o.doc_vectors, "Document vectors")->required()->check(CLI::ExistingFile);
    dense->add_option("--queries", o.query_vectors, "Query vectors")->required()->check(CLI::ExistingFile);
    dense->add_option("--topics", o.topics, "Only search these qids")->check(CLI::ExistingFile);
    dense->add_option("--metric", o.metric, "dot or cosine");
    dense->add_option("-k,--depth", o.k, "Hits per query")->check(CLI::PositiveNumber);
    dense->add_option("--tag", o.tag, "Run tag");
    out_option(dense, false);
    threads_option(dense);

    auto *fuse_cmd = app.add_subcommand("fuse", "Weighted score fusion");
    fuse_cmd->add_option("--runs", o.runs, "Run files")->required()->expected(1, -1);
    fuse_cmd->add_option("--weights", o.weights, "Comma-separated weights, one per run");
    fuse_cmd->add_option("--normalize", o.normalize, "minmax or none");
    fuse_cmd->add_option("-k,--depth", o.k, "Candidates kept per query")->check(CLI::PositiveNumber);
    fuse_cmd->add_option("--tag", o.tag, "Run tag");
    out_option(fuse_cmd, false);

    auto *forge = app.add_subcommand("forge", "Training data generation");
    forge->require_subcommand(1);
    auto *negatives = forge->add_subcommand("negatives", "Random negatives");
    negatives->add_option("--pool", o.pool, "Candidate pool run");
    negatives->add_option("--corpus", o.corpus, "Corpus JSONL (universe corpus)");
    negatives->add_option("--universe", o.universe, "pool or corpus");
    negatives->add_option("--topics", o.topics, "Topics TSV")->required()->check(CLI::ExistingFile);
    negatives->add_option("--qrels", o.qrels, "Qrels")->required()->check(CLI::ExistingFile);
    negatives->add_option("-n", o.n, "Negatives per query");
    negatives->add_option("-k,--depth", o.k, "Pool depth");
    negatives->add_option("--seed", o.seed, "Global seed");
    negatives->add_option("--lang", o.lang, "Language recorded in the header");
    out_option(negatives, false);

    auto *q2q2d = forge->add_subcommand("q2q2d", "Label transfer from similar train queries");
    q2q2d->add_option("--test-topics", o.test_topics, "Queries to augment")->required()->check(CLI::ExistingFile);
    q2q2d->add_option("--train-topics", o.train_topics, "Labelled queries")->required()->check(CLI::ExistingFile);
    q2q2d->add_option("--train-qrels", o.train_qrels, "Train qrels")->required()->check(CLI::ExistingFile);
    q2q2d->add_option("--query-vectors", o.query_vectors, "Vectors for test and train queries")
        ->required()
        ->check(CLI::ExistingFile);
    q2q2d->add_option("--alpha", o.alpha, "Label damping");
    q2q2d->add_option("--top-m", o.top_m, "Neighbours per query");
    q2q2d->add_option("--tau", o.tau, "Similarity threshold");
    q2q2d->add_option("--seed", o.seed, "Global seed");
    q2q2d->add_option("--lang", o.lang, "Language recorded in the header");
    out_option(q2q2d, false);

    auto *pseudo = forge->add_subcommand("pseudo", "Soft labels from a scored run");
    pseudo->add_option("--run", o.run, "Scored run, scores in [0, 1]")->required()->check(CLI::ExistingFile);
    pseudo->add_option("--topics", o.topics, "Topics TSV")->required()->check(CLI::ExistingFile);
    pseudo->add_option("--fraction", o.fraction, "Share of triples kept");
    pseudo->add_option("--seed", o.seed, "Global seed");
    pseudo->add_option("--lang", o.lang, "Language recorded in the header");
    out_option(pseudo, false);

    auto *rerank = app.add_subcommand("rerank", "Score a candidate pool");
    rerank->add_option("--pool", o.pool, "Candidate pool run")->required()->check(CLI::ExistingFile);
    rerank->add_option("--corpus", o.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
    rerank->add_option("--topics", o.topics, "Topics TSV")->required()->check(CLI::ExistingFile);
    rerank->add_option("--scorer", o.scorer, "cmd:<command>, file:<scores> or lexical");
    rerank->add_option("--budget", o.budget, "Pair token budget");
    rerank->add_option("--batch", o.batch, "Requests per batch for cmd scorers")->check(CLI::PositiveNumber);
    rerank->add_option("--script-policy", o.policy, "Tokenizer for the lexical scorer");
    rerank->add_option("-k,--depth", o.k, "Pool depth")->check(CLI::PositiveNumber);
    rerank->add_option("--tag", o.tag, "Run tag");
    out_option(rerank, false);

    auto *ensemble = app.add_subcommand("ensemble", "Correlation-aware run ensemble");
    ensemble->add_option("--runs", o.runs, "Run files")->required()->expected(2, -1);
    ensemble->add_option("--base-weights", o.base_weights, "Comma-separated base weights");
    ensemble->add_option("--lambda", o.lambda, "Correlation penalty in [0, 1]");
    ensemble->add_option("--tag", o.tag, "Run tag");
    out_option(ensemble, false);

    auto *eval = app.add_subcommand("eval", "nDCG@k or recall@k");
    eval->add_option("--run", o.run, "Run file")->required()->check(CLI::ExistingFile);
    eval->add_option("--qrels", o.qrels, "Qrels")->required()->check(CLI::ExistingFile);
    eval->add_option("--metric", o.eval_metric, "ndcg or recall");
    eval->add_option("-k,--depth", o.k, "Cutoff")->check(CLI::PositiveNumber);
    eval->add_flag("--per-query", o.per_query, "Emit one line per query");
    out_option(eval, false);

    auto *stats = app.add_subcommand("stats", "Dataset statistics");
    stats->add_option("--lang", o.lang, "Language code")->required();
    stats->add_option("--corpus", o.files, "Corpus JSONL files")->check(CLI::ExistingFile);
    stats->add_option("--topics", o.split_topics, "split=path, repeatable");
    stats->add_option("--qrels", o.split_qrels, "split=path, repeatable");
    out_option(stats, false);

    auto *validate = app.add_subcommand("validate", "Check artifacts against their formats");
    validate->add_option("--kind", o.kind, "Force the artifact kind");
    validate->add_option("files", o.files, "Files to check")->required()->check(CLI::ExistingFile);

    auto *pipeline = app.add_subcommand("pipeline", "Run an experiment config");
    pipeline->add_option("--config", o.config, "Experiment config")->required()->check(CLI::ExistingFile);
    auto *pipeline_threads = threads_option(pipeline);

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const &e) {
        int const code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    // Ranking defaults differ by command; apply them unless -k was given.
    auto depth_given = [](CLI::App *cmd) { return cmd->count("-k") > 0; };

    try {
        if (index_build->parsed()) {
            return cmd_index(o);
        }
        if (bm25->parsed()) {
            return cmd_bm25(o);
        }
        if (dense->parsed()) {
            return cmd_dense(o);
        }
        if (fuse_cmd->parsed()) {
            if (!depth_given(fuse_cmd)) {
                o.k = 200;
            }
            return cmd_fuse(o);
        }
        if (negatives->parsed()) {
            if (!depth_given(negatives)) {
                o.k = 200;
            }
            if (o.universe == "pool" && o.pool.empty()) {
                throw InvalidArgument("--pool is required with --universe pool");
            }
            if (o.universe == "corpus" && o.corpus.empty()) {
                throw InvalidArgument("--corpus is required with --universe corpus");
            }
            return cmd_negatives(o);
        }
        if (q2q2d->parsed()) {
            return cmd_q2q2d(o);
        }
        if (pseudo->parsed()) {
            return cmd_pseudo(o);
        }
        if (rerank->parsed()) {
            if (!depth_given(rerank)) {
                o.k = 200;
            }
            return cmd_rerank(o);
        }
        if (ensemble->parsed()) {
            return cmd_ensemble(o);
        }
        if (eval->parsed()) {
            if (!depth_given(eval)) {
                o.k = 10;
            }
            return cmd_eval(o);
        }
        if (stats->parsed()) {
            return cmd_stats(o);
        }
        if (validate->parsed()) {
            return cmd_validate(o);
        }
        if (pipeline->parsed()) {
            return cmd_pipeline(o, pipeline_threads->count() > 0);
        }
        std::cerr << app.help();
        return usage;
    } catch (InvalidArgument const &e) {
        std::cerr << "polyret: " << e.what() << '\n';
        return usage;
    } catch (ProtocolError const &e) {
        std::cerr << "polyret: scorer: " << e.what() << '\n';
        return protocol;
    } catch (DataError const &e) {
        std::cerr << "polyret: " << e.what() << '\n';
        return data;
    } catch (std::exception const &e) {
        std::cerr << "polyret: " << e.what() << '\n';
        return data;
    }
}
