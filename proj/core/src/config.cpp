#include "polyret/config.hpp"

#include "polyret/corpus_io.hpp"
#include "polyret/ensemble.hpp"
#include "polyret/error.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <map>

namespace polyret {

namespace {

std::vector<std::string> parse_list(std::string_view value)
{
    std::vector<std::string> items;
    for (auto field : split_on(value, ',')) {
        auto item = trim(field);
        if (!item.empty()) {
            items.emplace_back(item);
        }
    }
    return items;
}

std::size_t parse_count(std::string_view value)
{
    auto n = parse_int(value);
    if (!n || *n < 0) {
        throw InvalidArgument("'" + std::string(value) + "' is not a non-negative integer");
    }
    return static_cast<std::size_t>(*n);
}

double parse_number(std::string_view value)
{
    auto x = parse_real(value);
    if (!x) {
        throw InvalidArgument("'" + std::string(value) + "' is not a number");
    }
    return *x;
}

std::vector<double> parse_numbers(std::string_view value)
{
    std::vector<double> numbers;
    for (auto const &item : parse_list(value)) {
        numbers.push_back(parse_number(item));
    }
    return numbers;
}

using Setter = std::function<void(ExperimentConfig &, std::string_view)>;

std::map<std::string, Setter, std::less<>> const &setters()
{
    static std::map<std::string, Setter, std::less<>> const table = {
        {"seed",
         [](ExperimentConfig &c, std::string_view v) {
             auto n = parse_int(v);
             if (!n || *n < 0) {
                 throw InvalidArgument("seed must be a non-negative integer");
             }
             c.seed = static_cast<std::uint64_t>(*n);
         }},
        {"languages", [](ExperimentConfig &c, std::string_view v) { c.languages = parse_list(v); }},
        {"stages",
         [](ExperimentConfig &c, std::string_view v) {
             c.stages.clear();
             for (auto const &name : parse_list(v)) {
                 c.stages.push_back(parse_stage(name));
             }
         }},
        {"output_dir", [](ExperimentConfig &c, std::string_view v) { c.output_dir = std::string(v); }},
        {"threads", [](ExperimentConfig &c, std::string_view v) { c.threads = static_cast<unsigned>(parse_count(v)); }},
        {"corpus", [](ExperimentConfig &c, std::string_view v) { c.corpus = std::string(v); }},
        {"topics", [](ExperimentConfig &c, std::string_view v) { c.topics = std::string(v); }},
        {"qrels", [](ExperimentConfig &c, std::string_view v) { c.qrels = std::string(v); }},
        {"doc_vectors", [](ExperimentConfig &c, std::string_view v) { c.doc_vectors = std::string(v); }},
        {"query_vectors", [](ExperimentConfig &c, std::string_view v) { c.query_vectors = std::string(v); }},
        {"index.script_policy",
         [](ExperimentConfig &c, std::string_view v) { c.script_policy = parse_script_policy(v); }},
        {"bm25.k1", [](ExperimentConfig &c, std::string_view v) { c.bm25.k1 = parse_number(v); }},
        {"bm25.b", [](ExperimentConfig &c, std::string_view v) { c.bm25.b = parse_number(v); }},
        {"bm25.depth", [](ExperimentConfig &c, std::string_view v) { c.bm25_depth = parse_count(v); }},
        {"dense.metric", [](ExperimentConfig &c, std::string_view v) { c.dense_metric = parse_similarity(v); }},
        {"dense.depth", [](ExperimentConfig &c, std::string_view v) { c.dense_depth = parse_count(v); }},
        {"fuse.weights", [](ExperimentConfig &c, std::string_view v) { c.fuse_weights = parse_numbers(v); }},
        {"fuse.normalize",
         [](ExperimentConfig &c, std::string_view v) { c.fuse_normalization = parse_normalization(v); }},
        {"pool.k", [](ExperimentConfig &c, std::string_view v) { c.pool_k = parse_count(v); }},
        {"negatives.n",
         [](ExperimentConfig &c, std::string_view v) { c.negatives_n = static_cast<std::int64_t>(parse_count(v)); }},
        {"negatives.universe",
         [](ExperimentConfig &c, std::string_view v) {
             if (v != "pool" && v != "corpus") {
                 throw InvalidArgument("negatives.universe must be pool or corpus");
             }
             c.negatives_universe = std::string(v);
         }},
        {"q2q2d.test_topics", [](ExperimentConfig &c, std::string_view v) { c.q2q2d_test_topics = std::string(v); }},
        {"q2q2d.train_topics", [](ExperimentConfig &c, std::string_view v) { c.q2q2d_train_topics = std::string(v); }},
        {"q2q2d.train_qrels", [](ExperimentConfig &c, std::string_view v) { c.q2q2d_train_qrels = std::string(v); }},
        {"q2q2d.query_vectors",
         [](ExperimentConfig &c, std::string_view v) { c.q2q2d_query_vectors = std::string(v); }},
        {"q2q2d.alpha", [](ExperimentConfig &c, std::string_view v) { c.augmentation.alpha = parse_number(v); }},
        {"q2q2d.top_m", [](ExperimentConfig &c, std::string_view v) { c.augmentation.top_m = parse_count(v); }},
        {"q2q2d.tau", [](ExperimentConfig &c, std::string_view v) { c.augmentation.tau = parse_number(v); }},
        {"pseudo.fraction",
         [](ExperimentConfig &c, std::string_view v) { c.augmentation.pseudo_fraction = parse_number(v); }},
        {"rerank.scorer", [](ExperimentConfig &c, std::string_view v) { c.rerank_scorer = std::string(v); }},
        {"rerank.budget", [](ExperimentConfig &c, std::string_view v) { c.rerank_budget = parse_count(v); }},
        {"ensemble.inputs", [](ExperimentConfig &c, std::string_view v) { c.ensemble_inputs = parse_list(v); }},
        {"ensemble.base_weights",
         [](ExperimentConfig &c, std::string_view v) { c.ensemble_base_weights = parse_numbers(v); }},
        {"ensemble.lambda", [](ExperimentConfig &c, std::string_view v) { c.ensemble_lambda = parse_number(v); }},
        {"eval.ndcg_k", [](ExperimentConfig &c, std::string_view v) { c.eval_ndcg_k = parse_count(v); }},
        {"eval.recall_k", [](ExperimentConfig &c, std::string_view v) { c.eval_recall_k = parse_count(v); }},
    };
    return table;
}

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::index, "index"},       {Stage::bm25, "bm25"},         {Stage::dense, "dense"},
    {Stage::fuse, "fuse"},         {Stage::negatives, "negatives"}, {Stage::q2q2d, "q2q2d"},
    {Stage::rerank, "rerank"},     {Stage::pseudo, "pseudo"},     {Stage::ensemble, "ensemble"},
    {Stage::eval, "eval"},
};

} // namespace

Stage parse_stage(std::string_view name)
{
    for (auto const &[stage, text] : kStageNames) {
        if (text == name) {
            return stage;
        }
    }
    throw InvalidArgument("unknown stage '" + std::string(name) + "'");
}

std::string_view to_string(Stage stage) noexcept
{
    for (auto const &[s, text] : kStageNames) {
        if (s == stage) {
            return text;
        }
    }
    return "unknown";
}

std::filesystem::path ExperimentConfig::resolve(std::string const &pattern, std::string const &language) const
{
    if (pattern.empty()) {
        return {};
    }
    std::string expanded = pattern;
    constexpr std::string_view placeholder = "{lang}";
    std::size_t pos = 0;
    while ((pos = expanded.find(placeholder, pos)) != std::string::npos) {
        expanded.replace(pos, placeholder.size(), language);
        pos += language.size();
    }
    std::filesystem::path path(expanded);
    return path.is_absolute() ? path : base_dir / path;
}

std::filesystem::path ExperimentConfig::language_dir(std::string const &language) const
{
    return resolve(output_dir, language) / language;
}

ExperimentConfig parse_experiment_config(std::istream &in, std::string const &source, std::filesystem::path base_dir)
{
    ExperimentConfig config;
    config.base_dir = std::move(base_dir);
    std::string line;
    std::size_t line_number = 0;
    bool have_schema = false;
    while (read_line(in, line)) {
        ++line_number;
        std::string_view body = line;
        if (auto hash = body.find('#'); hash != std::string_view::npos) {
            body = body.substr(0, hash);
        }
        body = trim(body);
        if (body.empty()) {
            continue;
        }
        auto const eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw DataError(source, line_number, "expected key = value");
        }
        auto const key = trim(body.substr(0, eq));
        auto const value = trim(body.substr(eq + 1));
        if (!have_schema) {
            if (key != "schema") {
                throw DataError(source, line_number, "first setting must be schema = " + std::string(kExperimentSchema));
            }
            if (value != kExperimentSchema) {
                throw DataError(source, line_number, "unsupported schema '" + std::string(value) + "'");
            }
            have_schema = true;
            continue;
        }
        auto const &table = setters();
        auto it = table.find(key);
        if (it == table.end()) {
            throw DataError(source, line_number, "unknown key '" + std::string(key) + "'");
        }
        try {
            it->second(config, value);
        } catch (InvalidArgument const &e) {
            throw DataError(source, line_number, std::string(key) + ": " + e.what());
        }
    }
    if (!have_schema) {
        throw DataError(source, 0, "missing schema line");
    }
    if (config.languages.empty()) {
        throw DataError(source, 0, "languages must list at least one language");
    }
    if (config.stages.empty()) {
        throw DataError(source, 0, "stages must list at least one stage");
    }
    try {
        config.bm25.validate();
        config.augmentation.validate();
        EnsembleConfig{config.ensemble_base_weights, config.ensemble_lambda}.validate(
            config.ensemble_base_weights.size());
    } catch (InvalidArgument const &e) {
        throw DataError(source, 0, e.what());
    }
    std::sort(config.stages.begin(), config.stages.end());
    config.stages.erase(std::unique(config.stages.begin(), config.stages.end()), config.stages.end());
    return config;
}

ExperimentConfig load_experiment_config(std::filesystem::path const &path)
{
    auto in = open_input(path);
    auto base = path.parent_path();
    if (base.empty()) {
        base = ".";
    }
    return parse_experiment_config(in, path.string(), base);
}

} // namespace polyret
