#include "polyret/validate.hpp"

#include "polyret/corpus_io.hpp"
#include "polyret/data_forge.hpp"
#include "polyret/error.hpp"
#include "polyret/sparse_index.hpp"
#include "polyret/text.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_set>

namespace polyret {

namespace fs = std::filesystem;

namespace {

constexpr std::pair<ArtifactKind, std::string_view> kKindNames[] = {
    {ArtifactKind::corpus, "corpus"}, {ArtifactKind::topics, "topics"},   {ArtifactKind::qrels, "qrels"},
    {ArtifactKind::run, "run"},       {ArtifactKind::vectors, "vectors"}, {ArtifactKind::pairs, "pairs"},
    {ArtifactKind::index, "index"},   {ArtifactKind::report, "report"},
};

class Checker {
   public:
    explicit Checker(std::string source) : source_(std::move(source)) {}

    void fail(std::size_t line, std::string rule, std::string message)
    {
        found_.push_back(Diagnostic{source_, line, std::move(rule), std::move(message)});
    }

    std::vector<Diagnostic> take() { return std::move(found_); }
    std::string const &source() const { return source_; }

   private:
    std::string source_;
    std::vector<Diagnostic> found_;
};

bool is_comment(std::string_view line)
{
    return !line.empty() && line.front() == '#';
}

// Visits data lines: skips blank and '#' lines unless `comments` is false.
template <typename Visit>
void for_each_line(std::istream &in, bool comments, Visit &&visit)
{
    std::string line;
    std::size_t number = 0;
    while (read_line(in, line)) {
        ++number;
        if (comments && is_comment(line)) {
            continue;
        }
        visit(number, line);
    }
}

void check_corpus(std::istream &in, Checker &check)
{
    std::unordered_set<std::string> seen;
    std::size_t records = 0;
    for_each_line(in, false, [&](std::size_t number, std::string const &line) {
        if (trim(line).empty()) {
            return;
        }
        try {
            auto doc = parse_document_line(line, check.source(), number);
            if (!seen.insert(doc.docid).second) {
                check.fail(number, "corpus.duplicate", "docid '" + doc.docid + "' appears twice");
            }
            ++records;
        } catch (DataError const &e) {
            check.fail(number, "corpus.record", e.what());
        }
    });
    if (records == 0) {
        check.fail(0, "corpus.empty", "no documents");
    }
}

void check_topics(std::istream &in, Checker &check)
{
    std::unordered_set<std::string> seen;
    for_each_line(in, false, [&](std::size_t number, std::string const &line) {
        if (trim(line).empty()) {
            return;
        }
        auto const tab = line.find('\t');
        if (tab == std::string::npos) {
            check.fail(number, "topics.columns", "expected qid<TAB>text");
            return;
        }
        auto qid = std::string(trim(std::string_view(line).substr(0, tab)));
        auto text = trim(std::string_view(line).substr(tab + 1));
        if (qid.empty()) {
            check.fail(number, "topics.qid", "empty qid");
        }
        if (text.empty()) {
            check.fail(number, "topics.text", "empty query text");
        }
        if (!is_valid_utf8(line)) {
            check.fail(number, "topics.utf8", "invalid UTF-8");
        }
        if (!qid.empty() && !seen.insert(qid).second) {
            check.fail(number, "topics.duplicate", "qid '" + qid + "' appears twice");
        }
    });
}

void check_qrels(std::istream &in, Checker &check)
{
    std::set<std::pair<std::string, std::string>> seen;
    for_each_line(in, true, [&](std::size_t number, std::string const &line) {
        auto fields = split_whitespace(line);
        if (fields.empty()) {
            return;
        }
        if (fields.size() != 4) {
            check.fail(number, "qrels.columns",
                       "expected 'qid Q0 docid grade', found " + std::to_string(fields.size()) + " columns");
            return;
        }
        auto grade = parse_int(fields[3]);
        if (!grade) {
            check.fail(number, "qrels.grade", "grade '" + std::string(fields[3]) + "' is not an integer");
        } else if (*grade < 0) {
            check.fail(number, "qrels.negative-grade", "grade " + std::to_string(*grade) + " is negative");
        }
        if (!seen.emplace(std::string(fields[0]), std::string(fields[2])).second) {
            check.fail(number, "qrels.duplicate",
                       "(" + std::string(fields[0]) + ", " + std::string(fields[2]) + ") judged twice");
        }
    });
}

void check_run(std::istream &in, Checker &check)
{
    struct Previous {
        std::string docid;
        double score = 0.0;
        std::int64_t rank = 0;
    };
    std::set<std::pair<std::string, std::string>> seen;
    std::set<std::string> finished;
    std::string current;
    std::optional<Previous> previous;
    std::optional<std::string> tag;
    for_each_line(in, true, [&](std::size_t number, std::string const &line) {
        auto fields = split_whitespace(line);
        if (fields.empty()) {
            return;
        }
        if (fields.size() != 6) {
            check.fail(number, "run.columns",
                       "expected 'qid Q0 docid rank score tag', found " + std::to_string(fields.size()) +
                           " columns");
            return;
        }
        std::string qid(fields[0]);
        std::string docid(fields[2]);
        auto rank = parse_int(fields[3]);
        auto score = parse_real(fields[4]);
        if (!tag) {
            tag = std::string(fields[5]);
        } else if (*tag != fields[5]) {
            check.fail(number, "run.tag", "tag '" + std::string(fields[5]) + "' differs from '" + *tag + "'");
        }
        if (!score || !std::isfinite(*score)) {
            check.fail(number, "run.score", "score '" + std::string(fields[4]) + "' is not a finite number");
        }
        if (!rank) {
            check.fail(number, "run.rank", "rank '" + std::string(fields[3]) + "' is not an integer");
        }
        bool const duplicate = !seen.emplace(qid, docid).second;
        if (duplicate) {
            check.fail(number, "run.duplicate", "(" + qid + ", " + docid + ") listed twice");
        }
        bool regrouped = false;
        if (qid != current) {
            if (!current.empty()) {
                finished.insert(current);
            }
            if (finished.count(qid) != 0) {
                check.fail(number, "run.grouping", "lines for query '" + qid + "' are not contiguous");
                regrouped = true;
            }
            current = qid;
            previous.reset();
        }
        auto const expected_rank = previous ? previous->rank + 1 : 1;
        if (rank && *rank != expected_rank && !regrouped) {
            check.fail(number, "run.rank",
                       "rank " + std::to_string(*rank) + " where " + std::to_string(expected_rank) + " was expected");
        }
        if (score && previous && !duplicate) {
            bool const ordered =
                *score < previous->score || (*score == previous->score && docid > previous->docid);
            if (!ordered) {
                check.fail(number, "run.order", "'" + docid + "' is out of score order");
            }
        }
        previous = Previous{docid, score.value_or(0.0), rank.value_or(expected_rank)};
    });
}

void check_vectors(std::istream &in, Checker &check)
{
    std::unordered_set<std::string> seen;
    std::optional<std::size_t> dim;
    std::size_t records = 0;
    for_each_line(in, true, [&](std::size_t number, std::string const &line) {
        if (trim(line).empty()) {
            return;
        }
        auto const tab = line.find('\t');
        if (tab == std::string::npos) {
            check.fail(number, "vectors.columns", "expected id<TAB>v1,v2,...");
            return;
        }
        std::string id(trim(std::string_view(line).substr(0, tab)));
        if (id.empty()) {
            check.fail(number, "vectors.id", "empty vector id");
        } else if (!seen.insert(id).second) {
            check.fail(number, "vectors.duplicate", "id '" + id + "' appears twice");
        }
        auto values = split_on(std::string_view(line).substr(tab + 1), ',');
        for (auto field : values) {
            if (!parse_float(trim(field))) {
                check.fail(number, "vectors.value", "'" + std::string(field) + "' is not a finite number");
                break;
            }
        }
        if (!dim) {
            dim = values.size();
        } else if (*dim != values.size()) {
            check.fail(number, "vectors.dimension",
                       "dimension " + std::to_string(values.size()) + " differs from " + std::to_string(*dim));
        }
        ++records;
    });
    if (records == 0) {
        check.fail(0, "vectors.empty", "no vectors");
    }
}

void check_pairs(std::istream &in, Checker &check)
{
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for_each_line(in, true, [&](std::size_t number, std::string const &line) {
        if (line.empty()) {
            return;
        }
        auto fields = split_on(line, '\t');
        if (fields.size() != 5) {
            check.fail(number, "pairs.columns",
                       "expected 5 tab-separated columns, found " + std::to_string(fields.size()));
            return;
        }
        auto label = parse_real(fields[2]);
        if (!label || *label < 0.0 || *label > 1.0) {
            check.fail(number, "pairs.label", "label '" + std::string(fields[2]) + "' is not a real in [0, 1]");
        }
        std::optional<PairSource> source;
        try {
            source = parse_pair_source(fields[3]);
        } catch (InvalidArgument const &e) {
            check.fail(number, "pairs.source", e.what());
        }
        if (source && label) {
            if (*source == PairSource::negative && *label != 0.0) {
                check.fail(number, "pairs.negative-label", "negative pair with non-zero label");
            }
            if (*source == PairSource::annotation && *label != 0.0 && *label != 1.0) {
                check.fail(number, "pairs.annotation-label", "annotation pair with non-binary label");
            }
        }
        if (fields[0].empty() || fields[1].empty()) {
            check.fail(number, "pairs.id", "empty qid or docid");
        }
        // Several neighbours may transfer the same document, so q2q2d rows can repeat.
        if (source != PairSource::q2q2d &&
            !seen.emplace(std::string(fields[0]), std::string(fields[1]), std::string(fields[3])).second) {
            check.fail(number, "pairs.duplicate", "(" + std::string(fields[0]) + ", " + std::string(fields[1]) +
                                                      ", " + std::string(fields[3]) + ") listed twice");
        }
    });
}

bool is_metric_label(std::string_view field)
{
    auto const at = field.find('@');
    if (at == std::string_view::npos) {
        return false;
    }
    auto const name = field.substr(0, at);
    auto const k = parse_int(field.substr(at + 1));
    return (name == "ndcg" || name == "recall") && k && *k > 0;
}

void check_report(std::istream &in, Checker &check)
{
    for_each_line(in, true, [&](std::size_t number, std::string const &line) {
        if (line.empty()) {
            return;
        }
        auto fields = split_on(line, '\t');
        if (fields.size() != 3 && fields.size() != 4) {
            check.fail(number, "report.columns",
                       "expected 3 or 4 tab-separated columns, found " + std::to_string(fields.size()));
            return;
        }
        bool labelled = false;
        for (auto field : fields) {
            labelled = labelled || is_metric_label(field);
        }
        if (!labelled) {
            check.fail(number, "report.metric", "no metric@k column");
        }
        auto value = parse_real(fields.back());
        if (!value || *value < 0.0 || *value > 1.0) {
            check.fail(number, "report.value", "value '" + std::string(fields.back()) + "' is not in [0, 1]");
        }
    });
}

void check_index(std::istream &in, Checker &check)
{
    try {
        auto index = InvertedIndex::read(in, check.source());
        if (in.peek() != std::char_traits<char>::eof()) {
            check.fail(0, "index.trailing", "bytes after the index trailer");
        }
    } catch (Error const &e) {
        check.fail(0, "index.format", e.what());
    }
}

std::optional<ArtifactKind> sniff_line(std::string_view line)
{
    if (line.starts_with('{')) {
        return ArtifactKind::corpus;
    }
    auto tabs = split_on(line, '\t');
    if (tabs.size() == 5) {
        try {
            (void)parse_pair_source(tabs[3]);
            return ArtifactKind::pairs;
        } catch (InvalidArgument const &) {
        }
    }
    if (tabs.size() == 3 || tabs.size() == 4) {
        for (auto field : tabs) {
            if (is_metric_label(field)) {
                return ArtifactKind::report;
            }
        }
    }
    if (tabs.size() == 2) {
        bool numeric = true;
        for (auto field : split_on(tabs[1], ',')) {
            numeric = numeric && parse_float(trim(field)).has_value();
        }
        return numeric ? ArtifactKind::vectors : ArtifactKind::topics;
    }
    auto words = split_whitespace(line);
    if (words.size() == 6 && words[1] == "Q0") {
        return ArtifactKind::run;
    }
    if (words.size() == 4 && (words[1] == "Q0" || words[1] == "0")) {
        return ArtifactKind::qrels;
    }
    return std::nullopt;
}

} // namespace

ArtifactKind parse_artifact_kind(std::string_view name)
{
    for (auto const &[kind, text] : kKindNames) {
        if (text == name) {
            return kind;
        }
    }
    throw InvalidArgument("unknown artifact kind '" + std::string(name) + "'");
}

std::string_view to_string(ArtifactKind kind) noexcept
{
    for (auto const &[k, text] : kKindNames) {
        if (k == kind) {
            return text;
        }
    }
    return "unknown";
}

std::optional<ArtifactKind> detect_artifact_kind(fs::path const &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    char magic[8] = {};
    in.read(magic, sizeof(magic));
    if (in.gcount() == 8 && std::string_view(magic, 8) == "POLYRIDX") {
        return ArtifactKind::index;
    }
    auto const ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".json") {
        return ArtifactKind::corpus;
    }
    if (ext == ".trec" || ext == ".run") {
        return ArtifactKind::run;
    }
    if (ext == ".vec" || ext == ".vectors") {
        return ArtifactKind::vectors;
    }
    auto const stem = path.filename().string();
    if (stem.find("qrels") != std::string::npos) {
        return ArtifactKind::qrels;
    }
    if (stem.find("topics") != std::string::npos) {
        return ArtifactKind::topics;
    }
    in.clear();
    in.seekg(0);
    std::string line;
    while (read_line(in, line)) {
        if (trim(line).empty() || is_comment(line)) {
            continue;
        }
        return sniff_line(line);
    }
    return std::nullopt;
}

std::vector<Diagnostic> validate_stream(std::istream &in, ArtifactKind kind, std::string const &source)
{
    Checker check(source);
    switch (kind) {
    case ArtifactKind::corpus: check_corpus(in, check); break;
    case ArtifactKind::topics: check_topics(in, check); break;
    case ArtifactKind::qrels: check_qrels(in, check); break;
    case ArtifactKind::run: check_run(in, check); break;
    case ArtifactKind::vectors: check_vectors(in, check); break;
    case ArtifactKind::pairs: check_pairs(in, check); break;
    case ArtifactKind::index: check_index(in, check); break;
    case ArtifactKind::report: check_report(in, check); break;
    }
    return check.take();
}

std::vector<Diagnostic> validate_file(fs::path const &path, std::optional<ArtifactKind> kind)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return {Diagnostic{path.string(), 0, "file.open", "cannot open"}};
    }
    if (!kind) {
        kind = detect_artifact_kind(path);
    }
    if (!kind) {
        return {Diagnostic{path.string(), 0, "file.kind", "cannot tell what kind of artifact this is"}};
    }
    return validate_stream(in, *kind, path.string());
}

std::vector<Diagnostic> validate_artifacts(std::span<fs::path const> paths, std::optional<ArtifactKind> kind)
{
    std::vector<Diagnostic> all;
    for (auto const &path : paths) {
        auto found = validate_file(path, kind);
        all.insert(all.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
    }
    return all;
}

void write_diagnostic(std::ostream &out, Diagnostic const &diagnostic)
{
    out << diagnostic.file << ':' << diagnostic.line << ": [" << diagnostic.rule << "] " << diagnostic.message
        << '\n';
}

} // namespace polyret
