#include "polyret/corpus_io.hpp"

#include "polyret/error.hpp"
#include "polyret/text.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

namespace polyret {

namespace {

std::string json_string_field(nlohmann::json const &record, char const *name, bool required,
                              std::string const &source, std::size_t line)
{
    auto it = record.find(name);
    if (it == record.end() || it->is_null()) {
        if (required) {
            throw DataError(source, line, std::string("missing field \"") + name + "\"");
        }
        return {};
    }
    if (!it->is_string()) {
        throw DataError(source, line, std::string("field \"") + name + "\" is not a string");
    }
    return it->get<std::string>();
}

void require_utf8(std::string_view line, std::string const &source, std::size_t line_number)
{
    if (!is_valid_utf8(line)) {
        throw DataError(source, line_number, "invalid UTF-8");
    }
}

} // namespace

Split parse_split(std::string_view name)
{
    if (name == "train") {
        return Split::train;
    }
    if (name == "dev") {
        return Split::dev;
    }
    if (name == "test-a" || name == "testA" || name == "test_a") {
        return Split::test_a;
    }
    if (name == "test-b" || name == "testB" || name == "test_b") {
        return Split::test_b;
    }
    throw InvalidArgument("unknown split '" + std::string(name) + "'");
}

std::string_view to_string(Split split) noexcept
{
    switch (split) {
    case Split::train:
        return "train";
    case Split::dev:
        return "dev";
    case Split::test_a:
        return "test-a";
    case Split::test_b:
        return "test-b";
    }
    return "train";
}

bool read_line(std::istream &in, std::string &line)
{
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

std::ifstream open_input(std::filesystem::path const &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(path.string(), 0, "cannot open file");
    }
    return in;
}

// ---------------------------------------------------------------------------
// JudgmentSet

void JudgmentSet::add(std::string const &qid, std::string const &docid, int grade)
{
    if (grade < 0) {
        throw DataError("negative grade " + std::to_string(grade) + " for (" + qid + ", " + docid +
                        ")");
    }
    auto &row = table_[qid];
    auto [it, inserted] = row.emplace(docid, grade);
    if (!inserted) {
        throw DataError("duplicate judgment (" + qid + ", " + docid + ")");
    }
    ++size_;
}

std::optional<int> JudgmentSet::grade(std::string_view qid, std::string_view docid) const
{
    auto row = table_.find(qid);
    if (row == table_.end()) {
        return std::nullopt;
    }
    auto it = row->second.find(docid);
    if (it == row->second.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool JudgmentSet::is_positive(std::string_view qid, std::string_view docid) const
{
    auto g = grade(qid, docid);
    return g.has_value() && *g >= 1;
}

JudgmentSet::QueryJudgments const *JudgmentSet::judgments_for(std::string_view qid) const
{
    auto row = table_.find(qid);
    return row == table_.end() ? nullptr : &row->second;
}

// ---------------------------------------------------------------------------
// Corpus

Document parse_document_line(std::string_view line, std::string const &source,
                             std::size_t line_number)
{
    require_utf8(line, source, line_number);
    nlohmann::json record;
    try {
        record = nlohmann::json::parse(line);
    } catch (nlohmann::json::parse_error const &e) {
        throw DataError(source, line_number, std::string("malformed record: ") + e.what());
    }
    if (!record.is_object()) {
        throw DataError(source, line_number, "record is not an object");
    }
    Document doc;
    doc.docid = json_string_field(record, "docid", true, source, line_number);
    doc.title = json_string_field(record, "title", false, source, line_number);
    doc.text = json_string_field(record, "text", true, source, line_number);
    if (doc.docid.empty()) {
        throw DataError(source, line_number, "empty docid");
    }
    if (trim(doc.text).empty()) {
        throw DataError(source, line_number, "empty text for docid " + doc.docid);
    }
    return doc;
}

CorpusReader::CorpusReader(std::istream &in, std::string source)
    : in_(&in), source_(std::move(source))
{
}

CorpusReader::CorpusReader(std::filesystem::path const &path)
    : owned_(open_input(path)), in_(&*owned_), source_(path.string())
{
}

std::optional<Document> CorpusReader::next()
{
    std::string line;
    while (read_line(*in_, line)) {
        ++line_;
        if (trim(line).empty()) {
            continue;
        }
        Document doc = parse_document_line(line, source_, line_);
        if (!seen_.insert(doc.docid).second) {
            throw DataError(source_, line_, "duplicate docid " + doc.docid);
        }
        ++records_;
        return doc;
    }
    return std::nullopt;
}

std::vector<Document> load_corpus(std::istream &in, std::string const &source)
{
    CorpusReader reader(in, source);
    std::vector<Document> docs;
    while (auto doc = reader.next()) {
        docs.push_back(std::move(*doc));
    }
    return docs;
}

std::vector<Document> load_corpus(std::filesystem::path const &path)
{
    auto in = open_input(path);
    return load_corpus(in, path.string());
}

void for_each_document(std::filesystem::path const &path,
                       std::function<void(Document &&)> const &visit)
{
    CorpusReader reader(path);
    while (auto doc = reader.next()) {
        visit(std::move(*doc));
    }
}

void write_corpus(std::ostream &out, std::span<Document const> documents)
{
    for (auto const &doc : documents) {
        nlohmann::ordered_json record;
        record["docid"] = doc.docid;
        record["title"] = doc.title;
        record["text"] = doc.text;
        out << record.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// Topics

std::vector<Query> load_topics(std::istream &in, std::string const &source,
                               std::string const &language, Split split)
{
    std::vector<Query> queries;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_number = 0;
    while (read_line(in, line)) {
        ++line_number;
        if (trim(line).empty()) {
            continue;
        }
        require_utf8(line, source, line_number);
        auto const tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError(source, line_number, "expected 2 tab-separated columns, found 1");
        }
        Query q;
        q.qid = std::string(trim(std::string_view(line).substr(0, tab)));
        q.text = std::string(std::string_view(line).substr(tab + 1));
        q.language = language;
        q.split = split;
        if (q.qid.empty()) {
            throw DataError(source, line_number, "empty qid");
        }
        if (!seen.insert(q.qid).second) {
            throw DataError(source, line_number, "duplicate qid " + q.qid);
        }
        queries.push_back(std::move(q));
    }
    return queries;
}

std::vector<Query> load_topics(std::filesystem::path const &path, std::string const &language,
                               Split split)
{
    auto in = open_input(path);
    return load_topics(in, path.string(), language, split);
}

void write_topics(std::ostream &out, std::span<Query const> queries)
{
    for (auto const &q : queries) {
        out << q.qid << '\t' << q.text << '\n';
    }
}

QueryTexts query_texts(std::span<Query const> queries)
{
    QueryTexts texts;
    for (auto const &q : queries) {
        texts.emplace(q.qid, q.text);
    }
    return texts;
}

// ---------------------------------------------------------------------------
// Qrels

JudgmentSet load_qrels(std::istream &in, std::string const &source)
{
    JudgmentSet qrels;
    std::string line;
    std::size_t line_number = 0;
    while (read_line(in, line)) {
        ++line_number;
        if (trim(line).empty()) {
            continue;
        }
        require_utf8(line, source, line_number);
        auto fields = split_whitespace(line);
        if (fields.size() != 4) {
            throw DataError(source, line_number,
                            "expected 4 columns, found " + std::to_string(fields.size()));
        }
        auto grade = parse_int(fields[3]);
        if (!grade || *grade > INT32_MAX || *grade < INT32_MIN) {
            throw DataError(source, line_number,
                            "grade '" + std::string(fields[3]) + "' is not an integer");
        }
        try {
            qrels.add(std::string(fields[0]), std::string(fields[2]), static_cast<int>(*grade));
        } catch (DataError const &e) {
            throw DataError(source, line_number, e.what());
        }
    }
    return qrels;
}

JudgmentSet load_qrels(std::filesystem::path const &path)
{
    auto in = open_input(path);
    return load_qrels(in, path.string());
}

void write_qrels(std::ostream &out, JudgmentSet const &qrels)
{
    for (auto const &[qid, row] : qrels.by_query()) {
        for (auto const &[docid, grade] : row) {
            out << qid << " Q0 " << docid << ' ' << grade << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Statistics

StatsRow corpus_stats(std::string language, std::size_t passages,
                      std::map<Split, std::vector<Query>> const &topics,
                      std::map<Split, JudgmentSet> const &qrels)
{
    StatsRow row;
    row.language = std::move(language);
    row.passages = passages;
    for (auto const &[split, queries] : topics) {
        row.queries[split] = queries.size();
    }
    for (auto const &[split, judgments] : qrels) {
        row.judgments[split] = judgments.size();
    }
    return row;
}

StatsRow corpus_stats(std::string language, std::span<Document const> corpus,
                      std::map<Split, std::vector<Query>> const &topics,
                      std::map<Split, JudgmentSet> const &qrels)
{
    return corpus_stats(std::move(language), corpus.size(), topics, qrels);
}

void write_stats(std::ostream &out, std::span<StatsRow const> rows)
{
    constexpr Split splits[] = {Split::train, Split::dev, Split::test_a, Split::test_b};
    out << "lang";
    for (Split s : splits) {
        out << '\t' << to_string(s) << ".queries\t" << to_string(s) << ".judgments";
    }
    out << "\tpassages\tarticles\n";
    auto count = [](std::map<Split, std::size_t> const &m, Split s) {
        auto it = m.find(s);
        return it == m.end() ? std::string("-") : std::to_string(it->second);
    };
    for (auto const &row : rows) {
        out << row.language;
        for (Split s : splits) {
            out << '\t' << count(row.queries, s) << '\t' << count(row.judgments, s);
        }
        out << '\t' << row.passages << '\t'
            << (row.articles ? std::to_string(*row.articles) : std::string("-")) << '\n';
    }
}

} // namespace polyret
