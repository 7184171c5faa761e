#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace polyret {

/// One retrievable passage.
struct Document {
    std::string docid;
    std::string title;
    std::string text;

    friend bool operator==(Document const &, Document const &) = default;
};

enum class Split { train, dev, test_a, test_b };

[[nodiscard]] Split parse_split(std::string_view name);
[[nodiscard]] std::string_view to_string(Split split) noexcept;

struct Query {
    std::string qid;
    std::string text;
    std::string language;
    Split split = Split::train;

    friend bool operator==(Query const &, Query const &) = default;
};

/// Graded relevance labels keyed by (qid, docid). Iteration is ordered by
/// qid then docid.
class JudgmentSet {
   public:
    using QueryJudgments = std::map<std::string, int, std::less<>>;
    using Table = std::map<std::string, QueryJudgments, std::less<>>;

    /// Throws DataError on a duplicate key or a negative grade.
    void add(std::string const &qid, std::string const &docid, int grade);

    [[nodiscard]] std::optional<int> grade(std::string_view qid, std::string_view docid) const;
    [[nodiscard]] bool is_positive(std::string_view qid, std::string_view docid) const;

    /// nullptr when the query has no judgments.
    [[nodiscard]] QueryJudgments const *judgments_for(std::string_view qid) const;

    [[nodiscard]] Table const &by_query() const noexcept { return table_; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::size_t query_count() const noexcept { return table_.size(); }
    [[nodiscard]] bool empty() const noexcept { return size_ == 0; }

    friend bool operator==(JudgmentSet const &, JudgmentSet const &) = default;

   private:
    Table table_;
    std::size_t size_ = 0;
};

/// Streams documents out of line-delimited JSON, one record at a time.
/// Rejects malformed lines, invalid UTF-8, blank bodies and repeated ids.
class CorpusReader {
   public:
    explicit CorpusReader(std::istream &in, std::string source = "<corpus>");

    /// Opens `path`; the reader owns the stream.
    explicit CorpusReader(std::filesystem::path const &path);

    CorpusReader(CorpusReader const &) = delete;
    CorpusReader &operator=(CorpusReader const &) = delete;

    [[nodiscard]] std::optional<Document> next();
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t records() const noexcept { return records_; }

   private:
    std::optional<std::ifstream> owned_;
    std::istream *in_;
    std::string source_;
    std::size_t line_ = 0;
    std::size_t records_ = 0;
    std::unordered_set<std::string> seen_;
};

[[nodiscard]] Document parse_document_line(std::string_view line, std::string const &source,
                                           std::size_t line_number);

[[nodiscard]] std::vector<Document> load_corpus(std::filesystem::path const &path);
[[nodiscard]] std::vector<Document> load_corpus(std::istream &in, std::string const &source = "<corpus>");

/// Visits each document in file order without retaining it.
void for_each_document(std::filesystem::path const &path,
                       std::function<void(Document &&)> const &visit);

void write_corpus(std::ostream &out, std::span<Document const> documents);

[[nodiscard]] std::vector<Query> load_topics(std::filesystem::path const &path,
                                             std::string const &language = {},
                                             Split split = Split::train);
[[nodiscard]] std::vector<Query> load_topics(std::istream &in, std::string const &source,
                                             std::string const &language = {},
                                             Split split = Split::train);
void write_topics(std::ostream &out, std::span<Query const> queries);

[[nodiscard]] JudgmentSet load_qrels(std::filesystem::path const &path);
[[nodiscard]] JudgmentSet load_qrels(std::istream &in, std::string const &source = "<qrels>");
void write_qrels(std::ostream &out, JudgmentSet const &qrels);

/// qid -> text lookup used wherever pairs carry the query string.
using QueryTexts = std::map<std::string, std::string, std::less<>>;
[[nodiscard]] QueryTexts query_texts(std::span<Query const> queries);

/// Per-language dataset statistics. Article counts need article metadata
/// that passage files do not carry, so the field is normally absent.
struct StatsRow {
    std::string language;
    std::map<Split, std::size_t> queries;
    std::map<Split, std::size_t> judgments;
    std::size_t passages = 0;
    std::optional<std::size_t> articles;

    friend bool operator==(StatsRow const &, StatsRow const &) = default;
};

[[nodiscard]] StatsRow corpus_stats(std::string language, std::size_t passages,
                                    std::map<Split, std::vector<Query>> const &topics,
                                    std::map<Split, JudgmentSet> const &qrels);
[[nodiscard]] StatsRow corpus_stats(std::string language, std::span<Document const> corpus,
                                    std::map<Split, std::vector<Query>> const &topics,
                                    std::map<Split, JudgmentSet> const &qrels);

/// Header line plus one row, tab separated; absent counts print as "-".
void write_stats(std::ostream &out, std::span<StatsRow const> rows);

/// Opens a file for reading or throws DataError naming it.
[[nodiscard]] std::ifstream open_input(std::filesystem::path const &path);

/// Reads one line, stripping a trailing CR. Returns false at end of stream.
bool read_line(std::istream &in, std::string &line);

} // namespace polyret
