#include "polyret/sparse_index.hpp"

#include "parallel.hpp"
#include "polyret/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

namespace polyret {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'O', 'L', 'Y', 'R', 'I', 'D', 'X'};
constexpr std::array<char, 8> kTrailer = {'P', 'R', 'I', 'D', 'X', 'E', 'N', 'D'};
constexpr std::uint32_t kFormatVersion = 1;

class BinaryWriter {
   public:
    explicit BinaryWriter(std::ostream &out) : out_(out) {}

    void raw(char const *data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }

    template <typename T>
    void integer(T value)
    {
        std::array<char, sizeof(T)> bytes{};
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFFU);
        }
        raw(bytes.data(), bytes.size());
    }

    void string(std::string const &s)
    {
        integer<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }

   private:
    std::ostream &out_;
};

class BinaryReader {
   public:
    BinaryReader(std::istream &in, std::string source) : in_(in), source_(std::move(source)) {}

    void raw(char *data, std::size_t n)
    {
        in_.read(data, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw DataError(source_, 0, "truncated index file");
        }
    }

    template <typename T>
    T integer()
    {
        std::array<unsigned char, sizeof(T)> bytes{};
        raw(reinterpret_cast<char *>(bytes.data()), bytes.size());
        std::uint64_t value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        }
        return static_cast<T>(value);
    }

    std::string string()
    {
        auto const n = integer<std::uint32_t>();
        std::string s(n, '\0');
        raw(s.data(), n);
        return s;
    }

    [[noreturn]] void fail(std::string const &message) const { throw DataError(source_, 0, message); }

   private:
    std::istream &in_;
    std::string source_;
};

std::vector<std::string> unique_sorted(TokenStream tokens)
{
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

} // namespace

void Bm25Params::validate() const
{
    if (!(k1 > 0.0) || !std::isfinite(k1)) {
        throw InvalidArgument("BM25 k1 must be > 0");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw InvalidArgument("BM25 b must lie in [0, 1]");
    }
}

// ---------------------------------------------------------------------------
// InvertedIndex

std::optional<std::uint32_t> InvertedIndex::ordinal(std::string_view docid) const
{
    auto it = doc_ordinals_.find(docid);
    if (it == doc_ordinals_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::span<Posting const> InvertedIndex::postings(std::string_view term) const
{
    auto it = term_ids_.find(term);
    if (it == term_ids_.end()) {
        return {};
    }
    auto const id = it->second;
    return std::span<Posting const>(postings_).subspan(offsets_[id], offsets_[id + 1] - offsets_[id]);
}

double InvertedIndex::idf(std::string_view term) const
{
    auto const n = static_cast<double>(doc_count());
    auto const df = static_cast<double>(postings(term).size());
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

void InvertedIndex::finish_lookup()
{
    term_ids_.clear();
    term_ids_.reserve(terms_.size());
    for (std::uint32_t i = 0; i < terms_.size(); ++i) {
        term_ids_.emplace(terms_[i], i);
    }
    doc_ordinals_.clear();
    doc_ordinals_.reserve(docids_.size());
    for (std::uint32_t i = 0; i < docids_.size(); ++i) {
        doc_ordinals_.emplace(docids_[i], i);
    }
    std::uint64_t total = std::accumulate(doc_lengths_.begin(), doc_lengths_.end(), std::uint64_t{0});
    avgdl_ = doc_lengths_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(doc_lengths_.size());
}

bool operator==(InvertedIndex const &a, InvertedIndex const &b)
{
    return a.policy_ == b.policy_ && a.docids_ == b.docids_ && a.doc_lengths_ == b.doc_lengths_ &&
           a.terms_ == b.terms_ && a.offsets_ == b.offsets_ && a.postings_ == b.postings_;
}

void InvertedIndex::write(std::ostream &out) const
{
    BinaryWriter w(out);
    w.raw(kMagic.data(), kMagic.size());
    w.integer<std::uint32_t>(kFormatVersion);
    w.integer<std::uint32_t>(static_cast<std::uint32_t>(policy_));
    w.integer<std::uint64_t>(docids_.size());
    for (std::size_t i = 0; i < docids_.size(); ++i) {
        w.string(docids_[i]);
        w.integer<std::uint32_t>(doc_lengths_[i]);
    }
    w.integer<std::uint64_t>(terms_.size());
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        w.string(terms_[t]);
        w.integer<std::uint64_t>(offsets_[t + 1] - offsets_[t]);
        for (auto i = offsets_[t]; i < offsets_[t + 1]; ++i) {
            w.integer<std::uint32_t>(postings_[i].doc);
            w.integer<std::uint32_t>(postings_[i].tf);
        }
    }
    w.raw(kTrailer.data(), kTrailer.size());
}

InvertedIndex InvertedIndex::read(std::istream &in, std::string const &source)
{
    BinaryReader r(in, source);
    std::array<char, 8> magic{};
    r.raw(magic.data(), magic.size());
    if (magic != kMagic) {
        r.fail("not a polyret index (bad magic)");
    }
    auto const version = r.integer<std::uint32_t>();
    if (version != kFormatVersion) {
        r.fail("unsupported index version " + std::to_string(version));
    }
    auto const policy = r.integer<std::uint32_t>();
    if (policy > static_cast<std::uint32_t>(ScriptPolicy::automatic)) {
        r.fail("unknown script policy code " + std::to_string(policy));
    }
    InvertedIndex index;
    index.policy_ = static_cast<ScriptPolicy>(policy);
    auto const n_docs = r.integer<std::uint64_t>();
    index.docids_.reserve(n_docs);
    index.doc_lengths_.reserve(n_docs);
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        index.docids_.push_back(r.string());
        index.doc_lengths_.push_back(r.integer<std::uint32_t>());
    }
    auto const n_terms = r.integer<std::uint64_t>();
    index.terms_.reserve(n_terms);
    index.offsets_.reserve(n_terms + 1);
    index.offsets_.push_back(0);
    for (std::uint64_t t = 0; t < n_terms; ++t) {
        index.terms_.push_back(r.string());
        auto const count = r.integer<std::uint64_t>();
        if (count == 0 || count > n_docs) {
            r.fail("corrupt postings length for term " + index.terms_.back());
        }
        std::uint32_t previous = 0;
        for (std::uint64_t i = 0; i < count; ++i) {
            Posting p{r.integer<std::uint32_t>(), r.integer<std::uint32_t>()};
            if (p.doc >= n_docs || p.tf == 0 || (i > 0 && p.doc <= previous)) {
                r.fail("corrupt posting for term " + index.terms_.back());
            }
            previous = p.doc;
            index.postings_.push_back(p);
        }
        index.offsets_.push_back(index.postings_.size());
    }
    std::array<char, 8> trailer{};
    r.raw(trailer.data(), trailer.size());
    if (trailer != kTrailer) {
        r.fail("missing index trailer");
    }
    index.finish_lookup();
    return index;
}

void InvertedIndex::save(std::filesystem::path const &path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(path.string(), 0, "cannot open file for writing");
    }
    write(out);
}

InvertedIndex InvertedIndex::load(std::filesystem::path const &path)
{
    auto in = open_input(path);
    return read(in, path.string());
}

// ---------------------------------------------------------------------------
// IndexBuilder

std::string indexed_text(Document const &doc)
{
    std::string text;
    text.reserve(doc.title.size() + 1 + doc.text.size());
    text += doc.title;
    text += ' ';
    text += doc.text;
    return text;
}

IndexBuilder::IndexBuilder(ScriptPolicy policy, unsigned threads, std::size_t batch_size)
    : policy_(policy), threads_(std::max(1U, threads)), batch_size_(std::max<std::size_t>(1, batch_size))
{
}

void IndexBuilder::add(Document doc)
{
    if (seen_.contains(doc.docid)) {
        throw DataError("duplicate docid " + doc.docid);
    }
    seen_.emplace(doc.docid, static_cast<std::uint32_t>(seen_.size()));
    pending_.push_back(std::move(doc));
    if (pending_.size() >= batch_size_) {
        flush();
    }
}

void IndexBuilder::flush()
{
    if (pending_.empty()) {
        return;
    }
    std::vector<TokenStream> tokens(pending_.size());
    detail::parallel_for(pending_.size(), threads_,
                         [&](std::size_t i) { tokens[i] = tokenize(indexed_text(pending_[i]), policy_); });

    for (std::size_t i = 0; i < pending_.size(); ++i) {
        auto const ordinal = static_cast<std::uint32_t>(docids_.size());
        docids_.push_back(std::move(pending_[i].docid));
        doc_lengths_.push_back(static_cast<std::uint32_t>(tokens[i].size()));
        std::sort(tokens[i].begin(), tokens[i].end());
        for (std::size_t j = 0; j < tokens[i].size();) {
            std::size_t end = j;
            while (end < tokens[i].size() && tokens[i][end] == tokens[i][j]) {
                ++end;
            }
            postings_[tokens[i][j]].push_back(Posting{ordinal, static_cast<std::uint32_t>(end - j)});
            j = end;
        }
    }
    pending_.clear();
}

InvertedIndex IndexBuilder::finish()
{
    flush();
    if (docids_.empty()) {
        throw DataError("cannot build an index from an empty corpus");
    }
    InvertedIndex index;
    index.policy_ = policy_;
    index.docids_ = std::move(docids_);
    index.doc_lengths_ = std::move(doc_lengths_);

    std::vector<std::string> terms;
    terms.reserve(postings_.size());
    for (auto const &[term, list] : postings_) {
        terms.push_back(term);
    }
    std::sort(terms.begin(), terms.end());
    index.offsets_.reserve(terms.size() + 1);
    index.offsets_.push_back(0);
    for (auto const &term : terms) {
        auto &list = postings_[term];
        index.postings_.insert(index.postings_.end(), list.begin(), list.end());
        index.offsets_.push_back(index.postings_.size());
    }
    index.terms_ = std::move(terms);
    postings_.clear();
    seen_.clear();
    index.finish_lookup();
    return index;
}

InvertedIndex build_index(std::span<Document const> documents, ScriptPolicy policy, unsigned threads)
{
    IndexBuilder builder(policy, threads);
    for (auto const &doc : documents) {
        builder.add(doc);
    }
    return builder.finish();
}

InvertedIndex build_index(CorpusReader &reader, ScriptPolicy policy, unsigned threads)
{
    IndexBuilder builder(policy, threads);
    while (auto doc = reader.next()) {
        builder.add(std::move(*doc));
    }
    return builder.finish();
}

// ---------------------------------------------------------------------------
// Search

RankedList bm25_search(InvertedIndex const &index, std::string_view query, std::size_t k,
                       Bm25Params const &params)
{
    params.validate();
    if (k == 0) {
        throw InvalidArgument("k must be >= 1");
    }
    auto const terms = unique_sorted(tokenize(query, index.policy()));
    if (terms.empty()) {
        return {};
    }

    std::unordered_map<std::uint32_t, double> scores;
    double const avgdl = index.avgdl();
    for (auto const &term : terms) {
        auto const postings = index.postings(term);
        if (postings.empty()) {
            continue;
        }
        double const idf = index.idf(term);
        for (auto const &p : postings) {
            double const tf = p.tf;
            double const norm =
                params.k1 * (1.0 - params.b + params.b * static_cast<double>(index.doc_length(p.doc)) / avgdl);
            scores[p.doc] += idf * tf / (tf + norm);
        }
    }

    RankedList hits;
    hits.reserve(scores.size());
    for (auto const &[doc, score] : scores) {
        if (score > 0.0) {
            hits.push_back(ScoredDoc{index.docid(doc), score});
        }
    }
    auto const n = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), ranks_before);
    hits.resize(n);
    return hits;
}

Run bm25_retrieve(InvertedIndex const &index, std::span<Query const> queries, std::size_t k,
                  Bm25Params const &params, unsigned threads)
{
    std::vector<RankedList> lists(queries.size());
    detail::parallel_for(queries.size(), threads,
                         [&](std::size_t i) { lists[i] = bm25_search(index, queries[i].text, k, params); });
    Run run;
    run.tag = "bm25";
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (!lists[i].empty()) {
            run.entries.emplace(queries[i].qid, std::move(lists[i]));
        }
    }
    return run;
}

} // namespace polyret
