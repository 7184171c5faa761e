#pragma once

#include "polyret/corpus_io.hpp"
#include "polyret/run.hpp"
#include "polyret/text.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace polyret {

/// Lucene-style BM25 parameters.
struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;

    /// Throws InvalidArgument unless k1 > 0 and b in [0, 1].
    void validate() const;
};

struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;

    friend bool operator==(Posting const &, Posting const &) = default;
};

/// Immutable inverted index over one corpus. Terms are stored in byte order
/// and postings are ordered by document ordinal, so two indexes built from
/// the same documents serialize to identical bytes.
class InvertedIndex {
   public:
    InvertedIndex() = default;
    InvertedIndex(InvertedIndex &&) noexcept = default;
    InvertedIndex &operator=(InvertedIndex &&) noexcept = default;
    // Lookup tables hold views into the term and docid storage.
    InvertedIndex(InvertedIndex const &) = delete;
    InvertedIndex &operator=(InvertedIndex const &) = delete;

    [[nodiscard]] std::size_t doc_count() const noexcept { return doc_lengths_.size(); }
    [[nodiscard]] std::size_t term_count() const noexcept { return terms_.size(); }
    [[nodiscard]] double avgdl() const noexcept { return avgdl_; }
    [[nodiscard]] ScriptPolicy policy() const noexcept { return policy_; }

    [[nodiscard]] std::uint32_t doc_length(std::uint32_t ordinal) const { return doc_lengths_.at(ordinal); }
    [[nodiscard]] std::string const &docid(std::uint32_t ordinal) const { return docids_.at(ordinal); }
    [[nodiscard]] std::optional<std::uint32_t> ordinal(std::string_view docid) const;

    [[nodiscard]] std::span<std::string const> terms() const noexcept { return terms_; }
    [[nodiscard]] std::span<std::string const> docids() const noexcept { return docids_; }
    [[nodiscard]] std::span<std::uint32_t const> doc_lengths() const noexcept { return doc_lengths_; }

    /// Empty span for unknown terms.
    [[nodiscard]] std::span<Posting const> postings(std::string_view term) const;
    [[nodiscard]] std::size_t df(std::string_view term) const { return postings(term).size(); }

    /// ln(1 + (N - df + 0.5) / (df + 0.5)); never negative.
    [[nodiscard]] double idf(std::string_view term) const;

    void write(std::ostream &out) const;
    [[nodiscard]] static InvertedIndex read(std::istream &in, std::string const &source = "<index>");
    void save(std::filesystem::path const &path) const;
    [[nodiscard]] static InvertedIndex load(std::filesystem::path const &path);

    friend bool operator==(InvertedIndex const &a, InvertedIndex const &b);

   private:
    friend class IndexBuilder;

    void finish_lookup();

    ScriptPolicy policy_ = ScriptPolicy::automatic;
    std::vector<std::string> docids_;
    std::vector<std::uint32_t> doc_lengths_;
    double avgdl_ = 0.0;
    std::vector<std::string> terms_;
    std::vector<std::uint64_t> offsets_;  // terms_.size() + 1 entries into postings_
    std::vector<Posting> postings_;
    std::unordered_map<std::string_view, std::uint32_t> term_ids_;
    std::unordered_map<std::string_view, std::uint32_t> doc_ordinals_;
};

/// Accumulates documents and produces an InvertedIndex. Tokenization of
/// buffered batches runs on up to `threads` workers; postings are merged in
/// document order, so the result does not depend on the thread count.
class IndexBuilder {
   public:
    explicit IndexBuilder(ScriptPolicy policy, unsigned threads = 1, std::size_t batch_size = 4096);

    /// Throws DataError on a repeated docid.
    void add(Document doc);

    /// Throws DataError if no document was added.
    [[nodiscard]] InvertedIndex finish();

   private:
    void flush();

    ScriptPolicy policy_;
    unsigned threads_;
    std::size_t batch_size_;
    std::vector<Document> pending_;
    std::vector<std::string> docids_;
    std::unordered_map<std::string, std::uint32_t> seen_;
    std::vector<std::uint32_t> doc_lengths_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

/// Text that gets indexed for a document: title, a space, then body.
[[nodiscard]] std::string indexed_text(Document const &doc);

[[nodiscard]] InvertedIndex build_index(std::span<Document const> documents, ScriptPolicy policy,
                                        unsigned threads = 1);
[[nodiscard]] InvertedIndex build_index(CorpusReader &reader, ScriptPolicy policy, unsigned threads = 1);

/// Top-k documents with positive BM25 score, in canonical ranking order.
/// Each distinct query token contributes once.
[[nodiscard]] RankedList bm25_search(InvertedIndex const &index, std::string_view query, std::size_t k,
                                     Bm25Params const &params = {});

/// Runs bm25_search for every query; each list becomes one run entry.
[[nodiscard]] Run bm25_retrieve(InvertedIndex const &index, std::span<Query const> queries, std::size_t k,
                                Bm25Params const &params = {}, unsigned threads = 1);

} // namespace polyret
