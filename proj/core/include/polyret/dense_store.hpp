#pragma once

#include "polyret/corpus_io.hpp"
#include "polyret/run.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace polyret {

enum class Similarity { dot, cosine };

[[nodiscard]] Similarity parse_similarity(std::string_view name);
[[nodiscard]] std::string_view to_string(Similarity metric) noexcept;

/// Fixed-dimension vectors keyed by id, stored as float and compared in
/// double precision. Under cosine, zero vectors are rejected on insert.
class EmbeddingStore {
   public:
    explicit EmbeddingStore(Similarity metric = Similarity::dot) : metric_(metric) {}

    /// The first insert fixes the dimension. Throws DataError on a repeated
    /// id, a dimension mismatch or (cosine) a zero vector.
    void add(std::string id, std::span<float const> values);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] bool empty() const noexcept { return ids_.empty(); }
    [[nodiscard]] Similarity metric() const noexcept { return metric_; }

    [[nodiscard]] std::string const &id(std::size_t i) const { return ids_.at(i); }
    [[nodiscard]] std::span<float const> vector(std::size_t i) const;
    [[nodiscard]] double norm(std::size_t i) const { return norms_.at(i); }
    [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const;

    /// Similarity between an arbitrary vector and stored vector i.
    [[nodiscard]] double score(std::span<float const> query, std::size_t i) const;

    /// One "id<TAB>v1,v2,...,vd" line per vector, insertion order.
    void write(std::ostream &out) const;

    [[nodiscard]] static EmbeddingStore read(std::istream &in, Similarity metric,
                                             std::string const &source = "<vectors>");
    [[nodiscard]] static EmbeddingStore load(std::filesystem::path const &path,
                                             Similarity metric = Similarity::dot);

   private:
    Similarity metric_;
    std::size_t dim_ = 0;
    std::vector<std::string> ids_;
    std::vector<float> values_;
    std::vector<double> norms_;
    std::unordered_map<std::string, std::size_t> positions_;
};

[[nodiscard]] double dot_product(std::span<float const> a, std::span<float const> b) noexcept;
[[nodiscard]] double cosine_similarity(std::span<float const> a, std::span<float const> b) noexcept;

/// Exhaustive top-k over `docs` using the doc store's metric. Ties are
/// broken by ascending docid.
[[nodiscard]] RankedList dense_search(EmbeddingStore const &docs, std::span<float const> query,
                                      std::size_t k);

/// Looks the query up in `queries`; throws DataError for an unknown id or a
/// dimension mismatch between the stores.
[[nodiscard]] RankedList dense_search(EmbeddingStore const &docs, EmbeddingStore const &queries,
                                      std::string_view query_id, std::size_t k);

/// Searches every query in `queries`, or only `qids` when non-empty.
[[nodiscard]] Run dense_retrieve(EmbeddingStore const &docs, EmbeddingStore const &queries, std::size_t k,
                                 std::span<std::string const> qids = {}, unsigned threads = 1);

} // namespace polyret
