#include "polyret/dense_store.hpp"

#include "parallel.hpp"
#include "polyret/error.hpp"
#include "polyret/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace polyret {

Similarity parse_similarity(std::string_view name)
{
    if (name == "dot" || name == "ip") {
        return Similarity::dot;
    }
    if (name == "cosine" || name == "cos") {
        return Similarity::cosine;
    }
    throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Similarity metric) noexcept
{
    return metric == Similarity::cosine ? "cosine" : "dot";
}

double dot_product(std::span<float const> a, std::span<float const> b) noexcept
{
    double sum = 0.0;
    auto const n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

double cosine_similarity(std::span<float const> a, std::span<float const> b) noexcept
{
    double const denom = std::sqrt(dot_product(a, a)) * std::sqrt(dot_product(b, b));
    if (denom == 0.0) {
        return 0.0;
    }
    return std::clamp(dot_product(a, b) / denom, -1.0, 1.0);
}

void EmbeddingStore::add(std::string id, std::span<float const> values)
{
    if (values.empty()) {
        throw DataError("vector " + id + " has no components");
    }
    if (dim_ == 0) {
        dim_ = values.size();
    } else if (values.size() != dim_) {
        throw DataError("vector " + id + " has dimension " + std::to_string(values.size()) + ", expected " +
                        std::to_string(dim_));
    }
    double const n = std::sqrt(dot_product(values, values));
    if (metric_ == Similarity::cosine && n == 0.0) {
        throw DataError("vector " + id + " is zero; cosine similarity is undefined");
    }
    if (positions_.contains(id)) {
        throw DataError("duplicate vector id " + id);
    }
    positions_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
    values_.insert(values_.end(), values.begin(), values.end());
    norms_.push_back(n);
}

std::span<float const> EmbeddingStore::vector(std::size_t i) const
{
    if (i >= ids_.size()) {
        throw std::out_of_range("vector index out of range");
    }
    return std::span<float const>(values_).subspan(i * dim_, dim_);
}

std::optional<std::size_t> EmbeddingStore::find(std::string_view id) const
{
    auto it = positions_.find(std::string(id));
    if (it == positions_.end()) {
        return std::nullopt;
    }
    return it->second;
}

double EmbeddingStore::score(std::span<float const> query, std::size_t i) const
{
    double const dot = dot_product(query, vector(i));
    if (metric_ == Similarity::dot) {
        return dot;
    }
    double const qn = std::sqrt(dot_product(query, query));
    if (qn == 0.0) {
        return 0.0;
    }
    return std::clamp(dot / (qn * norms_[i]), -1.0, 1.0);
}

void EmbeddingStore::write(std::ostream &out) const
{
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        out << ids_[i] << '\t';
        auto const v = vector(i);
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_real(v[j]);
        }
        out << '\n';
    }
}

EmbeddingStore EmbeddingStore::read(std::istream &in, Similarity metric, std::string const &source)
{
    EmbeddingStore store(metric);
    std::string line;
    std::size_t line_number = 0;
    std::vector<float> values;
    while (read_line(in, line)) {
        ++line_number;
        if (trim(line).empty()) {
            continue;
        }
        auto const tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError(source, line_number, "expected id<TAB>values");
        }
        std::string id(trim(std::string_view(line).substr(0, tab)));
        if (id.empty()) {
            throw DataError(source, line_number, "empty vector id");
        }
        values.clear();
        for (auto field : split_on(std::string_view(line).substr(tab + 1), ',')) {
            auto value = parse_float(trim(field));
            if (!value) {
                throw DataError(source, line_number,
                                "vector " + id + ": '" + std::string(field) + "' is not a finite number");
            }
            values.push_back(*value);
        }
        try {
            store.add(std::move(id), values);
        } catch (DataError const &e) {
            throw DataError(source, line_number, e.what());
        }
    }
    if (store.empty()) {
        throw DataError(source, 0, "no vectors");
    }
    return store;
}

EmbeddingStore EmbeddingStore::load(std::filesystem::path const &path, Similarity metric)
{
    auto in = open_input(path);
    return read(in, metric, path.string());
}

RankedList dense_search(EmbeddingStore const &docs, std::span<float const> query, std::size_t k)
{
    if (query.size() != docs.dim()) {
        throw DataError("query dimension " + std::to_string(query.size()) + " does not match store dimension " +
                        std::to_string(docs.dim()));
    }
    RankedList hits;
    hits.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        hits.push_back(ScoredDoc{docs.id(i), docs.score(query, i)});
    }
    auto const n = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), ranks_before);
    hits.resize(n);
    return hits;
}

RankedList dense_search(EmbeddingStore const &docs, EmbeddingStore const &queries, std::string_view query_id,
                        std::size_t k)
{
    auto position = queries.find(query_id);
    if (!position) {
        throw DataError("unknown query id " + std::string(query_id));
    }
    return dense_search(docs, queries.vector(*position), k);
}

Run dense_retrieve(EmbeddingStore const &docs, EmbeddingStore const &queries, std::size_t k,
                   std::span<std::string const> qids, unsigned threads)
{
    std::vector<std::string> selected;
    if (qids.empty()) {
        for (std::size_t i = 0; i < queries.size(); ++i) {
            selected.push_back(queries.id(i));
        }
    } else {
        selected.assign(qids.begin(), qids.end());
    }
    std::vector<RankedList> lists(selected.size());
    detail::parallel_for(selected.size(), threads,
                         [&](std::size_t i) { lists[i] = dense_search(docs, queries, selected[i], k); });
    Run run;
    run.tag = "dense";
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (!lists[i].empty()) {
            run.entries.emplace(selected[i], std::move(lists[i]));
        }
    }
    return run;
}

} // namespace polyret
