#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polyret {

struct ScoredDoc {
    std::string docid;
    double score = 0.0;

    friend bool operator==(ScoredDoc const &, ScoredDoc const &) = default;
};

/// Canonical ranking order: score descending, then docid ascending.
[[nodiscard]] inline bool ranks_before(ScoredDoc const &a, ScoredDoc const &b) noexcept
{
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.docid < b.docid;
}

using RankedList = std::vector<ScoredDoc>;

/// Per-query ranked lists. Within a query docids are unique and the list
/// is kept in canonical ranking order.
struct Run {
    std::string tag;
    std::map<std::string, RankedList, std::less<>> entries;

    /// Sorts every list into canonical order.
    void canonicalize();

    /// Throws DataError if a list has a repeated docid or is out of order.
    void check() const;

    [[nodiscard]] std::size_t size() const noexcept;
    [[nodiscard]] RankedList const *find(std::string_view qid) const;

    friend bool operator==(Run const &, Run const &) = default;
};

/// Top-K prefix of a run's lists, kept with the tag of the run it came from.
struct CandidatePool {
    std::size_t k = 200;
    std::string provenance;
    std::map<std::string, RankedList, std::less<>> lists;

    [[nodiscard]] Run as_run() const;
    [[nodiscard]] static CandidatePool from_run(Run const &run, std::size_t k);

    friend bool operator==(CandidatePool const &, CandidatePool const &) = default;
};

/// Reads "qid Q0 docid rank score tag" lines. Lines starting with '#' are
/// comments. Lists are returned in canonical order; a repeated (qid, docid)
/// or a malformed line throws DataError with the line number.
[[nodiscard]] Run read_trec_run(std::istream &in, std::string const &source = "<run>");
[[nodiscard]] Run read_trec_run(std::filesystem::path const &path);

/// Writes in list order with 1-based ranks and shortest round-trip scores.
/// Each `header` line is emitted first, prefixed with "# ".
void write_trec_run(std::ostream &out, Run const &run, std::span<std::string const> header = {});
void write_trec_run(std::filesystem::path const &path, Run const &run,
                    std::span<std::string const> header = {});

} // namespace polyret
