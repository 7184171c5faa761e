#include "polyret/run.hpp"

#include "polyret/corpus_io.hpp"
#include "polyret/error.hpp"
#include "polyret/text.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace polyret {

void Run::canonicalize()
{
    for (auto &[qid, list] : entries) {
        std::sort(list.begin(), list.end(), ranks_before);
    }
}

void Run::check() const
{
    for (auto const &[qid, list] : entries) {
        std::unordered_set<std::string_view> seen;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (!seen.insert(list[i].docid).second) {
                throw DataError("run '" + tag + "': duplicate docid " + list[i].docid +
                                " for query " + qid);
            }
            if (i > 0 && ranks_before(list[i], list[i - 1])) {
                throw DataError("run '" + tag + "': query " + qid + " is not in ranking order");
            }
        }
    }
}

std::size_t Run::size() const noexcept
{
    std::size_t total = 0;
    for (auto const &[qid, list] : entries) {
        total += list.size();
    }
    return total;
}

RankedList const *Run::find(std::string_view qid) const
{
    auto it = entries.find(qid);
    return it == entries.end() ? nullptr : &it->second;
}

Run CandidatePool::as_run() const
{
    Run run;
    run.tag = provenance;
    for (auto const &[qid, list] : lists) {
        run.entries.emplace(qid, list);
    }
    return run;
}

CandidatePool CandidatePool::from_run(Run const &run, std::size_t k)
{
    CandidatePool pool;
    pool.k = k;
    pool.provenance = run.tag;
    for (auto const &[qid, list] : run.entries) {
        auto const n = std::min(k, list.size());
        pool.lists.emplace(qid, RankedList(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(n)));
    }
    return pool;
}

Run read_trec_run(std::istream &in, std::string const &source)
{
    Run run;
    std::map<std::string, std::unordered_set<std::string>, std::less<>> seen;
    std::string line;
    std::size_t line_number = 0;
    bool have_tag = false;
    while (read_line(in, line)) {
        ++line_number;
        auto const body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        auto fields = split_whitespace(body);
        if (fields.size() != 6) {
            throw DataError(source, line_number,
                            "expected 6 columns, found " + std::to_string(fields.size()));
        }
        auto rank = parse_int(fields[3]);
        if (!rank || *rank < 1) {
            throw DataError(source, line_number, "rank '" + std::string(fields[3]) + "' is not a positive integer");
        }
        auto score = parse_real(fields[4]);
        if (!score) {
            throw DataError(source, line_number, "score '" + std::string(fields[4]) + "' is not a finite real");
        }
        std::string qid(fields[0]);
        std::string docid(fields[2]);
        if (!seen[qid].insert(docid).second) {
            throw DataError(source, line_number, "duplicate docid " + docid + " for query " + qid);
        }
        if (!have_tag) {
            run.tag = std::string(fields[5]);
            have_tag = true;
        }
        run.entries[qid].push_back(ScoredDoc{std::move(docid), *score});
    }
    run.canonicalize();
    return run;
}

Run read_trec_run(std::filesystem::path const &path)
{
    auto in = open_input(path);
    return read_trec_run(in, path.string());
}

void write_trec_run(std::ostream &out, Run const &run, std::span<std::string const> header)
{
    for (auto const &line : header) {
        out << "# " << line << '\n';
    }
    std::string const tag = run.tag.empty() ? std::string("run") : run.tag;
    for (auto const &[qid, list] : run.entries) {
        std::size_t rank = 1;
        for (auto const &entry : list) {
            out << qid << " Q0 " << entry.docid << ' ' << rank++ << ' ' << format_real(entry.score)
                << ' ' << tag << '\n';
        }
    }
}

void write_trec_run(std::filesystem::path const &path, Run const &run,
                    std::span<std::string const> header)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(path.string(), 0, "cannot open file for writing");
    }
    write_trec_run(out, run, header);
}

} // namespace polyret
