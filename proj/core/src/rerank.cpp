#include "polyret/rerank.hpp"

#include "polyret/error.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace polyret {

namespace {

/// A literal marker inside a segment would break the three-way split; it is
/// lowercased, which tokenizes identically after case folding.
std::string neutralize_separator(std::string_view text)
{
    std::string out(text);
    std::size_t pos = 0;
    while ((pos = out.find(kPairSeparator, pos)) != std::string::npos) {
        out.replace(pos, kPairSeparator.size(), "[sep]");
        pos += kPairSeparator.size();
    }
    return out;
}

/// Longest prefix of `text` holding at most `budget` tokens; updates the
/// remaining budget.
std::string_view token_prefix(std::string_view text, std::size_t &budget, ScriptPolicy policy)
{
    auto spans = tokenize_spans(text, policy);
    if (spans.size() <= budget) {
        budget -= spans.size();
        return text;
    }
    std::string_view prefix = budget == 0 ? std::string_view{} : text.substr(0, spans[budget - 1].end);
    budget = 0;
    return prefix;
}

std::string join_pair(std::string_view query, std::string_view title, std::string_view body)
{
    std::string text;
    text.reserve(query.size() + title.size() + body.size() + 2 * (kPairSeparator.size() + 2));
    text += query;
    text += ' ';
    text += kPairSeparator;
    text += ' ';
    text += title;
    text += ' ';
    text += kPairSeparator;
    text += ' ';
    text += body;
    return text;
}

} // namespace

PairSegments split_pair(PairInput const &pair)
{
    std::string_view text = pair.text;
    auto const first = text.find(kPairSeparator);
    auto const second =
        first == std::string_view::npos ? first : text.find(kPairSeparator, first + kPairSeparator.size());
    if (second == std::string_view::npos ||
        text.find(kPairSeparator, second + kPairSeparator.size()) != std::string_view::npos) {
        throw DataError("pair (" + pair.qid + ", " + pair.docid + ") must contain exactly two separators");
    }
    auto const strip = [](std::string_view s, bool leading, bool trailing) {
        if (leading && !s.empty() && s.front() == ' ') {
            s.remove_prefix(1);
        }
        if (trailing && !s.empty() && s.back() == ' ') {
            s.remove_suffix(1);
        }
        return s;
    };
    auto const after_first = first + kPairSeparator.size();
    auto const after_second = second + kPairSeparator.size();
    return PairSegments{strip(text.substr(0, first), false, true),
                        strip(text.substr(after_first, second - after_first), true, true),
                        strip(text.substr(after_second), true, false)};
}

TokenStream pair_tokens(PairInput const &pair, ScriptPolicy policy)
{
    auto const segments = split_pair(pair);
    TokenStream tokens = tokenize(segments.query, policy);
    for (auto segment : {segments.title, segments.body}) {
        auto more = tokenize(segment, policy);
        tokens.insert(tokens.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    return tokens;
}

DocumentLookup make_lookup(std::vector<Document> documents)
{
    DocumentLookup lookup;
    lookup.reserve(documents.size());
    for (auto &doc : documents) {
        auto id = doc.docid;
        lookup.emplace(std::move(id), std::move(doc));
    }
    return lookup;
}

std::vector<PairInput> build_pairs(CandidatePool const &pool, QueryTexts const &queries,
                                   DocumentLookup const &documents, PairBuildOptions const &options)
{
    if (options.budget == 0) {
        throw InvalidArgument("truncation budget must be > 0");
    }
    std::vector<PairInput> pairs;
    for (auto const &[qid, candidates] : pool.lists) {
        auto q = queries.find(qid);
        if (q == queries.end()) {
            throw DataError("pool query " + qid + " has no topic text");
        }
        std::string const query = neutralize_separator(q->second);
        for (auto const &candidate : candidates) {
            auto d = documents.find(candidate.docid);
            if (d == documents.end()) {
                throw DataError("pool docid " + candidate.docid + " (query " + qid + ") is not in the corpus");
            }
            std::string const title = neutralize_separator(d->second.title);
            std::string const body = neutralize_separator(d->second.text);
            PairInput pair{qid, candidate.docid, {}, options.budget};
            if (options.truncate) {
                std::size_t budget = options.budget;
                auto const query_tokens = tokenize(query, options.policy).size();
                budget = query_tokens >= budget ? 0 : budget - query_tokens;
                auto const kept_title = token_prefix(title, budget, options.policy);
                auto const kept_body = token_prefix(body, budget, options.policy);
                pair.text = join_pair(query, kept_title, kept_body);
            } else {
                pair.text = join_pair(query, title, body);
            }
            pairs.push_back(std::move(pair));
        }
    }
    return pairs;
}

double lexical_score(PairInput const &pair, ScriptPolicy policy)
{
    auto const segments = split_pair(pair);
    auto query = tokenize(segments.query, policy);
    std::set<std::string> const unique_query(query.begin(), query.end());
    if (unique_query.empty()) {
        return 0.0;
    }
    std::unordered_set<std::string> document;
    for (auto segment : {segments.title, segments.body}) {
        for (auto &t : tokenize(segment, policy)) {
            document.insert(std::move(t));
        }
    }
    std::size_t hits = 0;
    for (auto const &t : unique_query) {
        hits += document.contains(t) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(unique_query.size());
}

std::vector<double> LexicalScorer::score(std::span<PairInput const> pairs)
{
    std::vector<double> scores;
    scores.reserve(pairs.size());
    for (auto const &pair : pairs) {
        scores.push_back(lexical_score(pair, policy_));
    }
    return scores;
}

ScoreFileScorer::ScoreFileScorer(std::map<std::pair<std::string, std::string>, double> scores)
    : scores_(std::move(scores))
{
}

ScoreFileScorer::ScoreFileScorer(std::filesystem::path const &path)
{
    auto in = open_input(path);
    std::string line;
    std::size_t line_number = 0;
    while (read_line(in, line)) {
        ++line_number;
        auto const body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        auto fields = split_whitespace(body);
        if (fields.size() != 3) {
            throw DataError(path.string(), line_number, "expected qid docid score");
        }
        auto value = parse_real(fields[2]);
        if (!value) {
            throw DataError(path.string(), line_number, "score '" + std::string(fields[2]) + "' is not a real");
        }
        if (!scores_.emplace(std::pair{std::string(fields[0]), std::string(fields[1])}, *value).second) {
            throw DataError(path.string(), line_number, "duplicate score for (" + std::string(fields[0]) + ", " +
                                                            std::string(fields[1]) + ")");
        }
    }
}

std::vector<double> ScoreFileScorer::score(std::span<PairInput const> pairs)
{
    std::vector<double> scores;
    scores.reserve(pairs.size());
    for (auto const &pair : pairs) {
        auto it = scores_.find(std::pair{pair.qid, pair.docid});
        if (it == scores_.end()) {
            throw ProtocolError("score file has no entry for (" + pair.qid + ", " + pair.docid + ")");
        }
        scores.push_back(it->second);
    }
    return scores;
}

ScorerHandle ScorerHandle::parse(std::string_view spec)
{
    if (spec == "lexical") {
        return ScorerHandle{Kind::lexical_baseline, {}};
    }
    if (spec.starts_with("cmd:") && spec.size() > 4) {
        return ScorerHandle{Kind::external_process, std::string(spec.substr(4))};
    }
    if (spec.starts_with("file:") && spec.size() > 5) {
        return ScorerHandle{Kind::score_file, std::string(spec.substr(5))};
    }
    throw InvalidArgument("scorer must be cmd:<command>, file:<path> or lexical; got '" + std::string(spec) + "'");
}

std::unique_ptr<Scorer> ScorerHandle::open() const
{
    switch (kind) {
    case Kind::lexical_baseline:
        return std::make_unique<LexicalScorer>();
    case Kind::score_file:
        if (!std::filesystem::exists(location)) {
            throw ProtocolError("score file " + location + " does not exist");
        }
        return std::make_unique<ScoreFileScorer>(std::filesystem::path(location));
    case Kind::external_process:
        return std::make_unique<ProcessScorer>(location);
    }
    throw InvalidArgument("unknown scorer kind");
}

Run score_pairs(std::span<PairInput const> pairs, Scorer &scorer, std::string tag)
{
    auto scores = scorer.score(pairs);
    if (scores.size() != pairs.size()) {
        throw ProtocolError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                            std::to_string(pairs.size()) + " pairs");
    }
    Run run;
    run.tag = std::move(tag);
    std::set<std::pair<std::string_view, std::string_view>> seen;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto const &pair = pairs[i];
        if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) {
            throw ProtocolError("score " + format_real(scores[i]) + " for (" + pair.qid + ", " + pair.docid +
                                ") is outside [0, 1]");
        }
        if (!seen.emplace(pair.qid, pair.docid).second) {
            throw DataError("duplicate pair (" + pair.qid + ", " + pair.docid + ")");
        }
        run.entries[pair.qid].push_back(ScoredDoc{pair.docid, scores[i]});
    }
    run.canonicalize();
    return run;
}

Run score_pairs(std::span<PairInput const> pairs, ScorerHandle const &handle, std::string tag)
{
    auto scorer = handle.open();
    return score_pairs(pairs, *scorer, std::move(tag));
}

std::string encode_score_request(PairInput const &pair)
{
    std::string line = "SCORE\t";
    line += escape_field(pair.qid);
    line += '\t';
    line += escape_field(pair.docid);
    line += '\t';
    line += escape_field(pair.text);
    return line;
}

} // namespace polyret
