#include "polyret/data_forge.hpp"

#include "polyret/error.hpp"
#include "polyret/seeding.hpp"
#include "polyret/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace polyret {

namespace {

std::string const &text_for(QueryTexts const &texts, std::string_view qid)
{
    auto it = texts.find(qid);
    if (it == texts.end()) {
        throw DataError("no query text for qid " + std::string(qid));
    }
    return it->second;
}

void check_count(std::int64_t n)
{
    if (n < 0) {
        throw InvalidArgument("number of negatives must be >= 0, got " + std::to_string(n));
    }
}

/// First `count` positions of a seeded forward Fisher-Yates shuffle of
/// [0, size). Position i depends only on the first i draws, which is what
/// makes smaller samples prefixes of larger ones.
std::vector<std::size_t> permutation_prefix(std::size_t size, std::size_t count, SeededRng &rng)
{
    std::vector<std::size_t> order(size);
    for (std::size_t i = 0; i < size; ++i) {
        order[i] = i;
    }
    count = std::min(count, size);
    for (std::size_t i = 0; i < count; ++i) {
        auto const j = i + static_cast<std::size_t>(rng.below(size - i));
        std::swap(order[i], order[j]);
    }
    order.resize(count);
    return order;
}

double binary_label(int grade) { return grade >= 1 ? 1.0 : 0.0; }

} // namespace

PairSource parse_pair_source(std::string_view name)
{
    if (name == "annotation") {
        return PairSource::annotation;
    }
    if (name == "negative") {
        return PairSource::negative;
    }
    if (name == "q2q2d") {
        return PairSource::q2q2d;
    }
    if (name == "pseudo") {
        return PairSource::pseudo;
    }
    throw InvalidArgument("unknown pair source '" + std::string(name) + "'");
}

std::string_view to_string(PairSource source) noexcept
{
    switch (source) {
    case PairSource::annotation:
        return "annotation";
    case PairSource::negative:
        return "negative";
    case PairSource::q2q2d:
        return "q2q2d";
    case PairSource::pseudo:
        return "pseudo";
    }
    return "annotation";
}

void AugmentationParams::validate() const
{
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1]");
    }
    if (top_m < 1) {
        throw InvalidArgument("top_m must be >= 1");
    }
    if (!(tau >= -1.0 && tau <= 1.0)) {
        throw InvalidArgument("tau must lie in [-1, 1]");
    }
    if (!(pseudo_fraction > 0.0 && pseudo_fraction <= 1.0)) {
        throw InvalidArgument("pseudo fraction must lie in (0, 1]");
    }
}

// ---------------------------------------------------------------------------
// Negative sampling

NegativeSample sample_negatives(CandidatePool const &pool, JudgmentSet const &qrels, QueryTexts const &texts,
                                std::int64_t n, std::uint64_t seed)
{
    check_count(n);
    NegativeSample result;
    for (auto const &[qid, candidates] : pool.lists) {
        auto const *judged = qrels.judgments_for(qid);
        if (judged == nullptr) {
            ++result.skipped_queries;
            continue;
        }
        if (n == 0) {
            continue;
        }
        std::vector<std::string const *> eligible;
        eligible.reserve(candidates.size());
        for (auto const &entry : candidates) {
            auto it = judged->find(entry.docid);
            if (it == judged->end() || it->second < 1) {
                eligible.push_back(&entry.docid);
            }
        }
        auto const &text = text_for(texts, qid);
        SeededRng rng(derive_seed(seed, "negatives", qid));
        for (auto pick : permutation_prefix(eligible.size(), static_cast<std::size_t>(n), rng)) {
            result.pairs.push_back(TrainingPair{qid, text, *eligible[pick], 0.0, PairSource::negative});
        }
    }
    return result;
}

NegativeSample sample_negatives_corpus(std::span<std::string const> corpus_ids, JudgmentSet const &qrels,
                                       QueryTexts const &texts, std::int64_t n, std::uint64_t seed)
{
    check_count(n);
    NegativeSample result;
    if (n == 0) {
        return result;
    }
    auto const size = corpus_ids.size();
    for (auto const &[qid, judged] : qrels.by_query()) {
        auto const &text = text_for(texts, qid);
        SeededRng rng(derive_seed(seed, "negatives-corpus", qid));
        // Sparse Fisher-Yates: only displaced slots are stored, so each
        // query costs O(draws) rather than O(corpus).
        std::unordered_map<std::size_t, std::size_t> displaced;
        auto slot = [&](std::size_t i) {
            auto it = displaced.find(i);
            return it == displaced.end() ? i : it->second;
        };
        std::int64_t emitted = 0;
        for (std::size_t i = 0; i < size && emitted < n; ++i) {
            auto const j = i + static_cast<std::size_t>(rng.below(size - i));
            auto const picked = slot(j);
            displaced[j] = slot(i);
            auto const &docid = corpus_ids[picked];
            auto it = judged.find(docid);
            if (it != judged.end() && it->second >= 1) {
                continue;
            }
            result.pairs.push_back(TrainingPair{qid, text, docid, 0.0, PairSource::negative});
            ++emitted;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Q2Q2D

std::vector<TrainingPair> q2q2d_augment(std::span<Query const> test_queries, std::span<Query const> train_queries,
                                        JudgmentSet const &train_qrels, EmbeddingStore const &query_vectors,
                                        AugmentationParams const &params)
{
    params.validate();
    auto vector_of = [&](std::string const &qid) {
        auto position = query_vectors.find(qid);
        if (!position) {
            throw DataError("no vector for query " + qid);
        }
        return query_vectors.vector(*position);
    };

    std::vector<std::span<float const>> train_vectors;
    train_vectors.reserve(train_queries.size());
    for (auto const &q : train_queries) {
        train_vectors.push_back(vector_of(q.qid));
    }

    struct Neighbour {
        double sim;
        Query const *query;
    };

    std::vector<TrainingPair> pairs;
    for (auto const &test : test_queries) {
        auto const test_vector = vector_of(test.qid);
        std::vector<Neighbour> neighbours;
        for (std::size_t i = 0; i < train_queries.size(); ++i) {
            double const sim = cosine_similarity(test_vector, train_vectors[i]);
            if (sim >= params.tau) {
                neighbours.push_back({sim, &train_queries[i]});
            }
        }
        std::sort(neighbours.begin(), neighbours.end(), [](Neighbour const &a, Neighbour const &b) {
            if (a.sim != b.sim) {
                return a.sim > b.sim;
            }
            return a.query->qid < b.query->qid;
        });
        if (neighbours.size() > params.top_m) {
            neighbours.resize(params.top_m);
        }
        for (auto const &match : neighbours) {
            auto const *judged = train_qrels.judgments_for(match.query->qid);
            if (judged == nullptr) {
                continue;
            }
            // A negative tau admits anti-correlated neighbours; their
            // transferred labels floor at 0.
            double const weight = std::max(0.0, match.sim) * params.alpha;
            for (auto const &[docid, grade] : *judged) {
                pairs.push_back(TrainingPair{test.qid, test.text, docid, weight * binary_label(grade),
                                             PairSource::q2q2d});
            }
        }
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Pseudo labels

std::vector<TrainingPair> pseudo_label(Run const &scored_run, QueryTexts const &texts,
                                       AugmentationParams const &params)
{
    params.validate();
    struct Triple {
        std::string const *qid;
        ScoredDoc const *doc;
    };
    std::vector<Triple> triples;
    for (auto const &[qid, list] : scored_run.entries) {
        for (auto const &entry : list) {
            if (!(entry.score >= 0.0 && entry.score <= 1.0)) {
                throw DataError("pseudo-label score " + format_real(entry.score) + " for (" + qid + ", " +
                                entry.docid + ") is outside [0, 1]");
            }
            triples.push_back({&qid, &entry});
        }
    }
    // The epsilon keeps decimal fractions such as 0.29 * 100 from flooring
    // one short after binary rounding.
    auto const count = static_cast<std::size_t>(
        std::floor(params.pseudo_fraction * static_cast<double>(triples.size()) + 1e-9));
    SeededRng rng(derive_seed(params.seed, "pseudo", scored_run.tag));
    auto picks = permutation_prefix(triples.size(), count, rng);
    std::sort(picks.begin(), picks.end());

    std::vector<TrainingPair> pairs;
    pairs.reserve(picks.size());
    for (auto pick : picks) {
        auto const &t = triples[pick];
        pairs.push_back(TrainingPair{*t.qid, text_for(texts, *t.qid), t.doc->docid,
                                     AugmentationParams::pseudo_scale * t.doc->score, PairSource::pseudo});
    }
    return pairs;
}

std::vector<TrainingPair> annotation_pairs(JudgmentSet const &qrels, QueryTexts const &texts)
{
    std::vector<TrainingPair> pairs;
    for (auto const &[qid, judged] : qrels.by_query()) {
        auto const &text = text_for(texts, qid);
        for (auto const &[docid, grade] : judged) {
            pairs.push_back(TrainingPair{qid, text, docid, binary_label(grade), PairSource::annotation});
        }
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// File format

void write_training_pairs(std::ostream &out, std::span<TrainingPair const> pairs,
                          std::span<std::string const> header)
{
    for (auto const &line : header) {
        out << "# " << line << '\n';
    }
    for (auto const &p : pairs) {
        out << p.qid << '\t' << p.docid << '\t' << format_real(p.label) << '\t' << to_string(p.source) << '\t'
            << escape_field(p.query_text) << '\n';
    }
}

std::vector<TrainingPair> read_training_pairs(std::istream &in, std::string const &source)
{
    std::vector<TrainingPair> pairs;
    std::string line;
    std::size_t line_number = 0;
    while (read_line(in, line)) {
        ++line_number;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto fields = split_on(line, '\t');
        if (fields.size() != 5) {
            throw DataError(source, line_number, "expected 5 tab-separated columns, found " +
                                                     std::to_string(fields.size()));
        }
        auto label = parse_real(fields[2]);
        if (!label || *label < 0.0 || *label > 1.0) {
            throw DataError(source, line_number, "label '" + std::string(fields[2]) + "' is not a real in [0, 1]");
        }
        PairSource kind{};
        try {
            kind = parse_pair_source(fields[3]);
        } catch (InvalidArgument const &e) {
            throw DataError(source, line_number, e.what());
        }
        if (kind == PairSource::negative && *label != 0.0) {
            throw DataError(source, line_number, "negative pair with non-zero label");
        }
        if (kind == PairSource::annotation && *label != 0.0 && *label != 1.0) {
            throw DataError(source, line_number, "annotation pair with non-binary label");
        }
        pairs.push_back(TrainingPair{std::string(fields[0]), unescape_field(fields[4]), std::string(fields[1]),
                                     *label, kind});
    }
    return pairs;
}

std::vector<TrainingPair> read_training_pairs(std::filesystem::path const &path)
{
    auto in = open_input(path);
    return read_training_pairs(in, path.string());
}

} // namespace polyret
