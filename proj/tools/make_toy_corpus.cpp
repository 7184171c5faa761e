// Generates the bundled toy collection: three languages, each with a corpus,
// topics, qrels, document and query vectors, plus a pipeline config.
//
// Every query has two planted positives. The lexical one shares all query
// terms but has a dense vector orthogonal to every query. The semantic one
// shares no terms but sits on the query's own vector axis. Distractors carry
// small dense noise and a few of them share one query term.

#include "polyret/corpus_io.hpp"
#include "polyret/seeding.hpp"
#include "polyret/text.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using polyret::SeededRng;

namespace {

constexpr std::size_t kQueries = 10;
constexpr std::size_t kDocs = 100;
constexpr std::size_t kDim = 32;
constexpr std::size_t kTermsPerQuery = 3;
constexpr std::size_t kHardNegatives = 2;

struct Language {
    std::string code;
    std::vector<std::string> onsets;
    std::vector<std::string> vowels;
    bool cjk = false;
};

std::string utf8(char32_t cp)
{
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
}

// Distinct pseudo-words (or single Han characters) for one language.
std::vector<std::string> vocabulary(Language const &lang, std::size_t count, SeededRng &rng)
{
    std::set<std::string> seen;
    std::vector<std::string> words;
    while (words.size() < count) {
        std::string word;
        if (lang.cjk) {
            word = utf8(static_cast<char32_t>(0x4E00 + rng.below(0x5000)));
        } else {
            auto const syllables = 2 + rng.below(2);
            for (std::uint64_t s = 0; s < syllables; ++s) {
                word += lang.onsets[rng.below(lang.onsets.size())];
                word += lang.vowels[rng.below(lang.vowels.size())];
            }
        }
        if (seen.insert(word).second) {
            words.push_back(word);
        }
    }
    return words;
}

std::string join(std::vector<std::string> const &words, bool cjk)
{
    std::string out;
    for (auto const &w : words) {
        if (!out.empty() && !cjk) {
            out += ' ';
        }
        out += w;
    }
    return out;
}

std::vector<std::string> filler(std::vector<std::string> const &pool, std::size_t n, SeededRng &rng)
{
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) {
        words.push_back(pool[rng.below(pool.size())]);
    }
    return words;
}

void insert_at_random(std::vector<std::string> &words, std::string const &term, SeededRng &rng)
{
    auto const at = rng.below(words.size() + 1);
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), term);
}

std::string vector_line(std::string const &id, std::array<float, kDim> const &v)
{
    std::string line = id + '\t';
    for (std::size_t j = 0; j < kDim; ++j) {
        if (j > 0) {
            line += ',';
        }
        line += polyret::format_real(v[j]);
    }
    return line;
}

float noise(SeededRng &rng, double scale)
{
    // Two decimal places keep the files readable.
    return static_cast<float>(std::round(rng.unit() * scale * 100.0) / 100.0);
}

void write_language(Language const &lang, fs::path const &dir, std::uint64_t seed)
{
    fs::create_directories(dir);
    SeededRng rng(polyret::derive_seed(seed, "toy", lang.code));

    auto words = vocabulary(lang, 60 + kQueries * kTermsPerQuery, rng);
    std::vector<std::string> const fill(words.begin(), words.begin() + 60);
    std::vector<std::vector<std::string>> terms(kQueries);
    for (std::size_t q = 0; q < kQueries; ++q) {
        auto first = words.begin() + 60 + static_cast<std::ptrdiff_t>(q * kTermsPerQuery);
        terms[q].assign(first, first + kTermsPerQuery);
    }

    // Slot s of the shuffled order gets docid d<s>; roles are assigned to slots.
    std::vector<std::size_t> slots(kDocs);
    for (std::size_t i = 0; i < kDocs; ++i) {
        slots[i] = i;
    }
    for (std::size_t i = kDocs - 1; i > 0; --i) {
        std::swap(slots[i], slots[rng.below(i + 1)]);
    }
    auto docid = [&](std::size_t role) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%s-d%03zu", lang.code.c_str(), slots[role]);
        return std::string(buf);
    };
    // Roles: [0, Q) lexical positives, [Q, 2Q) semantic positives,
    // [2Q, 2Q + 2Q) hard negatives (two per query), the rest plain filler.
    auto lexical = [](std::size_t q) { return q; };
    auto semantic = [](std::size_t q) { return kQueries + q; };
    auto hard = [](std::size_t q, std::size_t h) { return 2 * kQueries + q * kHardNegatives + h; };

    std::vector<polyret::Document> docs(kDocs);
    std::vector<std::array<float, kDim>> vectors(kDocs);
    for (std::size_t role = 0; role < kDocs; ++role) {
        auto &doc = docs[role];
        auto &v = vectors[role];
        doc.docid = docid(role);
        auto body = filler(fill, 8 + rng.below(10), rng);
        doc.title = join(filler(fill, 2, rng), lang.cjk);
        v.fill(0.0f);
        for (std::size_t j = kQueries; j < kDim; ++j) {
            v[j] = noise(rng, 0.5);
        }
        if (role < kQueries) {
            for (auto const &t : terms[role]) {
                insert_at_random(body, t, rng);
            }
        } else if (role < 2 * kQueries) {
            v[role - kQueries] = 1.0f;
        } else {
            for (std::size_t j = 0; j < kQueries; ++j) {
                v[j] = 0.01f + noise(rng, 0.09);
            }
            if (role < 2 * kQueries + kQueries * kHardNegatives) {
                auto const q = (role - 2 * kQueries) / kHardNegatives;
                auto const h = (role - 2 * kQueries) % kHardNegatives;
                insert_at_random(body, terms[q][h], rng);
            }
        }
        doc.text = join(body, lang.cjk);
    }
    std::sort(docs.begin(), docs.end(), [](auto const &a, auto const &b) { return a.docid < b.docid; });

    {
        std::ofstream out(dir / "corpus.jsonl", std::ios::binary);
        polyret::write_corpus(out, docs);
    }
    {
        std::vector<std::size_t> order(kDocs);
        for (std::size_t i = 0; i < kDocs; ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return docid(a) < docid(b); });
        std::ofstream out(dir / "doc_vectors.tsv", std::ios::binary);
        for (auto role : order) {
            out << vector_line(docid(role), vectors[role]) << '\n';
        }
    }

    std::vector<polyret::Query> topics;
    std::vector<polyret::Query> train;
    polyret::JudgmentSet qrels;
    polyret::JudgmentSet train_qrels;
    std::ofstream qvec(dir / "query_vectors.tsv", std::ios::binary);
    for (std::size_t q = 0; q < kQueries; ++q) {
        auto const qid = lang.code + "-q" + std::to_string(q);
        topics.push_back({qid, join(terms[q], lang.cjk), lang.code, polyret::Split::dev});
        qrels.add(qid, docid(lexical(q)), 1);
        qrels.add(qid, docid(semantic(q)), 1);
        for (std::size_t h = 0; h < kHardNegatives; ++h) {
            qrels.add(qid, docid(hard(q, h)), 0);
        }
        std::array<float, kDim> v{};
        v[q] = 1.0f;
        qvec << vector_line(qid, v) << '\n';

        // A paraphrased train query: same axis, slightly perturbed.
        auto const tid = lang.code + "-t" + std::to_string(q);
        std::vector<std::string> reordered(terms[q].rbegin(), terms[q].rend());
        train.push_back({tid, join(reordered, lang.cjk), lang.code, polyret::Split::train});
        train_qrels.add(tid, docid(lexical(q)), 1);
        train_qrels.add(tid, docid(semantic(q)), 1);
        train_qrels.add(tid, docid(hard(q, 0)), 0);
        std::array<float, kDim> t{};
        t[q] = 1.0f;
        t[(q + 1) % kQueries] = 0.2f;
        qvec << vector_line(tid, t) << '\n';
    }
    {
        std::ofstream out(dir / "topics.tsv", std::ios::binary);
        polyret::write_topics(out, topics);
    }
    {
        std::ofstream out(dir / "qrels.txt", std::ios::binary);
        polyret::write_qrels(out, qrels);
    }
    {
        std::ofstream out(dir / "train_topics.tsv", std::ios::binary);
        polyret::write_topics(out, train);
    }
    {
        std::ofstream out(dir / "train_qrels.txt", std::ios::binary);
        polyret::write_qrels(out, train_qrels);
    }
}

constexpr char const *kConfig = R"(schema = polyret.experiment/1
# Toy trilingual experiment; paths are relative to this file.
seed = 13
languages = en, ru, zh
stages = index, bm25, dense, fuse, negatives, q2q2d, rerank, pseudo, ensemble, eval
output_dir = out
threads = 2

corpus = {lang}/corpus.jsonl
topics = {lang}/topics.tsv
qrels = {lang}/qrels.txt
doc_vectors = {lang}/doc_vectors.tsv
query_vectors = {lang}/query_vectors.tsv

index.script_policy = auto
bm25.k1 = 0.9
bm25.b = 0.4
bm25.depth = 100
dense.metric = dot
dense.depth = 100
fuse.weights = 0.5, 0.5
fuse.normalize = minmax
pool.k = 50

negatives.n = 5
negatives.universe = pool

q2q2d.train_topics = {lang}/train_topics.tsv
q2q2d.train_qrels = {lang}/train_qrels.txt
q2q2d.alpha = 0.9
q2q2d.top_m = 1
q2q2d.tau = 0.8
pseudo.fraction = 0.5

rerank.scorer = lexical
rerank.budget = 256

ensemble.inputs = rerank, hybrid
ensemble.base_weights = 0.5, 0.5
ensemble.lambda = 0.5

eval.ndcg_k = 10
eval.recall_k = 50
)";

} // namespace

int main(int argc, char **argv)
{
    fs::path const root = argc > 1 ? fs::path(argv[1]) : fs::path("data/toy");
    std::uint64_t const seed = 20230701;
    std::vector<Language> const languages = {
        {"en", {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"}, {"a", "e", "i", "o", "u"}, false},
        {"ru",
         {"б", "в", "г", "д", "ж", "з", "к", "л", "м", "н", "п", "р", "с", "т"},
         {"а", "е", "и", "о", "у", "ы"},
         false},
        {"zh", {}, {}, true},
    };
    for (auto const &lang : languages) {
        write_language(lang, root / lang.code, seed);
    }
    std::ofstream(root / "pipeline.conf", std::ios::binary) << kConfig;
    std::cout << "wrote " << languages.size() << " languages under " << root.string() << '\n';
    return 0;
}
