#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace oracle {

std::vector<double> bm25_scores(std::vector<std::vector<std::string>> const &docs,
                                std::vector<std::string> const &query, double k1, double b)
{
    double const n = static_cast<double>(docs.size());
    double total = 0.0;
    for (auto const &d : docs) {
        total += static_cast<double>(d.size());
    }
    double const avgdl = total / n;
    std::set<std::string> const terms(query.begin(), query.end());

    std::vector<double> scores(docs.size(), 0.0);
    for (auto const &term : terms) {
        double df = 0.0;
        for (auto const &d : docs) {
            if (std::find(d.begin(), d.end(), term) != d.end()) {
                df += 1.0;
            }
        }
        if (df == 0.0) {
            continue;
        }
        double const idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        for (std::size_t i = 0; i < docs.size(); ++i) {
            double const tf = static_cast<double>(std::count(docs[i].begin(), docs[i].end(), term));
            double const dl = static_cast<double>(docs[i].size());
            scores[i] += idf * tf / (tf + k1 * (1.0 - b + b * dl / avgdl));
        }
    }
    return scores;
}

namespace {

double dcg(std::vector<int> const &gains, std::size_t k)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < gains.size() && i < k; ++i) {
        sum += gains[i] / std::log2(static_cast<double>(i + 2));
    }
    return sum;
}

} // namespace

double ndcg(std::vector<std::string> const &ranking, std::map<std::string, int> const &grades, std::size_t k)
{
    std::vector<int> gains;
    for (auto const &docid : ranking) {
        auto it = grades.find(docid);
        gains.push_back(it == grades.end() ? 0 : it->second);
    }
    std::vector<int> ideal;
    for (auto const &[docid, grade] : grades) {
        ideal.push_back(grade);
    }
    std::sort(ideal.rbegin(), ideal.rend());
    double const best = dcg(ideal, k);
    return best == 0.0 ? 0.0 : dcg(gains, k) / best;
}

double best_dcg_by_permutation(std::map<std::string, int> const &grades, std::size_t k)
{
    std::vector<int> gains;
    for (auto const &[docid, grade] : grades) {
        gains.push_back(grade);
    }
    std::sort(gains.begin(), gains.end());
    double best = 0.0;
    do {
        best = std::max(best, dcg(gains, k));
    } while (std::next_permutation(gains.begin(), gains.end()));
    return best;
}

double recall(std::vector<std::string> const &ranking, std::map<std::string, int> const &grades, std::size_t k)
{
    std::size_t relevant = 0;
    for (auto const &[docid, grade] : grades) {
        relevant += grade > 0 ? 1 : 0;
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size() && i < k; ++i) {
        auto it = grades.find(ranking[i]);
        hits += (it != grades.end() && it->second > 0) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(relevant);
}

double spearman_distinct(std::vector<double> const &a, std::vector<double> const &b)
{
    auto rank_of = [](std::vector<double> const &v, std::size_t i) {
        double r = 1.0;
        for (double x : v) {
            r += x < v[i] ? 1.0 : 0.0;
        }
        return r;
    };
    double const n = static_cast<double>(a.size());
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double const d = rank_of(a, i) - rank_of(b, i);
        d2 += d * d;
    }
    return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

double spearman_with_ties(std::vector<double> const &a, std::vector<double> const &b)
{
    auto ranks = [](std::vector<double> const &v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double below = 0.0;
            double equal = 0.0;
            for (double x : v) {
                below += x < v[i] ? 1.0 : 0.0;
                equal += x == v[i] ? 1.0 : 0.0;
            }
            r[i] = below + (equal + 1.0) / 2.0;
        }
        return r;
    };
    auto const ra = ranks(a);
    auto const rb = ranks(b);
    double const n = static_cast<double>(a.size());
    double const ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    double const mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double cov = 0.0;
    double va = 0.0;
    double vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

double overlap(std::vector<std::string> const &query, std::vector<std::string> const &doc)
{
    std::set<std::string> const q(query.begin(), query.end());
    std::set<std::string> const d(doc.begin(), doc.end());
    if (q.empty()) {
        return 0.0;
    }
    std::vector<std::string> shared;
    std::set_intersection(q.begin(), q.end(), d.begin(), d.end(), std::back_inserter(shared));
    return static_cast<double>(shared.size()) / static_cast<double>(q.size());
}

std::vector<std::pair<std::string, double>> sorted_scores(std::vector<std::pair<std::string, double>> scores)
{
    std::sort(scores.begin(), scores.end(), [](auto const &x, auto const &y) {
        return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    return scores;
}

} // namespace oracle
