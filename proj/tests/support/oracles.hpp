#pragma once

// Brute-force reference implementations used only by tests. They recompute
// everything from first principles and share no code with the library's
// metric, scoring or fusion paths.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "clir/analysis.hpp"
#include "clir/model.hpp"

namespace clir::oracle {

inline int grade(const std::map<std::string, int>& qrels, const std::string& doc) {
    auto it = qrels.find(doc);
    return it == qrels.end() ? 0 : it->second;
}

inline double discount(std::size_t rank1) { return std::log(static_cast<double>(rank1) + 1.0) / std::log(2.0); }

inline double ndcg(const std::vector<std::string>& ranked, const std::map<std::string, int>& qrels, long k) {
    double dcg = 0.0;
    for (std::size_t r = 1; r <= ranked.size() && static_cast<long>(r) <= k; ++r) {
        dcg += grade(qrels, ranked[r - 1]) / discount(r);
    }
    // Ideal: count documents per grade, then fill ranks from the highest grade down.
    int max_grade = 0;
    for (const auto& [_, g] : qrels) max_grade = std::max(max_grade, g);
    double idcg = 0.0;
    std::size_t r = 1;
    for (int g = max_grade; g >= 1; --g) {
        for (const auto& [_, gg] : qrels) {
            if (gg == g && static_cast<long>(r) <= k) idcg += g / discount(r++);
        }
    }
    return idcg == 0.0 ? 0.0 : dcg / idcg;
}

inline double average_precision(const std::vector<std::string>& ranked, const std::map<std::string, int>& qrels) {
    std::size_t relevant = 0;
    for (const auto& [_, g] : qrels) relevant += g > 0 ? 1 : 0;
    if (relevant == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 1; i <= ranked.size(); ++i) {
        if (grade(qrels, ranked[i - 1]) <= 0) continue;
        std::size_t hits = 0;
        for (std::size_t j = 1; j <= i; ++j) hits += grade(qrels, ranked[j - 1]) > 0 ? 1 : 0;
        sum += static_cast<double>(hits) / static_cast<double>(i);
    }
    return sum / static_cast<double>(relevant);
}

inline double rbp(const std::vector<std::string>& ranked, const std::map<std::string, int>& qrels, double p) {
    double sum = 0.0;
    for (std::size_t i = 1; i <= ranked.size(); ++i) {
        if (grade(qrels, ranked[i - 1]) > 0) sum += std::pow(p, static_cast<double>(i - 1));
    }
    return (1.0 - p) * sum;
}

inline double recall(const std::vector<std::string>& ranked, const std::map<std::string, int>& qrels, long k) {
    std::set<std::string> relevant;
    for (const auto& [d, g] : qrels) {
        if (g > 0) relevant.insert(d);
    }
    if (relevant.empty()) return 0.0;
    std::set<std::string> top;
    for (std::size_t i = 0; i < ranked.size() && static_cast<long>(i) < k; ++i) top.insert(ranked[i]);
    std::vector<std::string> both;
    std::set_intersection(top.begin(), top.end(), relevant.begin(), relevant.end(), std::back_inserter(both));
    return static_cast<double>(both.size()) / static_cast<double>(relevant.size());
}

/// Scores every document in the corpus against the query by re-tokenizing
/// the raw text, then sorts (score desc, doc_id asc). Only documents sharing
/// a query term are returned.
inline std::vector<std::pair<std::string, double>> bm25_score_all(const std::vector<Document>& corpus,
                                                                  const Analyzer& analyzer,
                                                                  const std::vector<std::string>& query, double k1,
                                                                  double b) {
    std::vector<std::vector<std::string>> tokens;
    double total = 0.0;
    for (const auto& d : corpus) {
        tokens.push_back(analyzer.tokenize(d.title + " " + d.body));
        total += static_cast<double>(tokens.back().size());
    }
    const double n = static_cast<double>(corpus.size());
    const double avgdl = total / n;
    std::vector<std::pair<std::string, double>> scored;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        double score = 0.0;
        bool matched = false;
        for (const auto& term : query) {
            const auto tf = static_cast<double>(std::count(tokens[i].begin(), tokens[i].end(), term));
            if (tf == 0.0) continue;
            double df = 0.0;
            for (const auto& t : tokens) df += std::find(t.begin(), t.end(), term) != t.end() ? 1.0 : 0.0;
            const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
            const double dl = static_cast<double>(tokens[i].size());
            score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avgdl));
            matched = true;
        }
        if (matched) scored.emplace_back(corpus[i].doc_id, score);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
        return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    return scored;
}

/// Random well-formed run over doc ids "d0".."d{pool-1}".
inline Run random_run(std::mt19937_64& rng, const std::vector<std::string>& topic_ids, std::size_t pool,
                      std::size_t max_len, const std::string& tag) {
    Run run;
    run.run_tag = tag;
    for (const auto& t : topic_ids) {
        std::vector<std::size_t> ids(pool);
        for (std::size_t i = 0; i < pool; ++i) ids[i] = i;
        std::shuffle(ids.begin(), ids.end(), rng);
        const std::size_t len = std::uniform_int_distribution<std::size_t>(1, std::min(pool, max_len))(rng);
        std::vector<RankedDoc> docs;
        double score = 100.0;
        for (std::size_t r = 0; r < len; ++r) {
            score -= std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            docs.push_back({"d" + std::to_string(ids[r]), static_cast<long>(r + 1), score});
        }
        run.topics[t] = std::move(docs);
    }
    return run;
}

struct EvalInstance {
    Run run;
    Qrels qrels;
};

/// Up to `max_topics` topics with up to `max_docs` retrieved docs each.
/// Judgments (grades 0-3) cover retrieved and unretrieved docs alike; some
/// topics end up with no relevant document at all.
inline EvalInstance random_instance(std::mt19937_64& rng, std::size_t max_topics, std::size_t max_docs) {
    EvalInstance inst;
    const std::size_t topics = std::uniform_int_distribution<std::size_t>(1, max_topics)(rng);
    std::vector<std::string> ids;
    for (std::size_t t = 0; t < topics; ++t) ids.push_back("t" + std::to_string(t));
    const std::size_t pool = max_docs + 10;
    inst.run = random_run(rng, ids, pool, max_docs, "r");
    std::uniform_int_distribution<int> grade(0, 3);
    std::bernoulli_distribution judged(0.4);
    for (const auto& t : ids) {
        inst.qrels.topics[t];
        for (std::size_t d = 0; d < pool; ++d) {
            if (judged(rng)) inst.qrels.topics[t]["d" + std::to_string(d)] = grade(rng);
        }
    }
    // A judged topic the run never retrieved for.
    inst.qrels.topics["unretrieved"]["d0"] = 2;
    return inst;
}

inline std::vector<std::string> doc_ids(const std::vector<RankedDoc>& docs) {
    std::vector<std::string> out;
    for (const auto& d : docs) out.push_back(d.doc_id);
    return out;
}

}  // namespace clir::oracle
