#include "clir/retrieval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

namespace clir {

double bm25_term_score(long tf, long df, long doclen, double avgdl, long num_docs, const Bm25Params& params) {
    if (num_docs < 1 || df < 1 || df > num_docs || tf < 1 || doclen < 1 || !(avgdl > 0.0)) {
        throw ContractError("bm25_term_score: require N >= 1, 1 <= df <= N, tf >= 1, doclen >= 1, avgdl > 0");
    }
    check(params);
    const double n = static_cast<double>(num_docs);
    const double dfd = static_cast<double>(df);
    const double tfd = static_cast<double>(tf);
    const double idf = std::log(1.0 + (n - dfd + 0.5) / (dfd + 0.5));
    const double norm = params.k1 * (1.0 - params.b + params.b * static_cast<double>(doclen) / avgdl);
    return idf * (tfd * (params.k1 + 1.0)) / (tfd + norm);
}

std::vector<ScoredDoc> search(const Index& index, std::span<const std::string> query_tokens, long k,
                              const Bm25Params& params) {
    if (k < 1) throw ContractError("search: k must be >= 1");
    check(params);
    const long n = static_cast<long>(index.num_docs());
    if (n == 0) return {};

    std::vector<double> acc(index.num_docs(), 0.0);
    std::vector<char> hit(index.num_docs(), 0);
    std::vector<std::uint32_t> touched;
    for (const auto& token : query_tokens) {
        const auto list = index.postings(token);
        const long df = static_cast<long>(list.size());
        for (const Posting& p : list) {
            const auto& info = index.doc(p.doc);
            acc[p.doc] += bm25_term_score(p.tf, df, info.length, index.avgdl(), n, params);
            if (hit[p.doc] == 0) {
                hit[p.doc] = 1;
                touched.push_back(p.doc);
            }
        }
    }

    // Ordinals follow ascending doc_id, so ordinal order is the tie rule.
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        if (acc[a] != acc[b]) return acc[a] > acc[b];
        return a < b;
    };
    const std::size_t keep = std::min<std::size_t>(touched.size(), static_cast<std::size_t>(k));
    std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(keep), touched.end(), better);

    std::vector<ScoredDoc> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back({index.doc(touched[i]).doc_id, acc[touched[i]]});
    return out;
}

Run retrieve(const Index& index, std::span<const Topic> topics, const Bm25RunSpec& spec, unsigned workers) {
    if (spec.depth < 1) throw ContractError("retrieve: depth must be >= 1");
    check(spec.params);

    // Compose every query up front so a missing variant fails before any work.
    std::vector<std::string> queries;
    queries.reserve(topics.size());
    std::set<std::string_view> seen;
    for (const auto& topic : topics) {
        if (!seen.insert(topic.topic_id).second) throw DataError("duplicate topic_id: " + topic.topic_id);
        queries.push_back(compose_query(topic, spec.fields, spec.query_lang, spec.translator));
    }

    std::vector<std::vector<RankedDoc>> results(topics.size());
    auto run_one = [&](std::size_t i) {
        const auto tokens = index.analyzer().tokenize(queries[i]);
        auto hits = search(index, tokens, spec.depth, spec.params);
        std::vector<RankedDoc> ranked;
        ranked.reserve(hits.size());
        long rank = 1;
        for (auto& h : hits) ranked.push_back({std::move(h.doc_id), rank++, h.score});
        results[i] = std::move(ranked);
    };

    workers = std::max(1u, workers);
    if (workers == 1 || topics.size() < 2) {
        for (std::size_t i = 0; i < topics.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t i = next++; i < topics.size(); i = next++) run_one(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    Run run;
    run.run_tag = spec.run_tag.empty() ? "bm25:" + std::string(to_string(spec.translator)) + ":" +
                                             std::string(to_string(spec.fields))
                                       : spec.run_tag;
    for (std::size_t i = 0; i < topics.size(); ++i) {
        if (results[i].empty()) continue;
        run.topics.emplace(topics[i].topic_id, std::move(results[i]));
    }
    return run;
}

}  // namespace clir
