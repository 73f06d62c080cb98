#include "clir/rerank.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <regex>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace clir {

using nlohmann::json;

// ------------------------------------------------------------------ lexical

double lexical_overlap_score(std::string_view query_text, std::string_view doc_text, const Analyzer& analyzer) {
    const auto q = analyzer.tokenize(query_text);
    const auto d = analyzer.tokenize(doc_text);
    const std::set<std::string> query_terms(q.begin(), q.end());
    const std::set<std::string> doc_terms(d.begin(), d.end());
    std::size_t shared = 0;
    for (const auto& t : query_terms) shared += doc_terms.count(t);
    return static_cast<double>(shared) / static_cast<double>(std::max<std::size_t>(1, query_terms.size()));
}

std::vector<double> LexicalScorer::score(std::span<const ScorePair> pairs, std::size_t /*batch_size*/) {
    std::vector<double> scores;
    scores.reserve(pairs.size());
    for (const auto& p : pairs) scores.push_back(lexical_overlap_score(p.query_text, p.doc_text, analyzer_));
    return scores;
}

// ------------------------------------------------------------------ remote

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt) {
    double delay = static_cast<double>(policy.initial_backoff.count());
    for (int i = 0; i < attempt && delay < static_cast<double>(policy.max_backoff.count()); ++i) {
        delay *= policy.multiplier;
    }
    delay = std::min(delay, static_cast<double>(policy.max_backoff.count()));
    return std::chrono::milliseconds(static_cast<long long>(delay));
}

std::string encode_score_request(std::span<const ScorePair> pairs) {
    json j;
    j["pairs"] = json::array();
    for (const auto& p : pairs) {
        j["pairs"].push_back(
            {{"topic_id", p.topic_id}, {"doc_id", p.doc_id}, {"query", p.query_text}, {"text", p.doc_text}});
    }
    try {
        return j.dump();
    } catch (const json::type_error& e) {
        throw DataError(std::string("score request is not valid UTF-8: ") + e.what());
    }
}

std::vector<double> decode_score_response(std::string_view body, std::size_t expected) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw ScorerError(std::string("protocol error: malformed response body: ") + e.what());
    }
    if (!j.is_object() || !j.contains("scores") || !j["scores"].is_array()) {
        throw ScorerError("protocol error: response lacks a \"scores\" array");
    }
    const auto& arr = j["scores"];
    if (arr.size() != expected) {
        throw ScorerError("protocol error: expected " + std::to_string(expected) + " scores, got " +
                          std::to_string(arr.size()));
    }
    std::vector<double> scores;
    scores.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw ScorerError("protocol error: score " + std::to_string(i) + " is not a number");
        const double v = arr[i].get<double>();
        if (!std::isfinite(v)) throw ScorerError("protocol error: score " + std::to_string(i) + " is not finite");
        scores.push_back(v);
    }
    return scores;
}

namespace {

struct Endpoint {
    std::string base;    // scheme://host[:port]
    std::string prefix;  // path prefix without trailing '/'
};

Endpoint parse_endpoint(const std::string& endpoint) {
    static const std::regex pattern(R"(^(http://[^/\s]+)(/[^\s]*)?$)");
    std::smatch m;
    if (!std::regex_match(endpoint, m, pattern)) {
        throw ConfigError("scorer endpoint must look like http://host:port[/prefix], got '" + endpoint + "'");
    }
    std::string prefix = m[2].str();
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {m[1].str(), prefix};
}

httplib::Client make_client(const Endpoint& ep, std::chrono::milliseconds timeout) {
    httplib::Client client(ep.base);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    client.set_keep_alive(true);
    return client;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

std::vector<double> post_batch(httplib::Client& client, const Endpoint& ep, std::span<const ScorePair> batch,
                               const RetryPolicy& retry) {
    const std::string body = encode_score_request(batch);
    std::string last_error;
    for (int attempt = 0; attempt <= retry.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(backoff_delay(retry, attempt - 1));
        auto res = client.Post(ep.prefix + "/score", body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return decode_score_response(res->body, batch.size());
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
        if (!retryable_status(res->status)) throw ScorerError("scorer rejected batch: " + last_error);
    }
    throw ScorerError("scorer failed after " + std::to_string(retry.max_retries + 1) + " attempt(s): " + last_error);
}

}  // namespace

ScoreResponse remote_score(const std::string& endpoint, const ScoreRequest& request, const RemoteOptions& options) {
    if (options.batch_size == 0) throw ContractError("remote_score: batch_size must be >= 1");
    if (options.retry.max_retries < 0) throw ContractError("remote_score: retries must be >= 0");
    const Endpoint ep = parse_endpoint(endpoint);

    const std::size_t n = request.pairs.size();
    const std::size_t num_batches = (n + options.batch_size - 1) / options.batch_size;
    std::vector<std::vector<double>> results(num_batches);
    std::vector<std::exception_ptr> errors(num_batches);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto worker = [&] {
        auto client = make_client(ep, options.timeout);
        for (std::size_t b = next++; b < num_batches && !failed; b = next++) {
            const std::size_t begin = b * options.batch_size;
            const std::size_t len = std::min(options.batch_size, n - begin);
            try {
                results[b] = post_batch(client, ep, std::span(request.pairs).subspan(begin, len), options.retry);
            } catch (...) {
                errors[b] = std::current_exception();
                failed = true;
            }
        }
    };

    const unsigned threads = static_cast<unsigned>(
        std::min<std::size_t>(std::max(1u, options.max_in_flight), std::max<std::size_t>(1, num_batches)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    ScoreResponse response;
    response.scores.reserve(n);
    for (auto& r : results) response.scores.insert(response.scores.end(), r.begin(), r.end());
    return response;
}

HealthStatus check_health(const std::string& endpoint, std::chrono::milliseconds timeout) {
    const Endpoint ep = parse_endpoint(endpoint);
    auto client = make_client(ep, timeout);
    auto res = client.Get(ep.prefix + "/health");
    if (!res) throw ScorerError("health check failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ScorerError("health check returned HTTP " + std::to_string(res->status));
    try {
        const json j = json::parse(res->body);
        HealthStatus h;
        h.status = j.at("status").get<std::string>();
        h.model = j.value("model", std::string());
        return h;
    } catch (const json::exception& e) {
        throw ScorerError(std::string("protocol error: malformed health response: ") + e.what());
    }
}

RemoteScorer::RemoteScorer(std::string endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
    (void)parse_endpoint(endpoint_);
}

std::vector<double> RemoteScorer::score(std::span<const ScorePair> pairs, std::size_t batch_size) {
    RemoteOptions opts = options_;
    if (batch_size > 0) opts.batch_size = batch_size;
    ScoreRequest request{{pairs.begin(), pairs.end()}};
    return remote_score(endpoint_, request, opts).scores;
}

// ------------------------------------------------------------------ rerank

DocumentStore::DocumentStore(std::vector<Document> docs) : docs_(std::move(docs)) {
    by_id_.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (!by_id_.emplace(docs_[i].doc_id, i).second) throw DataError("duplicate doc_id: " + docs_[i].doc_id);
    }
}

const Document* DocumentStore::find(const std::string& doc_id) const {
    auto it = by_id_.find(doc_id);
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

Run rerank(const Run& run, std::span<const Topic> topics, const DocumentStore& docs, Scorer& scorer,
           const RerankConfig& config) {
    if (config.depth < 1) throw ContractError("rerank: depth must be >= 1");
    if (config.batch_size < 1) throw ContractError("rerank: batch_size must be >= 1");
    require_valid(run, "rerank input");

    std::unordered_map<std::string_view, const Topic*> topic_by_id;
    for (const auto& t : topics) topic_by_id.emplace(t.topic_id, &t);

    std::vector<ScorePair> pairs;
    for (const auto& [topic_id, ranked] : run.topics) {
        auto it = topic_by_id.find(topic_id);
        if (it == topic_by_id.end()) throw DataError("rerank: run topic " + topic_id + " not found in topics");
        const std::string query =
            compose_query(*it->second, config.fields, config.query_lang, config.query_translator);
        const std::size_t head = std::min(ranked.size(), static_cast<std::size_t>(config.depth));
        for (std::size_t i = 0; i < head; ++i) {
            const Document* doc = docs.find(ranked[i].doc_id);
            if (doc == nullptr) throw DataError("rerank: doc_id " + ranked[i].doc_id + " not found in corpus");
            pairs.push_back({topic_id, ranked[i].doc_id, query, doc->indexed_text()});
        }
    }

    std::vector<double> scores;
    if (!pairs.empty()) {
        scores = scorer.score(pairs, config.batch_size);
        if (scores.size() != pairs.size()) {
            throw ScorerError("scorer " + scorer.name() + " returned " + std::to_string(scores.size()) +
                              " scores for " + std::to_string(pairs.size()) + " pairs");
        }
        for (double s : scores) {
            if (!std::isfinite(s)) throw ScorerError("scorer " + scorer.name() + " returned a non-finite score");
        }
    }

    Run out;
    out.run_tag = config.run_tag.empty() ? "rerank:" + std::string(to_string(config.query_translator)) + ":" +
                                               std::string(to_string(config.fields))
                                         : config.run_tag;
    std::size_t cursor = 0;
    for (const auto& [topic_id, ranked] : run.topics) {
        const std::size_t head = std::min(ranked.size(), static_cast<std::size_t>(config.depth));
        std::vector<std::pair<std::string, double>> scored;
        scored.reserve(head);
        for (std::size_t i = 0; i < head; ++i) scored.emplace_back(ranked[i].doc_id, scores[cursor++]);
        auto reranked = assign_ranks(std::move(scored));

        if (head < ranked.size()) {
            // Tail keeps its order, stepping down below the block minimum in
            // steps large enough to survive six-decimal serialization.
            const double floor = reranked.back().score;
            const double step = std::max(1.0, std::abs(floor) * 0x1p-40);
            long rank = static_cast<long>(head);
            for (std::size_t i = head; i < ranked.size(); ++i) {
                ++rank;
                reranked.push_back({ranked[i].doc_id, rank, floor - step * static_cast<double>(i - head + 1)});
            }
        }
        out.topics.emplace(topic_id, std::move(reranked));
    }
    return out;
}

}  // namespace clir
