#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clir/analysis.hpp"
#include "clir/model.hpp"

namespace clir {

struct ScorePair {
    std::string topic_id;
    std::string doc_id;
    std::string query_text;
    std::string doc_text;  ///< title + ' ' + body

    bool operator==(const ScorePair&) const = default;
};

struct ScoreRequest {
    std::vector<ScorePair> pairs;
};

struct ScoreResponse {
    std::vector<double> scores;  ///< parallel to ScoreRequest::pairs
};

/// Relevance scorer for (query, document) pairs. Implementations must return
/// exactly one finite score per pair, in order.
class Scorer {
  public:
    virtual ~Scorer() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    /// `batch_size` bounds how many pairs travel together; local scorers may ignore it.
    [[nodiscard]] virtual std::vector<double> score(std::span<const ScorePair> pairs, std::size_t batch_size) = 0;
};

/// |unique query tokens ∩ unique doc tokens| / max(1, |unique query tokens|).
[[nodiscard]] double lexical_overlap_score(std::string_view query_text, std::string_view doc_text,
                                           const Analyzer& analyzer);

class LexicalScorer final : public Scorer {
  public:
    explicit LexicalScorer(Analyzer analyzer) : analyzer_(analyzer) {}
    [[nodiscard]] std::string name() const override { return "lexical"; }
    [[nodiscard]] std::vector<double> score(std::span<const ScorePair> pairs, std::size_t batch_size) override;

  private:
    Analyzer analyzer_;
};

// ------------------------------------------------------------------ remote

struct RetryPolicy {
    int max_retries = 3;  ///< additional attempts after the first
    std::chrono::milliseconds initial_backoff{100};
    double multiplier = 2.0;
    std::chrono::milliseconds max_backoff{5000};
};

/// Delay before retry number `attempt` (0-based): initial * multiplier^attempt,
/// capped at max_backoff. No jitter, so retry timing is reproducible.
[[nodiscard]] std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt);

struct RemoteOptions {
    std::size_t batch_size = 32;
    std::chrono::milliseconds timeout{30000};  ///< per batch request
    RetryPolicy retry;
    unsigned max_in_flight = 1;  ///< concurrent batches
};

/// Encodes {"pairs":[{"topic_id","doc_id","query","text"}, ...]}.
[[nodiscard]] std::string encode_score_request(std::span<const ScorePair> pairs);

/// Decodes {"scores":[...]}; throws ScorerError unless it holds exactly
/// `expected` finite numbers.
[[nodiscard]] std::vector<double> decode_score_response(std::string_view body, std::size_t expected);

/// Splits the request into batches of at most `batch_size`, POSTs each to
/// <endpoint>/score, and reassembles scores in request order. Transport
/// failures, timeouts, 429 and 5xx responses are retried with exponential
/// backoff; other 4xx replies and protocol violations fail immediately.
/// Throws ScorerError on final failure, ConfigError on a bad endpoint.
[[nodiscard]] ScoreResponse remote_score(const std::string& endpoint, const ScoreRequest& request,
                                         const RemoteOptions& options);

struct HealthStatus {
    std::string status;
    std::string model;
};

/// GET <endpoint>/health; throws ScorerError unless it answers 200 with a status.
[[nodiscard]] HealthStatus check_health(const std::string& endpoint, std::chrono::milliseconds timeout);

class RemoteScorer final : public Scorer {
  public:
    RemoteScorer(std::string endpoint, RemoteOptions options);
    [[nodiscard]] std::string name() const override { return "remote:" + endpoint_; }
    [[nodiscard]] std::vector<double> score(std::span<const ScorePair> pairs, std::size_t batch_size) override;

  private:
    std::string endpoint_;
    RemoteOptions options_;
};

// ------------------------------------------------------------------ rerank

/// In-memory doc_id -> Document lookup.
class DocumentStore {
  public:
    DocumentStore() = default;
    explicit DocumentStore(std::vector<Document> docs);
    [[nodiscard]] const Document* find(const std::string& doc_id) const;
    [[nodiscard]] std::size_t size() const noexcept { return docs_.size(); }

  private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

struct RerankConfig {
    QueryFields fields = QueryFields::title_and_description;
    LangTag query_lang = LangTag::en;
    TranslatorTag query_translator = TranslatorTag::original;
    long depth = 100;
    std::size_t batch_size = 32;
    std::string run_tag;  ///< empty: "rerank:<translator>:<fields>"
};

/// Reorders the top min(depth, n) candidates of every topic by scorer score
/// (ties by ascending doc_id). Candidates below depth keep their relative
/// order and get scores strictly below the reranked block, stepping down.
/// The set of documents per topic never changes.
///
/// Throws DataError for an unknown topic or doc_id, ScorerError when the
/// scorer fails or returns a malformed score list.
[[nodiscard]] Run rerank(const Run& run, std::span<const Topic> topics, const DocumentStore& docs, Scorer& scorer,
                         const RerankConfig& config);

}  // namespace clir
