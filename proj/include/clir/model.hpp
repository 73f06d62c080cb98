#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clir/errors.hpp"

namespace clir {

enum class LangTag { fa, ru, zh, en };

/// Source of a topic variant. `ht` is a human translation, `original` the
/// untranslated English topic.
enum class TranslatorTag { bing, facebook, huawei, caiyun, youdao, ht, original };

enum class QueryFields { title, description, title_and_description };

[[nodiscard]] std::string_view to_string(LangTag lang) noexcept;
[[nodiscard]] std::string_view to_string(TranslatorTag translator) noexcept;
[[nodiscard]] std::string_view to_string(QueryFields fields) noexcept;

/// Exact-match parsers; return nullopt for anything outside the closed sets.
[[nodiscard]] std::optional<LangTag> parse_lang(std::string_view code) noexcept;
[[nodiscard]] std::optional<TranslatorTag> parse_translator(std::string_view id) noexcept;
[[nodiscard]] std::optional<QueryFields> parse_query_fields(std::string_view mode) noexcept;

struct Document {
    std::string doc_id;
    std::string title;
    std::string body;
    LangTag lang = LangTag::en;

    /// Text seen by the indexer and the reranker: title + ' ' + body.
    [[nodiscard]] std::string indexed_text() const { return title + ' ' + body; }

    bool operator==(const Document&) const = default;
};

struct TopicText {
    std::string title;
    std::string description;

    bool operator==(const TopicText&) const = default;
};

struct Topic {
    using VariantKey = std::pair<LangTag, TranslatorTag>;

    std::string topic_id;
    std::map<VariantKey, TopicText> variants;

    [[nodiscard]] const TopicText* find(LangTag lang, TranslatorTag translator) const;

    bool operator==(const Topic&) const = default;
};

/// Thrown by compose_query when the requested (lang, translator) variant is absent.
class MissingVariantError : public DataError {
  public:
    MissingVariantError(const std::string& topic_id, LangTag lang, TranslatorTag translator);
    [[nodiscard]] LangTag lang() const noexcept { return lang_; }
    [[nodiscard]] TranslatorTag translator() const noexcept { return translator_; }

  private:
    LangTag lang_;
    TranslatorTag translator_;
};

/// Builds the query string for one topic variant. title_and_description
/// joins the two fields with a single space; nothing else is normalized.
[[nodiscard]] std::string compose_query(const Topic& topic, QueryFields fields, LangTag lang,
                                        TranslatorTag translator);

/// One ranked document within a topic of a Run.
struct RankedDoc {
    std::string doc_id;
    long rank = 0;
    double score = 0.0;

    bool operator==(const RankedDoc&) const = default;
};

/// Flat, line-shaped view of a run entry (one TREC run line).
struct RunEntry {
    std::string topic_id;
    std::string doc_id;
    long rank = 0;
    double score = 0.0;
    std::string tag;

    bool operator==(const RunEntry&) const = default;
};

/// Per-topic ranked lists. Each list is stored in rank order; topics with
/// no entries are simply absent.
struct Run {
    std::string run_tag;
    std::map<std::string, std::vector<RankedDoc>> topics;

    [[nodiscard]] std::size_t entry_count() const noexcept;
    [[nodiscard]] std::vector<RunEntry> entries() const;

    bool operator==(const Run&) const = default;
};

/// Sorts (doc_id, score) pairs by score descending, ties by ascending doc_id,
/// and assigns ranks 1..n.
[[nodiscard]] std::vector<RankedDoc> assign_ranks(std::vector<std::pair<std::string, double>> scored);

enum class RunRule { non_positive_rank, rank_gap, duplicate_rank, rank_order, duplicate_doc, score_order, non_finite_score };

[[nodiscard]] std::string_view to_string(RunRule rule) noexcept;

struct RunViolation {
    std::string topic_id;
    std::size_t position = 0;  ///< 0-based index into the topic's list
    RunRule rule = RunRule::rank_gap;
    std::string detail;

    [[nodiscard]] std::string describe() const;
};

/// Lists every broken Run invariant; empty iff the run is well formed.
[[nodiscard]] std::vector<RunViolation> validate_run(const Run& run);

/// Throws DataError summarizing the violations, if any.
void require_valid(const Run& run, std::string_view context);

/// Graded judgments. Unjudged (topic, doc) pairs read as grade 0.
struct Qrels {
    std::map<std::string, std::map<std::string, int>> topics;

    [[nodiscard]] int grade(const std::string& topic_id, const std::string& doc_id) const;
    [[nodiscard]] const std::map<std::string, int>* find(const std::string& topic_id) const;

    bool operator==(const Qrels&) const = default;
};

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

struct RbpParams {
    double p = 0.8;
};

struct RrfParams {
    double k = 60.0;
    long depth = 1000;
};

void check(const Bm25Params& params);
void check(const RbpParams& params);
void check(const RrfParams& params);

}  // namespace clir
