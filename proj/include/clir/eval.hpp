#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clir/model.hpp"

namespace clir {

/// Judgments for a single topic: doc_id -> grade. Missing docs are grade 0.
using TopicQrels = std::map<std::string, int>;

/// Graded nDCG@k with linear gain and log2(i + 1) discount. The ideal
/// ranking is built from every judged document. Returns 0 when IDCG is 0.
[[nodiscard]] double ndcg_at_k(std::span<const std::string> ranked, const TopicQrels& qrels, long k);

/// Average precision over the full ranked list, binary relevance (grade > 0).
[[nodiscard]] double average_precision(std::span<const std::string> ranked, const TopicQrels& qrels);

/// Rank-biased precision (1 - p) * sum rel(d_i) p^(i-1), binary relevance.
[[nodiscard]] double rbp(std::span<const std::string> ranked, const TopicQrels& qrels, const RbpParams& params = {});

/// Fraction of relevant (grade > 0) documents found in the top k.
[[nodiscard]] double recall_at_k(std::span<const std::string> ranked, const TopicQrels& qrels, long k);

enum class MetricKind { ndcg, map, rbp, recall };

struct MetricSpec {
    MetricKind kind = MetricKind::ndcg;
    long cutoff = 0;  ///< used by ndcg and recall

    /// Canonical name: "ndcg@20", "map", "rbp", "r@1000".
    [[nodiscard]] std::string name() const;

    bool operator==(const MetricSpec&) const = default;
};

/// Accepts "ndcg@K", "map", "rbp", "r@K" / "recall@K" (case-insensitive).
[[nodiscard]] std::optional<MetricSpec> parse_metric(std::string_view text);

/// nDCG@20, MAP, RBP, R@100, R@1000.
[[nodiscard]] std::vector<MetricSpec> default_metrics();

struct MetricReport {
    std::vector<std::string> metric_names;  ///< column order
    std::map<std::string, std::map<std::string, double>> per_topic;
    std::map<std::string, double> means;

    [[nodiscard]] std::size_t num_topics() const noexcept { return per_topic.size(); }
};

/// Scores every topic that appears in the run and has at least one relevant
/// judgment; means are unweighted over those topics. Throws DataError when
/// the run and qrels share no topic, or no shared topic has a relevant doc.
[[nodiscard]] MetricReport evaluate(const Run& run, const Qrels& qrels, std::span<const MetricSpec> metrics,
                                    const RbpParams& rbp_params = {});

/// Per-topic table: header "topic<TAB>metric...", one row per topic in
/// ascending order, then an "all" row with the means. Four decimals.
[[nodiscard]] std::string format_report_tsv(const MetricReport& report);

/// {"metrics": {name: mean}, "num_topics": n}
[[nodiscard]] std::string format_report_json(const MetricReport& report);

struct ComparisonRow {
    std::string label;
    std::map<std::string, double> means;
};

/// Several runs side by side, one row per run, columns in metric order.
[[nodiscard]] std::string format_comparison_tsv(std::span<const ComparisonRow> rows,
                                                std::span<const std::string> metric_names);

/// Picks the machine translator whose run has the best mean nDCG@20, then
/// best mean R@1000, then the lexicographically smallest tag. Human
/// translations (ht) are never selected. Throws DataError when no machine
/// translator candidate is given.
[[nodiscard]] TranslatorTag select_translator(const std::map<TranslatorTag, Run>& runs_by_translator,
                                              const Qrels& qrels);

/// The comparison behind select_translator, including ht rows, ordered by tag name.
[[nodiscard]] std::vector<ComparisonRow> compare_translators(const std::map<TranslatorTag, Run>& runs_by_translator,
                                                             const Qrels& qrels,
                                                             std::span<const MetricSpec> metrics,
                                                             const RbpParams& rbp_params = {});

}  // namespace clir
