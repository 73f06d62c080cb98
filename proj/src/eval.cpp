#include "clir/eval.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace clir {

namespace {

int grade_of(const TopicQrels& qrels, const std::string& doc_id) {
    auto it = qrels.find(doc_id);
    return it == qrels.end() ? 0 : it->second;
}

long relevant_count(const TopicQrels& qrels) {
    return std::count_if(qrels.begin(), qrels.end(), [](const auto& kv) { return kv.second > 0; });
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

double metric_value(const MetricSpec& spec, std::span<const std::string> ranked, const TopicQrels& qrels,
                    const RbpParams& rbp_params) {
    switch (spec.kind) {
        case MetricKind::ndcg: return ndcg_at_k(ranked, qrels, spec.cutoff);
        case MetricKind::map: return average_precision(ranked, qrels);
        case MetricKind::rbp: return rbp(ranked, qrels, rbp_params);
        case MetricKind::recall: return recall_at_k(ranked, qrels, spec.cutoff);
    }
    return 0.0;
}

}  // namespace

double ndcg_at_k(std::span<const std::string> ranked, const TopicQrels& qrels, long k) {
    if (k < 1) throw ContractError("ndcg_at_k: k must be >= 1");
    const std::size_t cut = std::min(ranked.size(), static_cast<std::size_t>(k));
    double dcg = 0.0;
    for (std::size_t i = 0; i < cut; ++i) {
        const int g = grade_of(qrels, ranked[i]);
        if (g > 0) dcg += g / std::log2(static_cast<double>(i) + 2.0);
    }

    std::vector<int> grades;
    grades.reserve(qrels.size());
    for (const auto& [_, g] : qrels) {
        if (g > 0) grades.push_back(g);
    }
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < grades.size() && i < static_cast<std::size_t>(k); ++i) {
        idcg += grades[i] / std::log2(static_cast<double>(i) + 2.0);
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

double average_precision(std::span<const std::string> ranked, const TopicQrels& qrels) {
    const long total = relevant_count(qrels);
    if (total == 0) return 0.0;
    double sum = 0.0;
    long found = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (grade_of(qrels, ranked[i]) > 0) {
            ++found;
            sum += static_cast<double>(found) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total);
}

double rbp(std::span<const std::string> ranked, const TopicQrels& qrels, const RbpParams& params) {
    check(params);
    double sum = 0.0;
    double weight = 1.0;  // p^(i-1)
    for (const auto& doc : ranked) {
        if (grade_of(qrels, doc) > 0) sum += weight;
        weight *= params.p;
    }
    return (1.0 - params.p) * sum;
}

double recall_at_k(std::span<const std::string> ranked, const TopicQrels& qrels, long k) {
    if (k < 1) throw ContractError("recall_at_k: k must be >= 1");
    const long total = relevant_count(qrels);
    if (total == 0) return 0.0;
    const std::size_t cut = std::min(ranked.size(), static_cast<std::size_t>(k));
    long found = 0;
    for (std::size_t i = 0; i < cut; ++i) {
        if (grade_of(qrels, ranked[i]) > 0) ++found;
    }
    return static_cast<double>(found) / static_cast<double>(total);
}

std::string MetricSpec::name() const {
    switch (kind) {
        case MetricKind::ndcg: return "ndcg@" + std::to_string(cutoff);
        case MetricKind::map: return "map";
        case MetricKind::rbp: return "rbp";
        case MetricKind::recall: return "r@" + std::to_string(cutoff);
    }
    return "?";
}

std::optional<MetricSpec> parse_metric(std::string_view text) {
    const std::string s = lower(text);
    if (s == "map") return MetricSpec{MetricKind::map, 0};
    if (s == "rbp") return MetricSpec{MetricKind::rbp, 0};
    const auto at = s.find('@');
    if (at == std::string::npos) return std::nullopt;
    const std::string head = s.substr(0, at);
    const std::string tail = s.substr(at + 1);
    long cutoff = 0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), cutoff);
    if (ec != std::errc{} || ptr != tail.data() + tail.size() || cutoff < 1) return std::nullopt;
    if (head == "ndcg") return MetricSpec{MetricKind::ndcg, cutoff};
    if (head == "r" || head == "recall") return MetricSpec{MetricKind::recall, cutoff};
    return std::nullopt;
}

std::vector<MetricSpec> default_metrics() {
    return {{MetricKind::ndcg, 20}, {MetricKind::map, 0}, {MetricKind::rbp, 0}, {MetricKind::recall, 100},
            {MetricKind::recall, 1000}};
}

MetricReport evaluate(const Run& run, const Qrels& qrels, std::span<const MetricSpec> metrics,
                      const RbpParams& rbp_params) {
    check(rbp_params);
    MetricReport report;
    for (const auto& m : metrics) report.metric_names.push_back(m.name());

    bool shared = false;
    for (const auto& [topic_id, docs] : run.topics) {
        const TopicQrels* judged = qrels.find(topic_id);
        if (judged == nullptr) continue;
        shared = true;
        if (relevant_count(*judged) == 0) continue;

        std::vector<std::string> ranked;
        ranked.reserve(docs.size());
        for (const auto& d : docs) ranked.push_back(d.doc_id);
        auto& row = report.per_topic[topic_id];
        for (const auto& m : metrics) row[m.name()] = metric_value(m, ranked, *judged, rbp_params);
    }
    if (!shared) throw DataError("run '" + run.run_tag + "' and qrels share no topic");
    if (report.per_topic.empty()) {
        throw DataError("run '" + run.run_tag + "': no shared topic has a relevant judgment");
    }

    for (const auto& name : report.metric_names) {
        double sum = 0.0;
        for (const auto& [_, row] : report.per_topic) sum += row.at(name);
        report.means[name] = sum / static_cast<double>(report.per_topic.size());
    }
    return report;
}

std::string format_report_tsv(const MetricReport& report) {
    std::string out = "topic";
    for (const auto& name : report.metric_names) out += "\t" + name;
    out += "\n";
    for (const auto& [topic_id, row] : report.per_topic) {
        out += topic_id;
        for (const auto& name : report.metric_names) out += "\t" + fixed4(row.at(name));
        out += "\n";
    }
    out += "all";
    for (const auto& name : report.metric_names) out += "\t" + fixed4(report.means.at(name));
    out += "\n";
    return out;
}

std::string format_report_json(const MetricReport& report) {
    nlohmann::ordered_json j;
    j["metrics"] = nlohmann::ordered_json::object();
    for (const auto& name : report.metric_names) j["metrics"][name] = report.means.at(name);
    j["num_topics"] = report.num_topics();
    return j.dump(2) + "\n";
}

std::string format_comparison_tsv(std::span<const ComparisonRow> rows, std::span<const std::string> metric_names) {
    std::string out = "run";
    for (const auto& name : metric_names) out += "\t" + name;
    out += "\n";
    for (const auto& row : rows) {
        out += row.label;
        for (const auto& name : metric_names) {
            auto it = row.means.find(name);
            out += "\t" + (it == row.means.end() ? std::string("-") : fixed4(it->second));
        }
        out += "\n";
    }
    return out;
}

std::vector<ComparisonRow> compare_translators(const std::map<TranslatorTag, Run>& runs_by_translator,
                                               const Qrels& qrels, std::span<const MetricSpec> metrics,
                                               const RbpParams& rbp_params) {
    std::vector<ComparisonRow> rows;
    for (const auto& [tag, run] : runs_by_translator) {
        rows.push_back({std::string(to_string(tag)), evaluate(run, qrels, metrics, rbp_params).means});
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
    return rows;
}

TranslatorTag select_translator(const std::map<TranslatorTag, Run>& runs_by_translator, const Qrels& qrels) {
    if (runs_by_translator.empty()) throw DataError("select_translator: no candidate runs");
    const MetricSpec ndcg20{MetricKind::ndcg, 20};
    const MetricSpec r1000{MetricKind::recall, 1000};
    const std::vector<MetricSpec> metrics{ndcg20, r1000};

    std::optional<TranslatorTag> best;
    double best_ndcg = 0.0;
    double best_recall = 0.0;
    for (const auto& [tag, run] : runs_by_translator) {
        if (tag == TranslatorTag::ht) continue;
        const auto report = evaluate(run, qrels, metrics);
        const double ndcg = report.means.at(ndcg20.name());
        const double recall = report.means.at(r1000.name());
        bool take = !best.has_value();
        if (!take) {
            if (ndcg != best_ndcg) {
                take = ndcg > best_ndcg;
            } else if (recall != best_recall) {
                take = recall > best_recall;
            } else {
                take = to_string(tag) < to_string(*best);
            }
        }
        if (take) {
            best = tag;
            best_ndcg = ndcg;
            best_recall = recall;
        }
    }
    if (!best) throw DataError("select_translator: only human-translation candidates given");
    return *best;
}

}  // namespace clir
