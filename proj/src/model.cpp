#include "clir/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

namespace clir {

namespace {

constexpr std::array<std::pair<LangTag, std::string_view>, 4> kLangNames{{
    {LangTag::fa, "fa"},
    {LangTag::ru, "ru"},
    {LangTag::zh, "zh"},
    {LangTag::en, "en"},
}};

constexpr std::array<std::pair<TranslatorTag, std::string_view>, 7> kTranslatorNames{{
    {TranslatorTag::bing, "bing"},
    {TranslatorTag::facebook, "facebook"},
    {TranslatorTag::huawei, "huawei"},
    {TranslatorTag::caiyun, "caiyun"},
    {TranslatorTag::youdao, "youdao"},
    {TranslatorTag::ht, "ht"},
    {TranslatorTag::original, "original"},
}};

constexpr std::array<std::pair<QueryFields, std::string_view>, 3> kFieldNames{{
    {QueryFields::title, "title"},
    {QueryFields::description, "description"},
    {QueryFields::title_and_description, "title_and_description"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum value) noexcept {
    for (const auto& [e, name] : table) {
        if (e == value) return name;
    }
    return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> value_of(const std::array<std::pair<Enum, std::string_view>, N>& table,
                             std::string_view name) noexcept {
    for (const auto& [e, n] : table) {
        if (n == name) return e;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(LangTag lang) noexcept { return name_of(kLangNames, lang); }
std::string_view to_string(TranslatorTag translator) noexcept { return name_of(kTranslatorNames, translator); }
std::string_view to_string(QueryFields fields) noexcept { return name_of(kFieldNames, fields); }

std::optional<LangTag> parse_lang(std::string_view code) noexcept { return value_of(kLangNames, code); }
std::optional<TranslatorTag> parse_translator(std::string_view id) noexcept {
    return value_of(kTranslatorNames, id);
}
std::optional<QueryFields> parse_query_fields(std::string_view mode) noexcept {
    return value_of(kFieldNames, mode);
}

const TopicText* Topic::find(LangTag lang, TranslatorTag translator) const {
    auto it = variants.find({lang, translator});
    return it == variants.end() ? nullptr : &it->second;
}

MissingVariantError::MissingVariantError(const std::string& topic_id, LangTag lang, TranslatorTag translator)
    : DataError("topic " + topic_id + " has no (" + std::string(to_string(lang)) + ", " +
                std::string(to_string(translator)) + ") variant"),
      lang_(lang),
      translator_(translator) {}

std::string compose_query(const Topic& topic, QueryFields fields, LangTag lang, TranslatorTag translator) {
    const TopicText* text = topic.find(lang, translator);
    if (text == nullptr) throw MissingVariantError(topic.topic_id, lang, translator);
    switch (fields) {
        case QueryFields::title: return text->title;
        case QueryFields::description: return text->description;
        case QueryFields::title_and_description: return text->title + ' ' + text->description;
    }
    return text->title;
}

std::size_t Run::entry_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [_, docs] : topics) n += docs.size();
    return n;
}

std::vector<RunEntry> Run::entries() const {
    std::vector<RunEntry> out;
    out.reserve(entry_count());
    for (const auto& [topic_id, docs] : topics) {
        for (const auto& d : docs) out.push_back({topic_id, d.doc_id, d.rank, d.score, run_tag});
    }
    return out;
}

std::vector<RankedDoc> assign_ranks(std::vector<std::pair<std::string, double>> scored) {
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<RankedDoc> ranked;
    ranked.reserve(scored.size());
    long rank = 1;
    for (auto& [doc_id, score] : scored) ranked.push_back({std::move(doc_id), rank++, score});
    return ranked;
}

std::string_view to_string(RunRule rule) noexcept {
    switch (rule) {
        case RunRule::non_positive_rank: return "non-positive rank";
        case RunRule::rank_gap: return "rank gap";
        case RunRule::duplicate_rank: return "duplicate rank";
        case RunRule::rank_order: return "rank out of order";
        case RunRule::duplicate_doc: return "duplicate doc";
        case RunRule::score_order: return "score increases with rank";
        case RunRule::non_finite_score: return "non-finite score";
    }
    return "?";
}

std::string RunViolation::describe() const {
    std::ostringstream out;
    out << "topic " << topic_id << ", position " << position + 1 << ": " << to_string(rule);
    if (!detail.empty()) out << " (" << detail << ")";
    return out.str();
}

std::vector<RunViolation> validate_run(const Run& run) {
    std::vector<RunViolation> violations;
    for (const auto& [topic_id, docs] : run.topics) {
        std::set<std::string_view> seen;
        long prev_rank = 0;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const RankedDoc& d = docs[i];
            auto report = [&](RunRule rule, std::string detail) {
                violations.push_back({topic_id, i, rule, std::move(detail)});
            };
            if (d.rank <= 0) {
                report(RunRule::non_positive_rank, "rank " + std::to_string(d.rank));
            } else if (d.rank == prev_rank) {
                report(RunRule::duplicate_rank, "rank " + std::to_string(d.rank));
            } else if (d.rank < prev_rank) {
                report(RunRule::rank_order, "rank " + std::to_string(d.rank) + " after " + std::to_string(prev_rank));
            } else if (d.rank > prev_rank + 1) {
                report(RunRule::rank_gap, "expected rank " + std::to_string(prev_rank + 1) + ", got " +
                                              std::to_string(d.rank));
            }
            if (d.rank > 0) prev_rank = std::max(prev_rank, d.rank);

            if (!seen.insert(d.doc_id).second) report(RunRule::duplicate_doc, d.doc_id);

            if (!std::isfinite(d.score)) {
                report(RunRule::non_finite_score, d.doc_id);
            } else if (i > 0 && std::isfinite(docs[i - 1].score) && d.score > docs[i - 1].score) {
                report(RunRule::score_order, d.doc_id);
            }
        }
    }
    return violations;
}

void require_valid(const Run& run, std::string_view context) {
    auto violations = validate_run(run);
    if (violations.empty()) return;
    std::ostringstream out;
    out << context << ": invalid run '" << run.run_tag << "': " << violations.size() << " violation(s)";
    const std::size_t shown = std::min<std::size_t>(violations.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) out << "; " << violations[i].describe();
    throw DataError(out.str());
}

int Qrels::grade(const std::string& topic_id, const std::string& doc_id) const {
    const auto* judged = find(topic_id);
    if (judged == nullptr) return 0;
    auto it = judged->find(doc_id);
    return it == judged->end() ? 0 : it->second;
}

const std::map<std::string, int>* Qrels::find(const std::string& topic_id) const {
    auto it = topics.find(topic_id);
    return it == topics.end() ? nullptr : &it->second;
}

void check(const Bm25Params& params) {
    if (!(params.k1 > 0.0) || !std::isfinite(params.k1)) throw ContractError("bm25 k1 must be > 0");
    if (!(params.b >= 0.0 && params.b <= 1.0)) throw ContractError("bm25 b must be in [0, 1]");
}

void check(const RbpParams& params) {
    if (!(params.p > 0.0 && params.p < 1.0)) throw ContractError("rbp persistence p must be in (0, 1)");
}

void check(const RrfParams& params) {
    if (!(params.k > 0.0) || !std::isfinite(params.k)) throw ContractError("rrf k must be > 0");
    if (params.depth < 1) throw ContractError("rrf depth must be >= 1");
}

}  // namespace clir
