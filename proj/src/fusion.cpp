#include "clir/fusion.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace clir {

Run rrf_fuse(std::span<const Run> runs, const RrfParams& params, std::string run_tag) {
    if (runs.size() < 2) throw ContractError("rrf_fuse needs at least two runs, got " + std::to_string(runs.size()));
    check(params);
    for (std::size_t i = 0; i < runs.size(); ++i) require_valid(runs[i], "rrf input " + std::to_string(i));

    std::set<std::string> topic_ids;
    for (const auto& run : runs) {
        for (const auto& [topic_id, _] : run.topics) topic_ids.insert(topic_id);
    }

    Run fused;
    fused.run_tag = std::move(run_tag);
    for (const auto& topic_id : topic_ids) {
        std::unordered_map<std::string, std::vector<long>> ranks;
        for (const auto& run : runs) {
            auto it = run.topics.find(topic_id);
            if (it == run.topics.end()) continue;
            for (const auto& d : it->second) {
                if (d.rank > params.depth) break;
                ranks[d.doc_id].push_back(d.rank);
            }
        }
        std::vector<std::pair<std::string, double>> scored;
        scored.reserve(ranks.size());
        for (auto& [doc_id, doc_ranks] : ranks) {
            std::sort(doc_ranks.begin(), doc_ranks.end());
            double score = 0.0;
            for (long r : doc_ranks) score += 1.0 / (params.k + static_cast<double>(r));
            scored.emplace_back(doc_id, score);
        }
        auto ranked = assign_ranks(std::move(scored));
        if (static_cast<long>(ranked.size()) > params.depth) ranked.resize(static_cast<std::size_t>(params.depth));
        if (!ranked.empty()) fused.topics.emplace(topic_id, std::move(ranked));
    }
    return fused;
}

}  // namespace clir
