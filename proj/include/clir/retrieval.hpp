#pragma once

#include <span>
#include <string>
#include <vector>

#include "clir/index.hpp"
#include "clir/model.hpp"

namespace clir {

/// Okapi BM25 contribution of one query term to one document, with the
/// Lucene-style idf ln(1 + (N - df + 0.5) / (df + 0.5)).
/// Throws ContractError unless N >= 1, 1 <= df <= N, tf >= 1, doclen >= 1, avgdl > 0.
[[nodiscard]] double bm25_term_score(long tf, long df, long doclen, double avgdl, long num_docs,
                                     const Bm25Params& params);

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
};

/// Term-at-a-time BM25 over the index. Duplicate query tokens contribute once
/// per occurrence. Returns at most k documents, best first, ties by
/// ascending doc_id.
[[nodiscard]] std::vector<ScoredDoc> search(const Index& index, std::span<const std::string> query_tokens,
                                            long k, const Bm25Params& params = {});

struct Bm25RunSpec {
    Bm25Params params;
    QueryFields fields = QueryFields::title_and_description;
    LangTag query_lang = LangTag::en;
    TranslatorTag translator = TranslatorTag::original;
    long depth = 1000;
    std::string run_tag;  ///< empty: "bm25:<translator>:<fields>"
};

/// Runs every topic through search() with the index's own analyzer. Topics
/// are spread over `workers` threads; the output does not depend on it.
/// Topics missing the requested variant raise MissingVariantError.
[[nodiscard]] Run retrieve(const Index& index, std::span<const Topic> topics, const Bm25RunSpec& spec,
                           unsigned workers = 1);

}  // namespace clir
