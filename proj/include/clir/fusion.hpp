#pragma once

#include <span>
#include <string>

#include "clir/model.hpp"

namespace clir {

/// Reciprocal rank fusion.
///
/// For each topic in the union of the inputs, every document found at rank
/// r <= params.depth in some run scores the sum over those runs of
/// 1 / (params.k + r). Raw input scores are ignored. Output is ranked by
/// fused score, ties by ascending doc_id, and cut at params.depth.
///
/// Each document's terms are summed in ascending rank order, so permuting
/// the input runs yields a bit-identical result.
///
/// Throws ContractError for fewer than two runs, DataError for a malformed
/// input run.
[[nodiscard]] Run rrf_fuse(std::span<const Run> runs, const RrfParams& params = {}, std::string run_tag = "rrf");

}  // namespace clir
