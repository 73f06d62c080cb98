#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "clir/eval.hpp"
#include "clir/model.hpp"
#include "clir/rerank.hpp"
#include "clir/retrieval.hpp"

namespace clir {

struct Bm25Stage {
    Bm25RunSpec spec;
};

struct ExternalRunStage {
    std::filesystem::path path;
};

struct RrfStage;

/// One first-stage source. RRF inputs are themselves first stages (RRF of RRF is allowed).
using FirstStage = std::variant<Bm25Stage, ExternalRunStage, std::shared_ptr<RrfStage>>;

struct RrfStage {
    std::vector<FirstStage> inputs;
    RrfParams params;
};

struct LexicalScorerSpec {};

struct RemoteScorerSpec {
    std::string endpoint;
    RemoteOptions options;
};

enum class ScorerFallback { abort, lexical };

struct RerankStage {
    RerankConfig config;
    std::variant<LexicalScorerSpec, RemoteScorerSpec> scorer;
    ScorerFallback on_failure = ScorerFallback::abort;
};

struct EvalStage {
    std::vector<MetricSpec> metrics = default_metrics();
    RbpParams rbp;
};

struct PipelineConfig {
    std::string name = "pipeline";
    std::filesystem::path corpus;
    LangTag corpus_lang = LangTag::en;
    std::filesystem::path topics;
    std::optional<std::filesystem::path> qrels;
    std::optional<std::filesystem::path> index;  ///< prebuilt index to load instead of building
    FirstStage first_stage;
    std::optional<RerankStage> rerank;
    std::optional<EvalStage> eval;
    std::filesystem::path output_dir = "out";
};

/// Depth of the first stage's output, or nullopt when only known at run time
/// (external runs).
[[nodiscard]] std::optional<long> first_stage_depth(const FirstStage& stage);

/// Parses and validates a JSON config. Relative paths resolve against
/// `base_dir`. Every ConfigError names the offending JSON path, e.g.
/// "$.rerank.depth: must be <= first-stage depth (1000)". Referenced input
/// files must exist.
[[nodiscard]] PipelineConfig parse_pipeline_config(const std::string& json_text,
                                                   const std::filesystem::path& base_dir);

/// Reads the config file, applies "a.b.c=value" scalar overrides (values
/// parsed as JSON when possible, otherwise taken as strings) and the
/// CLIR_SCORER_ENDPOINT environment override, then parses it.
[[nodiscard]] PipelineConfig load_pipeline_config(const std::filesystem::path& path,
                                                  const std::vector<std::string>& overrides = {});

struct StageOutput {
    std::string name;  ///< file stem, e.g. "first_stage", "rerank"
    Run run;
    std::optional<MetricReport> report;
};

struct PipelineResult {
    std::vector<StageOutput> stages;  ///< in execution order
};

struct PipelineOptions {
    unsigned workers = 1;
};

/// Executes first stage -> (rerank) -> (eval). Every emitted run is checked
/// with validate_run. Stage cardinalities are logged via spdlog.
[[nodiscard]] PipelineResult run_pipeline(const PipelineConfig& config, const PipelineOptions& options = {});

/// Writes <stage>.run and, when evaluated, <stage>.metrics.tsv and
/// <stage>.metrics.json into `dir` (created if needed).
void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& dir);

}  // namespace clir
