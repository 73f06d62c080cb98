#include "clir/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "clir/fusion.hpp"
#include "clir/index.hpp"
#include "clir/trecio.hpp"
#include "json.hpp"

namespace clir {

using nlohmann::json;

namespace {

// Path-aware accessor over a JSON object. Every error names its JSON path.
class Node {
  public:
    Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }
    [[nodiscard]] const json& raw() const noexcept { return value_; }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_ + ": " + msg); }

    void require_object(std::initializer_list<std::string_view> allowed) const {
        if (!value_.is_object()) fail("expected an object");
        for (const auto& [key, _] : value_.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                Node(value_[key], path_ + "." + key).fail("unknown key");
            }
        }
    }

    [[nodiscard]] bool has(const char* key) const { return value_.contains(key); }

    [[nodiscard]] Node at(const char* key) const {
        if (!value_.contains(key)) Node(value_, path_ + "." + key).fail("required key is missing");
        return {value_[key], path_ + "." + key};
    }

    [[nodiscard]] std::string str() const {
        if (!value_.is_string()) fail("expected a string");
        return value_.get<std::string>();
    }

    [[nodiscard]] double number() const {
        if (!value_.is_number()) fail("expected a number");
        return value_.get<double>();
    }

    [[nodiscard]] long integer() const {
        if (!value_.is_number_integer()) fail("expected an integer");
        return value_.get<long>();
    }

    [[nodiscard]] long positive() const {
        const long v = integer();
        if (v < 1) fail("must be >= 1");
        return v;
    }

    [[nodiscard]] LangTag lang() const {
        auto v = parse_lang(str());
        if (!v) fail("unknown language '" + str() + "' (expected fa, ru, zh or en)");
        return *v;
    }

    [[nodiscard]] TranslatorTag translator() const {
        auto v = parse_translator(str());
        if (!v) fail("unknown translator '" + str() + "'");
        return *v;
    }

    [[nodiscard]] QueryFields fields() const {
        auto v = parse_query_fields(str());
        if (!v) fail("unknown query fields '" + str() + "' (expected title, description or title_and_description)");
        return *v;
    }

    [[nodiscard]] std::filesystem::path existing_path(const std::filesystem::path& base) const {
        std::filesystem::path p = str();
        if (p.is_relative()) p = base / p;
        if (!std::filesystem::exists(p)) fail("file not found: " + p.string());
        return p;
    }

  private:
    const json& value_;
    std::string path_;
};

Bm25RunSpec parse_bm25(const Node& n) {
    n.require_object({"k1", "b", "fields", "query_lang", "translator", "depth", "run_tag"});
    Bm25RunSpec spec;
    if (n.has("k1")) {
        spec.params.k1 = n.at("k1").number();
        if (!(spec.params.k1 > 0.0)) n.at("k1").fail("must be > 0");
    }
    if (n.has("b")) {
        spec.params.b = n.at("b").number();
        if (!(spec.params.b >= 0.0 && spec.params.b <= 1.0)) n.at("b").fail("must be in [0, 1]");
    }
    if (n.has("fields")) spec.fields = n.at("fields").fields();
    spec.query_lang = n.at("query_lang").lang();
    spec.translator = n.at("translator").translator();
    if (n.has("depth")) spec.depth = n.at("depth").positive();
    if (n.has("run_tag")) spec.run_tag = n.at("run_tag").str();
    return spec;
}

FirstStage parse_first_stage(const Node& n, const std::filesystem::path& base) {
    if (n.raw().is_string()) return ExternalRunStage{n.existing_path(base)};
    n.require_object({"bm25", "external_run", "rrf"});
    if (n.raw().size() != 1) n.fail("exactly one of bm25, external_run or rrf is required");
    if (n.has("bm25")) return Bm25Stage{parse_bm25(n.at("bm25"))};
    if (n.has("external_run")) {
        const Node ext = n.at("external_run");
        ext.require_object({"path"});
        return ExternalRunStage{ext.at("path").existing_path(base)};
    }
    const Node rrf = n.at("rrf");
    rrf.require_object({"inputs", "k", "depth"});
    auto stage = std::make_shared<RrfStage>();
    const Node inputs = rrf.at("inputs");
    if (!inputs.raw().is_array()) inputs.fail("expected an array");
    if (inputs.raw().size() < 2) inputs.fail("rrf needs at least two inputs");
    for (std::size_t i = 0; i < inputs.raw().size(); ++i) {
        stage->inputs.push_back(
            parse_first_stage(Node(inputs.raw()[i], inputs.path() + "[" + std::to_string(i) + "]"), base));
    }
    if (rrf.has("k")) {
        stage->params.k = rrf.at("k").number();
        if (!(stage->params.k > 0.0)) rrf.at("k").fail("must be > 0");
    }
    if (rrf.has("depth")) stage->params.depth = rrf.at("depth").positive();
    return stage;
}

RerankStage parse_rerank(const Node& n) {
    n.require_object({"fields", "query_lang", "query_translator", "depth", "batch_size", "run_tag", "scorer",
                      "on_failure"});
    RerankStage stage;
    auto& c = stage.config;
    if (n.has("fields")) c.fields = n.at("fields").fields();
    c.query_lang = n.at("query_lang").lang();
    c.query_translator = n.at("query_translator").translator();
    if (n.has("depth")) c.depth = n.at("depth").positive();
    if (n.has("batch_size")) c.batch_size = static_cast<std::size_t>(n.at("batch_size").positive());
    if (n.has("run_tag")) c.run_tag = n.at("run_tag").str();

    if (n.has("scorer")) {
        const Node s = n.at("scorer");
        if (s.raw().is_string()) {
            if (s.str() != "lexical") s.fail("string scorer must be \"lexical\"; use {\"remote\": {...}}");
            stage.scorer = LexicalScorerSpec{};
        } else {
            s.require_object({"lexical", "remote"});
            if (s.raw().size() != 1) s.fail("exactly one of lexical or remote is required");
            if (s.has("lexical")) {
                s.at("lexical").require_object({});
                stage.scorer = LexicalScorerSpec{};
            } else {
                const Node r = s.at("remote");
                r.require_object({"endpoint", "timeout_ms", "retries", "concurrency", "initial_backoff_ms"});
                RemoteScorerSpec spec;
                spec.endpoint = r.at("endpoint").str();
                if (spec.endpoint.rfind("http://", 0) != 0) r.at("endpoint").fail("must start with http://");
                if (r.has("timeout_ms")) spec.options.timeout = std::chrono::milliseconds(r.at("timeout_ms").positive());
                if (r.has("retries")) {
                    const long retries = r.at("retries").integer();
                    if (retries < 0) r.at("retries").fail("must be >= 0");
                    spec.options.retry.max_retries = static_cast<int>(retries);
                }
                if (r.has("initial_backoff_ms")) {
                    spec.options.retry.initial_backoff =
                        std::chrono::milliseconds(r.at("initial_backoff_ms").positive());
                }
                if (r.has("concurrency")) {
                    spec.options.max_in_flight = static_cast<unsigned>(r.at("concurrency").positive());
                }
                spec.options.batch_size = c.batch_size;
                stage.scorer = spec;
            }
        }
    }
    if (n.has("on_failure")) {
        const std::string mode = n.at("on_failure").str();
        if (mode == "abort") {
            stage.on_failure = ScorerFallback::abort;
        } else if (mode == "lexical") {
            stage.on_failure = ScorerFallback::lexical;
        } else {
            n.at("on_failure").fail("expected \"abort\" or \"lexical\"");
        }
    }
    return stage;
}

EvalStage parse_eval(const Node& n) {
    n.require_object({"metrics", "rbp_p"});
    EvalStage stage;
    if (n.has("metrics")) {
        const Node m = n.at("metrics");
        if (!m.raw().is_array() || m.raw().empty()) m.fail("expected a non-empty array of metric names");
        stage.metrics.clear();
        for (std::size_t i = 0; i < m.raw().size(); ++i) {
            const Node item(m.raw()[i], m.path() + "[" + std::to_string(i) + "]");
            auto spec = parse_metric(item.str());
            if (!spec) item.fail("unknown metric '" + item.str() + "' (ndcg@K, map, rbp, r@K)");
            stage.metrics.push_back(*spec);
        }
    }
    if (n.has("rbp_p")) {
        stage.rbp.p = n.at("rbp_p").number();
        if (!(stage.rbp.p > 0.0 && stage.rbp.p < 1.0)) n.at("rbp_p").fail("must be in (0, 1)");
    }
    return stage;
}

void log_run(const std::string& stage, const Run& run) {
    spdlog::info("stage {}: run '{}' with {} topics, {} entries", stage, run.run_tag, run.topics.size(),
                 run.entry_count());
}

struct Context {
    const PipelineConfig& config;
    const PipelineOptions& options;
    std::vector<Topic> topics;
    std::optional<Index> index;
    std::vector<StageOutput>& stages;
};

bool needs_index(const FirstStage& stage) {
    if (std::holds_alternative<Bm25Stage>(stage)) return true;
    if (const auto* rrf = std::get_if<std::shared_ptr<RrfStage>>(&stage)) {
        for (const auto& in : (*rrf)->inputs) {
            if (needs_index(in)) return true;
        }
    }
    return false;
}

Run execute_first_stage(Context& ctx, const FirstStage& stage, const std::string& name) {
    Run run;
    if (const auto* bm25 = std::get_if<Bm25Stage>(&stage)) {
        run = retrieve(*ctx.index, ctx.topics, bm25->spec, ctx.options.workers);
    } else if (const auto* ext = std::get_if<ExternalRunStage>(&stage)) {
        run = read_run(ext->path);
        spdlog::info("stage {}: ingested external run {}", name, ext->path.string());
    } else {
        const auto& rrf = *std::get<std::shared_ptr<RrfStage>>(stage);
        std::vector<Run> inputs;
        for (std::size_t i = 0; i < rrf.inputs.size(); ++i) {
            const std::string input_name = name + ".in" + std::to_string(i + 1);
            inputs.push_back(execute_first_stage(ctx, rrf.inputs[i], input_name));
            ctx.stages.push_back({input_name, inputs.back(), std::nullopt});
        }
        std::string tag = "rrf";
        for (const auto& in : inputs) tag += "+" + in.run_tag;
        run = rrf_fuse(inputs, rrf.params, tag);
    }
    require_valid(run, "stage " + name);
    log_run(name, run);
    return run;
}

}  // namespace

std::optional<long> first_stage_depth(const FirstStage& stage) {
    if (const auto* bm25 = std::get_if<Bm25Stage>(&stage)) return bm25->spec.depth;
    if (const auto* rrf = std::get_if<std::shared_ptr<RrfStage>>(&stage)) return (*rrf)->params.depth;
    return std::nullopt;
}

PipelineConfig parse_pipeline_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("$: malformed JSON: ") + e.what());
    }
    const Node root(doc, "$");
    root.require_object({"name", "corpus", "topics", "qrels", "index", "first_stage", "rerank", "eval", "output"});

    PipelineConfig config;
    if (root.has("name")) config.name = root.at("name").str();
    const Node corpus = root.at("corpus");
    corpus.require_object({"path", "lang"});
    config.corpus = corpus.at("path").existing_path(base_dir);
    config.corpus_lang = corpus.at("lang").lang();
    config.topics = root.at("topics").existing_path(base_dir);
    if (root.has("qrels")) config.qrels = root.at("qrels").existing_path(base_dir);
    if (root.has("index")) config.index = root.at("index").existing_path(base_dir);
    config.first_stage = parse_first_stage(root.at("first_stage"), base_dir);
    if (root.has("rerank")) {
        config.rerank = parse_rerank(root.at("rerank"));
        if (auto depth = first_stage_depth(config.first_stage); depth && config.rerank->config.depth > *depth) {
            root.at("rerank").at("depth").fail("must be <= first-stage depth (" + std::to_string(*depth) + ")");
        }
    }
    if (root.has("eval")) {
        config.eval = parse_eval(root.at("eval"));
        if (!config.qrels) root.at("eval").fail("evaluation requires a top-level \"qrels\" path");
    }
    if (root.has("output")) {
        const Node out = root.at("output");
        out.require_object({"dir"});
        std::filesystem::path dir = out.at("dir").str();
        config.output_dir = dir.is_relative() ? base_dir / dir : dir;
    } else {
        config.output_dir = base_dir / "out";
    }
    return config;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();

    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": malformed JSON: " + e.what());
    }

    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' must look like key.path=value");
        std::string pointer;
        std::stringstream keys(o.substr(0, eq));
        for (std::string key; std::getline(keys, key, '.');) pointer += "/" + key;
        const std::string text = o.substr(eq + 1);
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded()) value = text;
        if (!value.is_primitive()) throw ConfigError("override '" + o + "': only scalar values may be overridden");
        try {
            const json::json_pointer ptr(pointer);
            if (doc.contains(ptr) && doc.at(ptr).is_structured()) {
                throw ConfigError("override '" + o + "': target is not a scalar field");
            }
            doc[ptr] = value;
        } catch (const json::exception& e) {
            throw ConfigError("override '" + o + "': " + e.what());
        }
    }

    if (const char* endpoint = std::getenv("CLIR_SCORER_ENDPOINT"); endpoint != nullptr && *endpoint != '\0') {
        const json::json_pointer ptr("/rerank/scorer/remote/endpoint");
        if (doc.contains(json::json_pointer("/rerank/scorer/remote"))) doc[ptr] = endpoint;
    }

    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return parse_pipeline_config(doc.dump(), base);
}

PipelineResult run_pipeline(const PipelineConfig& config, const PipelineOptions& options) {
    PipelineResult result;
    Context ctx{config, options, read_topics(config.topics), std::nullopt, result.stages};
    spdlog::info("pipeline {}: {} topics from {}", config.name, ctx.topics.size(), config.topics.string());

    std::vector<Document> corpus;
    const bool index_needed = needs_index(config.first_stage);
    if (config.rerank || (index_needed && !config.index)) {
        corpus = read_corpus(config.corpus);
        spdlog::info("pipeline {}: {} documents from {}", config.name, corpus.size(), config.corpus.string());
    }
    if (index_needed) {
        if (config.index) {
            ctx.index = load_index(*config.index);
            if (ctx.index->analyzer().lang != config.corpus_lang) {
                throw ConfigError("$.index: index language " + std::string(to_string(ctx.index->analyzer().lang)) +
                                  " does not match corpus language " + std::string(to_string(config.corpus_lang)));
            }
        } else {
            ctx.index = build_index(corpus, Analyzer{config.corpus_lang, true}, options.workers);
        }
        const auto s = ctx.index->stats();
        spdlog::info("index: N={} avgdl={} vocabulary={}", s.num_docs, s.avgdl, s.vocabulary);
    }

    Run first = execute_first_stage(ctx, config.first_stage, "first_stage");
    result.stages.push_back({"first_stage", first, std::nullopt});

    if (config.rerank) {
        const auto& stage = *config.rerank;
        const DocumentStore store(std::move(corpus));
        LexicalScorer lexical(Analyzer{config.corpus_lang, true});
        Run reranked;
        if (const auto* remote = std::get_if<RemoteScorerSpec>(&stage.scorer)) {
            RemoteScorer scorer(remote->endpoint, remote->options);
            try {
                reranked = rerank(first, ctx.topics, store, scorer, stage.config);
            } catch (const ScorerError& e) {
                if (stage.on_failure != ScorerFallback::lexical) throw;
                spdlog::warn("remote scorer failed ({}); falling back to the lexical scorer", e.what());
                reranked = rerank(first, ctx.topics, store, lexical, stage.config);
            }
        } else {
            reranked = rerank(first, ctx.topics, store, lexical, stage.config);
        }
        require_valid(reranked, "stage rerank");
        log_run("rerank", reranked);
        result.stages.push_back({"rerank", std::move(reranked), std::nullopt});
    }

    if (config.eval) {
        const Qrels qrels = read_qrels(*config.qrels);
        for (auto& stage : result.stages) {
            if (stage.name != "first_stage" && stage.name != "rerank") continue;
            stage.report = evaluate(stage.run, qrels, config.eval->metrics, config.eval->rbp);
            for (const auto& [metric, mean] : stage.report->means) {
                spdlog::info("eval {}: {} = {:.4f} over {} topics", stage.name, metric, mean,
                             stage.report->num_topics());
            }
        }
    }
    return result;
}

void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& stage : result.stages) {
        write_run(dir / (stage.name + ".run"), stage.run);
        if (!stage.report) continue;
        auto write_text = [&](const std::filesystem::path& p, const std::string& text) {
            std::ofstream out(p, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot open for writing: " + p.string());
            out << text;
            if (!out.flush()) throw IoError("write failed: " + p.string());
        };
        write_text(dir / (stage.name + ".metrics.tsv"), format_report_tsv(*stage.report));
        write_text(dir / (stage.name + ".metrics.json"), format_report_json(*stage.report));
    }
}

}  // namespace clir
