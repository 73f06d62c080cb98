// clir: command-line front end for indexing, retrieval, fusion, reranking,
// evaluation and full pipelines.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 usage/config error, 3 data error,
// 4 scorer error, 5 I/O error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "clir/analysis.hpp"
#include "clir/eval.hpp"
#include "clir/fusion.hpp"
#include "clir/index.hpp"
#include "clir/pipeline.hpp"
#include "clir/rerank.hpp"
#include "clir/retrieval.hpp"
#include "clir/trecio.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUnexpected = 1, kConfig = 2, kData = 3, kScorer = 4, kIo = 5 };

int exit_code_for(clir::ErrorKind kind) {
    switch (kind) {
        case clir::ErrorKind::contract:
        case clir::ErrorKind::config: return kConfig;
        case clir::ErrorKind::data: return kData;
        case clir::ErrorKind::scorer: return kScorer;
        case clir::ErrorKind::io: return kIo;
    }
    return kUnexpected;
}

template <typename T>
T parse_tag(const std::optional<T>& parsed, const std::string& flag, const std::string& value) {
    if (!parsed) throw clir::ConfigError(flag + ": invalid value '" + value + "'");
    return *parsed;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw clir::IoError("cannot open for writing: " + path);
    out << text;
    if (!out.flush()) throw clir::IoError("write failed: " + path);
}

std::vector<clir::MetricSpec> parse_metrics(const std::vector<std::string>& names) {
    if (names.empty()) return clir::default_metrics();
    std::vector<clir::MetricSpec> specs;
    for (const auto& n : names) {
        auto m = clir::parse_metric(n);
        if (!m) throw clir::ConfigError("--metric: unknown metric '" + n + "'");
        specs.push_back(*m);
    }
    return specs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clir - cross-lingual multi-stage retrieval toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    unsigned workers = 1;
    long seed = 0;
    std::string log_level = "info";
    app.add_option("--workers", workers, "Worker threads for index build and per-topic search")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Reserved; every stage is deterministic without it");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

    // index
    std::string corpus_path, lang_code = "en", index_path;
    auto* index_cmd = app.add_subcommand("index", "Build an inverted index from a JSONL corpus");
    index_cmd->add_option("--corpus", corpus_path, "Corpus JSONL")->required();
    index_cmd->add_option("--lang", lang_code, "Corpus language (fa, ru, zh, en)")->required();
    index_cmd->add_option("--index", index_path, "Index file to write")->required();

    // search
    std::string topics_path, fields_mode = "title_and_description", query_lang = "en", translator = "original";
    std::string run_out, run_tag;
    long depth = 1000;
    double k1 = 0.9, b = 0.4;
    auto* search_cmd = app.add_subcommand("search", "BM25 first-stage retrieval for every topic");
    search_cmd->add_option("--index", index_path, "Index file")->required();
    search_cmd->add_option("--topics", topics_path, "Topics JSONL")->required();
    search_cmd->add_option("--fields", fields_mode, "title, description or title_and_description");
    search_cmd->add_option("--query-lang", query_lang, "Topic variant language");
    search_cmd->add_option("--translator", translator, "Topic variant translator");
    search_cmd->add_option("--depth", depth, "Documents per topic")->check(CLI::PositiveNumber);
    search_cmd->add_option("--k1", k1, "BM25 k1");
    search_cmd->add_option("--b", b, "BM25 b");
    search_cmd->add_option("--tag", run_tag, "Run tag");
    search_cmd->add_option("--out", run_out, "Output run file (default stdout)");

    // fuse
    std::vector<std::string> run_paths;
    double rrf_k = 60.0;
    auto* fuse_cmd = app.add_subcommand("fuse", "Reciprocal rank fusion of two or more runs");
    fuse_cmd->add_option("--run", run_paths, "Input run (repeat)")->required();
    fuse_cmd->add_option("--k", rrf_k, "RRF rank offset");
    fuse_cmd->add_option("--depth", depth, "Per-run rank cutoff and output depth")->check(CLI::PositiveNumber);
    fuse_cmd->add_option("--tag", run_tag, "Run tag");
    fuse_cmd->add_option("--out", run_out, "Output run file (default stdout)");

    // rerank
    std::string run_in, scorer_kind = "lexical", endpoint;
    long rerank_depth = 100, batch_size = 32, timeout_ms = 30000, retries = 3, concurrency = 1;
    auto* rerank_cmd = app.add_subcommand("rerank", "Rerank the head of a run with a scorer");
    rerank_cmd->add_option("--run", run_in, "Input run")->required();
    rerank_cmd->add_option("--topics", topics_path, "Topics JSONL")->required();
    rerank_cmd->add_option("--corpus", corpus_path, "Corpus JSONL")->required();
    rerank_cmd->add_option("--lang", lang_code, "Corpus language (lexical scorer analyzer)");
    rerank_cmd->add_option("--fields", fields_mode, "Query fields for the reranker");
    rerank_cmd->add_option("--query-lang", query_lang, "Query variant language");
    rerank_cmd->add_option("--translator", translator, "Query variant translator");
    rerank_cmd->add_option("--depth", rerank_depth, "Candidates reranked per topic")->check(CLI::PositiveNumber);
    rerank_cmd->add_option("--batch-size", batch_size, "Pairs per scorer request")->check(CLI::PositiveNumber);
    rerank_cmd->add_option("--scorer", scorer_kind, "lexical or remote")->check(CLI::IsMember({"lexical", "remote"}));
    rerank_cmd->add_option("--endpoint", endpoint, "Remote scorer base URL (or CLIR_SCORER_ENDPOINT)");
    rerank_cmd->add_option("--timeout-ms", timeout_ms, "Per-batch timeout")->check(CLI::PositiveNumber);
    rerank_cmd->add_option("--retries", retries, "Retries per batch")->check(CLI::NonNegativeNumber);
    rerank_cmd->add_option("--concurrency", concurrency, "Batches in flight")->check(CLI::PositiveNumber);
    rerank_cmd->add_option("--tag", run_tag, "Run tag");
    rerank_cmd->add_option("--out", run_out, "Output run file (default stdout)");

    // eval
    std::string qrels_path, tsv_out, json_out;
    std::vector<std::string> metric_names;
    double rbp_p = 0.8;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a run against qrels");
    eval_cmd->add_option("--run", run_in, "Run file")->required();
    eval_cmd->add_option("--qrels", qrels_path, "Qrels file")->required();
    eval_cmd->add_option("--metric", metric_names, "ndcg@K, map, rbp, r@K (repeat; default suite otherwise)");
    eval_cmd->add_option("--rbp-p", rbp_p, "RBP persistence");
    eval_cmd->add_option("--tsv", tsv_out, "Per-topic table (default stdout)");
    eval_cmd->add_option("--json", json_out, "JSON summary file");

    // select-translator
    std::vector<std::string> candidates;
    auto* select_cmd = app.add_subcommand("select-translator", "Pick the best query translator from its runs");
    select_cmd->add_option("--qrels", qrels_path, "Qrels file")->required();
    select_cmd->add_option("--candidate", candidates, "translator=run_path (repeat)")->required();
    select_cmd->add_option("--metric", metric_names, "Columns of the comparison table");
    select_cmd->add_option("--rbp-p", rbp_p, "RBP persistence");

    // pipeline
    std::string config_path, output_dir;
    std::vector<std::string> overrides;
    auto* pipeline_cmd = app.add_subcommand("pipeline", "Run a configured first stage -> rerank -> eval job");
    pipeline_cmd->add_option("--config", config_path, "Pipeline JSON config")->required();
    pipeline_cmd->add_option("--output", output_dir, "Output directory (overrides output.dir)");
    pipeline_cmd->add_option("--set", overrides, "Override a scalar config field: key.path=value (repeat)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    auto logger = spdlog::stderr_color_mt("clir");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(log_level));
    spdlog::set_pattern("[%l] %v");

    try {
        if (*index_cmd) {
            const auto lang = parse_tag(clir::parse_lang(lang_code), "--lang", lang_code);
            const auto docs = clir::read_corpus(std::filesystem::path(corpus_path));
            const auto index = clir::build_index(docs, clir::Analyzer{lang, true}, workers);
            clir::save_index(index, index_path);
            const auto s = index.stats();
            spdlog::info("indexed {} documents, avgdl {}, vocabulary {}", s.num_docs, s.avgdl, s.vocabulary);
        } else if (*search_cmd) {
            const auto index = clir::load_index(index_path);
            const auto topics = clir::read_topics(std::filesystem::path(topics_path));
            clir::Bm25RunSpec spec;
            spec.params = {k1, b};
            clir::check(spec.params);
            spec.fields = parse_tag(clir::parse_query_fields(fields_mode), "--fields", fields_mode);
            spec.query_lang = parse_tag(clir::parse_lang(query_lang), "--query-lang", query_lang);
            spec.translator = parse_tag(clir::parse_translator(translator), "--translator", translator);
            spec.depth = depth;
            spec.run_tag = run_tag;
            const auto run = clir::retrieve(index, topics, spec, workers);
            spdlog::info("search: {} topics, {} entries", run.topics.size(), run.entry_count());
            if (run_out.empty()) {
                clir::write_run(std::cout, run);
            } else {
                clir::write_run(std::filesystem::path(run_out), run);
            }
        } else if (*fuse_cmd) {
            std::vector<clir::Run> runs;
            for (const auto& p : run_paths) runs.push_back(clir::read_run(std::filesystem::path(p)));
            const auto fused = clir::rrf_fuse(runs, clir::RrfParams{rrf_k, depth}, run_tag.empty() ? "rrf" : run_tag);
            spdlog::info("fuse: {} inputs -> {} topics, {} entries", runs.size(), fused.topics.size(),
                         fused.entry_count());
            if (run_out.empty()) {
                clir::write_run(std::cout, fused);
            } else {
                clir::write_run(std::filesystem::path(run_out), fused);
            }
        } else if (*rerank_cmd) {
            const auto run = clir::read_run(std::filesystem::path(run_in));
            const auto topics = clir::read_topics(std::filesystem::path(topics_path));
            const auto lang = parse_tag(clir::parse_lang(lang_code), "--lang", lang_code);
            const clir::DocumentStore store(clir::read_corpus(std::filesystem::path(corpus_path)));
            clir::RerankConfig config;
            config.fields = parse_tag(clir::parse_query_fields(fields_mode), "--fields", fields_mode);
            config.query_lang = parse_tag(clir::parse_lang(query_lang), "--query-lang", query_lang);
            config.query_translator = parse_tag(clir::parse_translator(translator), "--translator", translator);
            config.depth = rerank_depth;
            config.batch_size = static_cast<std::size_t>(batch_size);
            config.run_tag = run_tag;

            clir::Run reranked;
            if (scorer_kind == "remote") {
                if (const char* env = std::getenv("CLIR_SCORER_ENDPOINT"); env != nullptr && *env != '\0') {
                    endpoint = env;
                }
                if (endpoint.empty()) throw clir::ConfigError("--endpoint (or CLIR_SCORER_ENDPOINT) is required");
                clir::RemoteOptions opts;
                opts.batch_size = config.batch_size;
                opts.timeout = std::chrono::milliseconds(timeout_ms);
                opts.retry.max_retries = static_cast<int>(retries);
                opts.max_in_flight = static_cast<unsigned>(concurrency);
                clir::RemoteScorer scorer(endpoint, opts);
                reranked = clir::rerank(run, topics, store, scorer, config);
            } else {
                clir::LexicalScorer scorer(clir::Analyzer{lang, true});
                reranked = clir::rerank(run, topics, store, scorer, config);
            }
            spdlog::info("rerank: {} topics, {} entries", reranked.topics.size(), reranked.entry_count());
            if (run_out.empty()) {
                clir::write_run(std::cout, reranked);
            } else {
                clir::write_run(std::filesystem::path(run_out), reranked);
            }
        } else if (*eval_cmd) {
            const auto run = clir::read_run(std::filesystem::path(run_in));
            const auto qrels = clir::read_qrels(std::filesystem::path(qrels_path));
            const auto report = clir::evaluate(run, qrels, parse_metrics(metric_names), clir::RbpParams{rbp_p});
            write_text(tsv_out, clir::format_report_tsv(report));
            if (!json_out.empty()) write_text(json_out, clir::format_report_json(report));
        } else if (*select_cmd) {
            const auto qrels = clir::read_qrels(std::filesystem::path(qrels_path));
            std::map<clir::TranslatorTag, clir::Run> runs;
            for (const auto& c : candidates) {
                const auto eq = c.find('=');
                if (eq == std::string::npos) throw clir::ConfigError("--candidate must be translator=path: " + c);
                const std::string name = c.substr(0, eq);
                const auto tag = parse_tag(clir::parse_translator(name), "--candidate", name);
                if (runs.count(tag) != 0) throw clir::ConfigError("--candidate: duplicate translator " + name);
                runs.emplace(tag, clir::read_run(std::filesystem::path(c.substr(eq + 1))));
            }
            const auto metrics = parse_metrics(metric_names);
            const auto winner = clir::select_translator(runs, qrels);
            const auto rows = clir::compare_translators(runs, qrels, metrics, clir::RbpParams{rbp_p});
            std::vector<std::string> names;
            for (const auto& m : metrics) names.push_back(m.name());
            std::cout << "selected\t" << clir::to_string(winner) << "\n";
            std::cout << clir::format_comparison_tsv(rows, names);
        } else if (*pipeline_cmd) {
            auto config = clir::load_pipeline_config(config_path, overrides);
            if (!output_dir.empty()) config.output_dir = output_dir;
            const auto result = clir::run_pipeline(config, clir::PipelineOptions{workers});
            clir::write_pipeline_outputs(result, config.output_dir);
            spdlog::info("pipeline {}: wrote {} stage(s) to {}", config.name, result.stages.size(),
                         config.output_dir.string());
        }
    } catch (const clir::Error& e) {
        spdlog::error("{}", e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        spdlog::error("unexpected failure: {}", e.what());
        return kUnexpected;
    }
    return kOk;
}
