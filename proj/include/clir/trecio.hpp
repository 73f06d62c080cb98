#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "clir/model.hpp"

namespace clir {

// Readers take a `source` name used only in error messages ("file:line: ...").
// Path overloads throw IoError when the file cannot be opened.

/// Newline-delimited JSON, one {"id","title","text","lang"} object per line.
/// Blank lines are not allowed. Duplicate ids are left to build_index.
void read_corpus(std::istream& in, const std::string& source, const std::function<void(Document&&)>& sink);
[[nodiscard]] std::vector<Document> read_corpus(std::istream& in, const std::string& source);
[[nodiscard]] std::vector<Document> read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const Document> docs);
void write_corpus(const std::filesystem::path& path, std::span<const Document> docs);

/// Newline-delimited JSON:
/// {"topic_id":..., "variants":[{"lang","translator","title","description"}, ...]}
[[nodiscard]] std::vector<Topic> read_topics(std::istream& in, const std::string& source);
[[nodiscard]] std::vector<Topic> read_topics(const std::filesystem::path& path);
void write_topics(std::ostream& out, std::span<const Topic> topics);
void write_topics(const std::filesystem::path& path, std::span<const Topic> topics);

/// TREC run: "topic_id Q0 doc_id rank score tag" per line, any line order.
/// Lines are regrouped by topic and sorted by rank, then validated.
[[nodiscard]] Run read_run(std::istream& in, const std::string& source);
[[nodiscard]] Run read_run(const std::filesystem::path& path);
/// Topics ascending, ranks ascending, scores with exactly six decimals.
void write_run(std::ostream& out, const Run& run);
void write_run(const std::filesystem::path& path, const Run& run);

/// TREC qrels: "topic_id iteration doc_id grade". Grades must be integers >= 0;
/// a repeated (topic, doc) pair is an error.
[[nodiscard]] Qrels read_qrels(std::istream& in, const std::string& source);
[[nodiscard]] Qrels read_qrels(const std::filesystem::path& path);
void write_qrels(std::ostream& out, const Qrels& qrels);

/// Formats a score the way write_run does ("%.6f").
[[nodiscard]] std::string format_score(double score);

}  // namespace clir
