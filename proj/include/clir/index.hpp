#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clir/analysis.hpp"
#include "clir/errors.hpp"
#include "clir/model.hpp"

namespace clir {

struct Posting {
    std::uint32_t doc = 0;  ///< document ordinal
    std::uint32_t tf = 0;

    bool operator==(const Posting&) const = default;
};

struct DocInfo {
    std::string doc_id;
    std::uint32_t length = 0;  ///< in tokens

    bool operator==(const DocInfo&) const = default;
};

struct IndexStats {
    std::size_t num_docs = 0;
    double avgdl = 0.0;
    std::size_t vocabulary = 0;
};

/// Index file is truncated, corrupt or internally inconsistent.
class IndexFormatError : public DataError {
  public:
    explicit IndexFormatError(const std::string& what) : DataError(what) {}
};

/// Index file has the wrong magic string or an unsupported version.
class IndexVersionError : public DataError {
  public:
    explicit IndexVersionError(const std::string& what) : DataError(what) {}
};

/// Immutable single-segment inverted index.
///
/// Document ordinals follow ascending doc_id, so two builds over the same
/// document set are identical regardless of input order.
class Index {
  public:
    static constexpr std::string_view kMagic = "CLIRIDX";
    static constexpr std::uint32_t kVersion = 1;

    Index() = default;

    [[nodiscard]] const Analyzer& analyzer() const noexcept { return analyzer_; }
    [[nodiscard]] std::size_t num_docs() const noexcept { return docs_.size(); }
    [[nodiscard]] double avgdl() const noexcept { return avgdl_; }
    [[nodiscard]] std::size_t vocabulary_size() const noexcept { return terms_.size(); }
    [[nodiscard]] IndexStats stats() const noexcept { return {num_docs(), avgdl_, vocabulary_size()}; }

    [[nodiscard]] const std::vector<DocInfo>& doc_table() const noexcept { return docs_; }
    [[nodiscard]] const DocInfo& doc(std::uint32_t ordinal) const { return docs_.at(ordinal); }

    /// Terms in ascending byte order, parallel to postings(i).
    [[nodiscard]] const std::vector<std::string>& terms() const noexcept { return terms_; }
    [[nodiscard]] std::span<const Posting> postings_at(std::size_t term_index) const {
        return postings_.at(term_index);
    }
    /// Empty span for unknown terms.
    [[nodiscard]] std::span<const Posting> postings(std::string_view term) const;
    [[nodiscard]] std::size_t df(std::string_view term) const { return postings(term).size(); }

    friend Index build_index(std::span<const Document> corpus, const Analyzer& analyzer, unsigned workers);
    friend Index load_index(const std::filesystem::path& path);
    friend void save_index(const Index& index, const std::filesystem::path& path);

    bool operator==(const Index& other) const {
        return analyzer_.lang == other.analyzer_.lang && analyzer_.lowercase == other.analyzer_.lowercase &&
               avgdl_ == other.avgdl_ && docs_ == other.docs_ && terms_ == other.terms_ &&
               postings_ == other.postings_;
    }

  private:
    void rebuild_lookup();

    Analyzer analyzer_;
    double avgdl_ = 0.0;
    std::vector<DocInfo> docs_;
    std::vector<std::string> terms_;
    std::vector<std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::uint32_t> lookup_;
};

/// Builds an index over title + ' ' + body of each document. Tokenization is
/// sharded across `workers` threads; the merge is deterministic.
/// Throws DataError on duplicate or empty doc_id.
[[nodiscard]] Index build_index(std::span<const Document> corpus, const Analyzer& analyzer, unsigned workers = 1);

void save_index(const Index& index, const std::filesystem::path& path);
[[nodiscard]] Index load_index(const std::filesystem::path& path);

[[nodiscard]] inline IndexStats stats(const Index& index) noexcept { return index.stats(); }

}  // namespace clir
