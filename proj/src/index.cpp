#include "clir/index.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace clir {

namespace {

struct TermCounts {
    std::vector<std::pair<std::string, std::uint32_t>> counts;  // sorted by term
    std::uint32_t length = 0;
};

TermCounts count_terms(const Analyzer& analyzer, const Document& doc) {
    auto tokens = analyzer.tokenize(doc.indexed_text());
    TermCounts tc;
    tc.length = static_cast<std::uint32_t>(tokens.size());
    std::sort(tokens.begin(), tokens.end());
    for (auto& t : tokens) {
        if (!tc.counts.empty() && tc.counts.back().first == t) {
            ++tc.counts.back().second;
        } else {
            tc.counts.emplace_back(std::move(t), 1);
        }
    }
    return tc;
}

// ---- little-endian binary helpers ----

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_bytes(std::string& out, std::string_view s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

class Reader {
  public:
    Reader(std::string_view data, std::string path) : data_(data), path_(std::move(path)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::string bytes() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(data_.substr(pos_, n));
        pos_ += n;
        return s;
    }

    [[nodiscard]] bool at_end() const noexcept { return pos_ == data_.size(); }

  private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw IndexFormatError(path_ + ": truncated index file");
    }

    std::string_view data_;
    std::size_t pos_ = 0;
    std::string path_;
};

double mean_length(const std::vector<DocInfo>& docs) {
    if (docs.empty()) return 0.0;
    // Integer accumulation is exact, so avgdl is reproducible bit for bit.
    std::uint64_t total = 0;
    for (const auto& d : docs) total += d.length;
    return static_cast<double>(total) / static_cast<double>(docs.size());
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

}  // namespace

std::span<const Posting> Index::postings(std::string_view term) const {
    auto it = lookup_.find(std::string(term));
    if (it == lookup_.end()) return {};
    return postings_[it->second];
}

void Index::rebuild_lookup() {
    lookup_.clear();
    lookup_.reserve(terms_.size());
    for (std::uint32_t i = 0; i < terms_.size(); ++i) lookup_.emplace(terms_[i], i);
}

Index build_index(std::span<const Document> corpus, const Analyzer& analyzer, unsigned workers) {
    std::vector<const Document*> order;
    order.reserve(corpus.size());
    for (const auto& d : corpus) {
        if (d.doc_id.empty()) throw DataError("document with empty doc_id");
        if (d.lang != analyzer.lang) {
            throw DataError("document " + d.doc_id + " has lang " + std::string(to_string(d.lang)) +
                            " but the analyzer is " + std::string(to_string(analyzer.lang)));
        }
        order.push_back(&d);
    }
    std::sort(order.begin(), order.end(), [](const Document* a, const Document* b) { return a->doc_id < b->doc_id; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i]->doc_id == order[i - 1]->doc_id) throw DataError("duplicate doc_id: " + order[i]->doc_id);
    }

    std::vector<TermCounts> per_doc(order.size());
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, order.size()))));
    if (workers == 1) {
        for (std::size_t i = 0; i < order.size(); ++i) per_doc[i] = count_terms(analyzer, *order[i]);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (order.size() + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(order.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                for (std::size_t i = begin; i < end; ++i) per_doc[i] = count_terms(analyzer, *order[i]);
            });
        }
    }

    Index index;
    index.analyzer_ = analyzer;
    index.docs_.reserve(order.size());
    std::unordered_map<std::string, std::uint32_t> term_ids;
    std::vector<std::vector<Posting>> postings;
    std::vector<std::string> terms;
    for (std::uint32_t ordinal = 0; ordinal < order.size(); ++ordinal) {
        index.docs_.push_back({order[ordinal]->doc_id, per_doc[ordinal].length});
        for (auto& [term, tf] : per_doc[ordinal].counts) {
            auto [it, inserted] = term_ids.try_emplace(term, static_cast<std::uint32_t>(terms.size()));
            if (inserted) {
                terms.push_back(term);
                postings.emplace_back();
            }
            postings[it->second].push_back({ordinal, tf});
        }
    }

    std::vector<std::uint32_t> by_term(terms.size());
    std::iota(by_term.begin(), by_term.end(), 0u);
    std::sort(by_term.begin(), by_term.end(), [&](auto a, auto b) { return terms[a] < terms[b]; });
    index.terms_.reserve(terms.size());
    index.postings_.reserve(terms.size());
    for (auto id : by_term) {
        index.terms_.push_back(std::move(terms[id]));
        index.postings_.push_back(std::move(postings[id]));
    }
    index.avgdl_ = mean_length(index.docs_);
    index.rebuild_lookup();
    return index;
}

// File layout:
//   CLIRIDX <version>\n
//   lang=<code> lowercase=<0|1> N=<docs> avgdl=<shortest round-trip double> vocab=<terms>\n
//   doc table:  N x { u32 id_len, id bytes, u32 length }
//   lexicon:    vocab x { u32 term_len, term bytes, u32 df, df x { u32 ordinal, u32 tf } }
// All integers little-endian.
void save_index(const Index& index, const std::filesystem::path& path) {
    std::string out;
    out += std::string(Index::kMagic) + " " + std::to_string(Index::kVersion) + "\n";
    out += "lang=" + std::string(to_string(index.analyzer_.lang)) +
           " lowercase=" + (index.analyzer_.lowercase ? "1" : "0") + " N=" + std::to_string(index.num_docs()) +
           " avgdl=" + format_double(index.avgdl_) + " vocab=" + std::to_string(index.vocabulary_size()) + "\n";
    for (const auto& d : index.docs_) {
        put_bytes(out, d.doc_id);
        put_u32(out, d.length);
    }
    for (std::size_t t = 0; t < index.terms_.size(); ++t) {
        put_bytes(out, index.terms_[t]);
        put_u32(out, static_cast<std::uint32_t>(index.postings_[t].size()));
        for (const auto& p : index.postings_[t]) {
            put_u32(out, p.doc);
            put_u32(out, p.tf);
        }
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open index for writing: " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw IoError("failed writing index: " + path.string());
}

Index load_index(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open index: " + path.string());
    std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    const std::string where = path.string();

    const auto magic_end = data.find('\n');
    const std::string magic_line = data.substr(0, magic_end);
    const std::string expected_prefix = std::string(Index::kMagic) + " ";
    if (magic_line.rfind(expected_prefix, 0) != 0) throw IndexVersionError(where + ": not a CLIRIDX index file");
    {
        const std::string version = magic_line.substr(expected_prefix.size());
        std::uint32_t v = 0;
        auto [ptr, ec] = std::from_chars(version.data(), version.data() + version.size(), v);
        if (ec != std::errc{} || ptr != version.data() + version.size()) {
            throw IndexVersionError(where + ": malformed index version '" + version + "'");
        }
        if (v != Index::kVersion) {
            throw IndexVersionError(where + ": unsupported index version " + version + " (expected " +
                                    std::to_string(Index::kVersion) + ")");
        }
    }
    if (magic_end == std::string::npos) throw IndexFormatError(where + ": truncated index file");

    const auto header_end = data.find('\n', magic_end + 1);
    if (header_end == std::string::npos) throw IndexFormatError(where + ": truncated index file");
    std::istringstream header(data.substr(magic_end + 1, header_end - magic_end - 1));

    Index index;
    std::size_t num_docs = 0;
    std::size_t vocab = 0;
    double avgdl = 0.0;
    int fields_seen = 0;
    for (std::string field; header >> field;) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw IndexFormatError(where + ": malformed header field '" + field + "'");
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        auto parse_size = [&](std::size_t& dst) {
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), dst);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                throw IndexFormatError(where + ": bad header value for " + key);
            }
        };
        if (key == "lang") {
            auto lang = parse_lang(value);
            if (!lang) throw IndexFormatError(where + ": unknown index language '" + value + "'");
            index.analyzer_.lang = *lang;
        } else if (key == "lowercase") {
            index.analyzer_.lowercase = value == "1";
        } else if (key == "N") {
            parse_size(num_docs);
        } else if (key == "avgdl") {
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), avgdl);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                throw IndexFormatError(where + ": bad header value for avgdl");
            }
        } else if (key == "vocab") {
            parse_size(vocab);
        } else {
            throw IndexFormatError(where + ": unknown header field '" + key + "'");
        }
        ++fields_seen;
    }
    if (fields_seen != 5) throw IndexFormatError(where + ": incomplete index header");

    Reader in(std::string_view(data).substr(header_end + 1), where);
    index.docs_.reserve(num_docs);
    for (std::size_t i = 0; i < num_docs; ++i) {
        DocInfo d;
        d.doc_id = in.bytes();
        d.length = in.u32();
        if (d.doc_id.empty()) throw IndexFormatError(where + ": empty doc_id in doc table");
        if (!index.docs_.empty() && !(index.docs_.back().doc_id < d.doc_id)) {
            throw IndexFormatError(where + ": doc table not in ascending doc_id order");
        }
        index.docs_.push_back(std::move(d));
    }
    index.terms_.reserve(vocab);
    index.postings_.reserve(vocab);
    for (std::size_t t = 0; t < vocab; ++t) {
        std::string term = in.bytes();
        if (!index.terms_.empty() && !(index.terms_.back() < term)) {
            throw IndexFormatError(where + ": lexicon not in ascending term order");
        }
        const std::uint32_t df = in.u32();
        if (df == 0 || df > num_docs) throw IndexFormatError(where + ": bad document frequency for term");
        std::vector<Posting> list;
        list.reserve(df);
        for (std::uint32_t j = 0; j < df; ++j) {
            Posting p{in.u32(), in.u32()};
            if (p.doc >= num_docs || p.tf == 0 || (!list.empty() && p.doc <= list.back().doc)) {
                throw IndexFormatError(where + ": corrupt postings list");
            }
            list.push_back(p);
        }
        index.terms_.push_back(std::move(term));
        index.postings_.push_back(std::move(list));
    }
    if (!in.at_end()) throw IndexFormatError(where + ": trailing bytes after lexicon");

    index.avgdl_ = mean_length(index.docs_);
    if (index.avgdl_ != avgdl) throw IndexFormatError(where + ": header avgdl disagrees with doc table");
    index.rebuild_lookup();
    return index;
}

}  // namespace clir
