#include "clir/trecio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"

namespace clir {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t i = 0;
    auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
    while (i < line.size()) {
        while (i < line.size() && is_ws(line[i])) ++i;
        const std::size_t start = i;
        while (i < line.size() && !is_ws(line[i])) ++i;
        if (i > start) cols.push_back(line.substr(start, i - start));
    }
    return cols;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

json parse_json_line(const std::string& line, const std::string& source, std::size_t lineno) {
    try {
        json j = json::parse(line);
        if (!j.is_object()) throw ParseError(source, lineno, "expected a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw ParseError(source, lineno, std::string("malformed JSON: ") + e.what());
    }
}

std::string string_field(const json& j, const char* key, const std::string& source, std::size_t lineno) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(source, lineno, std::string("missing key \"") + key + "\"");
    if (!it->is_string()) throw ParseError(source, lineno, std::string("key \"") + key + "\" must be a string");
    return it->get<std::string>();
}

std::string dump(const ordered_json& j) {
    return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

}  // namespace

// ---------------------------------------------------------------- corpus

void read_corpus(std::istream& in, const std::string& source, const std::function<void(Document&&)>& sink) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const json j = parse_json_line(line, source, lineno);
        Document d;
        d.doc_id = string_field(j, "id", source, lineno);
        d.title = string_field(j, "title", source, lineno);
        d.body = string_field(j, "text", source, lineno);
        const std::string lang = string_field(j, "lang", source, lineno);
        auto tag = parse_lang(lang);
        if (!tag) throw ParseError(source, lineno, "unknown lang \"" + lang + "\"");
        d.lang = *tag;
        if (d.doc_id.empty()) throw ParseError(source, lineno, "empty document id");
        if (d.title.empty() && d.body.empty()) throw ParseError(source, lineno, "document " + d.doc_id + " has neither title nor text");
        sink(std::move(d));
    }
}

std::vector<Document> read_corpus(std::istream& in, const std::string& source) {
    std::vector<Document> docs;
    read_corpus(in, source, [&](Document&& d) { docs.push_back(std::move(d)); });
    return docs;
}

std::vector<Document> read_corpus(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_corpus(in, path.string());
}

void write_corpus(std::ostream& out, std::span<const Document> docs) {
    for (const auto& d : docs) {
        ordered_json j;
        j["id"] = d.doc_id;
        j["title"] = d.title;
        j["text"] = d.body;
        j["lang"] = std::string(to_string(d.lang));
        out << dump(j) << '\n';
    }
}

void write_corpus(const std::filesystem::path& path, std::span<const Document> docs) {
    auto out = open_out(path);
    write_corpus(out, docs);
    finish(out, path);
}

// ---------------------------------------------------------------- topics

std::vector<Topic> read_topics(std::istream& in, const std::string& source) {
    std::vector<Topic> topics;
    std::set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const json j = parse_json_line(line, source, lineno);
        Topic topic;
        topic.topic_id = string_field(j, "topic_id", source, lineno);
        if (topic.topic_id.empty()) throw ParseError(source, lineno, "empty topic_id");
        if (!ids.insert(topic.topic_id).second) throw ParseError(source, lineno, "duplicate topic " + topic.topic_id);

        auto variants = j.find("variants");
        if (variants == j.end() || !variants->is_array()) {
            throw ParseError(source, lineno, "topic " + topic.topic_id + ": \"variants\" must be an array");
        }
        for (const auto& v : *variants) {
            if (!v.is_object()) throw ParseError(source, lineno, "topic " + topic.topic_id + ": variant must be an object");
            const std::string lang = string_field(v, "lang", source, lineno);
            const std::string translator = string_field(v, "translator", source, lineno);
            auto lang_tag = parse_lang(lang);
            auto translator_tag = parse_translator(translator);
            if (!lang_tag) throw ParseError(source, lineno, "unknown lang \"" + lang + "\"");
            if (!translator_tag) throw ParseError(source, lineno, "unknown translator \"" + translator + "\"");
            TopicText text{string_field(v, "title", source, lineno), string_field(v, "description", source, lineno)};
            if (text.title.empty()) {
                throw ParseError(source, lineno,
                                 "topic " + topic.topic_id + ": empty title in (" + lang + ", " + translator + ")");
            }
            if (!topic.variants.emplace(Topic::VariantKey{*lang_tag, *translator_tag}, std::move(text)).second) {
                throw ParseError(source, lineno,
                                 "topic " + topic.topic_id + ": duplicate variant (" + lang + ", " + translator + ")");
            }
        }
        if (topic.find(LangTag::en, TranslatorTag::original) == nullptr) {
            throw ParseError(source, lineno, "topic " + topic.topic_id + " lacks the (en, original) variant");
        }
        topics.push_back(std::move(topic));
    }
    return topics;
}

std::vector<Topic> read_topics(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_topics(in, path.string());
}

void write_topics(std::ostream& out, std::span<const Topic> topics) {
    for (const auto& t : topics) {
        ordered_json j;
        j["topic_id"] = t.topic_id;
        j["variants"] = ordered_json::array();
        for (const auto& [key, text] : t.variants) {
            ordered_json v;
            v["lang"] = std::string(to_string(key.first));
            v["translator"] = std::string(to_string(key.second));
            v["title"] = text.title;
            v["description"] = text.description;
            j["variants"].push_back(std::move(v));
        }
        out << dump(j) << '\n';
    }
}

void write_topics(const std::filesystem::path& path, std::span<const Topic> topics) {
    auto out = open_out(path);
    write_topics(out, topics);
    finish(out, path);
}

// ---------------------------------------------------------------- runs

std::string format_score(double score) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", score);
    return buf;
}

Run read_run(std::istream& in, const std::string& source) {
    struct Line {
        RankedDoc doc;
        std::size_t lineno;
    };
    std::map<std::string, std::vector<Line>> grouped;
    Run run;
    bool have_tag = false;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cols = split_ws(line);
        if (cols.size() != 6) {
            throw ParseError(source, lineno, "expected 6 columns, found " + std::to_string(cols.size()));
        }
        Line entry{{std::string(cols[2]), 0, 0.0}, lineno};
        if (!parse_number(cols[3], entry.doc.rank)) {
            throw ParseError(source, lineno, "rank is not an integer: " + std::string(cols[3]));
        }
        if (!parse_number(cols[4], entry.doc.score)) {
            throw ParseError(source, lineno, "score is not a number: " + std::string(cols[4]));
        }
        if (!std::isfinite(entry.doc.score)) throw ParseError(source, lineno, "non-finite score");
        if (!have_tag) {
            run.run_tag = std::string(cols[5]);
            have_tag = true;
        } else if (cols[5] != run.run_tag) {
            throw ParseError(source, lineno, "run tag '" + std::string(cols[5]) + "' differs from '" + run.run_tag + "'");
        }
        grouped[std::string(cols[0])].push_back(std::move(entry));
    }

    std::map<std::string, std::vector<std::size_t>> line_of;
    for (auto& [topic_id, lines] : grouped) {
        std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.doc.rank < b.doc.rank; });
        auto& docs = run.topics[topic_id];
        auto& numbers = line_of[topic_id];
        for (auto& l : lines) {
            docs.push_back(std::move(l.doc));
            numbers.push_back(l.lineno);
        }
    }
    const auto violations = validate_run(run);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw ParseError(source, line_of[v.topic_id][v.position], "invalid run: " + v.describe());
    }
    return run;
}

Run read_run(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_run(in, path.string());
}

void write_run(std::ostream& out, const Run& run) {
    const std::string tag = run.run_tag.empty() ? "run" : run.run_tag;
    for (const auto& [topic_id, docs] : run.topics) {
        for (const auto& d : docs) {
            out << topic_id << " Q0 " << d.doc_id << ' ' << d.rank << ' ' << format_score(d.score) << ' ' << tag
                << '\n';
        }
    }
}

void write_run(const std::filesystem::path& path, const Run& run) {
    auto out = open_out(path);
    write_run(out, run);
    finish(out, path);
}

// ---------------------------------------------------------------- qrels

Qrels read_qrels(std::istream& in, const std::string& source) {
    Qrels qrels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cols = split_ws(line);
        if (cols.size() != 4) {
            throw ParseError(source, lineno, "expected 4 columns, found " + std::to_string(cols.size()));
        }
        int grade = 0;
        if (!parse_number(cols[3], grade)) {
            throw ParseError(source, lineno, "grade is not an integer: " + std::string(cols[3]));
        }
        if (grade < 0) throw ParseError(source, lineno, "negative grade " + std::string(cols[3]));
        auto& judged = qrels.topics[std::string(cols[0])];
        if (!judged.emplace(std::string(cols[2]), grade).second) {
            throw ParseError(source, lineno,
                             "duplicate judgment for (" + std::string(cols[0]) + ", " + std::string(cols[2]) + ")");
        }
    }
    return qrels;
}

Qrels read_qrels(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_qrels(in, path.string());
}

void write_qrels(std::ostream& out, const Qrels& qrels) {
    for (const auto& [topic_id, judged] : qrels.topics) {
        for (const auto& [doc_id, grade] : judged) out << topic_id << " 0 " << doc_id << ' ' << grade << '\n';
    }
}

}  // namespace clir
