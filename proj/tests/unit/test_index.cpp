#include <algorithm>
#include <random>
#include <vector>

#include "clir/index.hpp"
#include "doctest.h"
#include "support/temp_dir.hpp"

using namespace clir;
using clir::testing::slurp;
using clir::testing::spit;
using clir::testing::TempDir;

namespace {

// Title + body token counts 2, 4, 6.
std::vector<Document> three_docs() {
    return {
        {"d1", "a", "b", LangTag::en},
        {"d2", "a b", "c c", LangTag::en},
        {"d3", "c", "a b c d e", LangTag::en},
    };
}

std::vector<Document> random_corpus(std::mt19937& rng, std::size_t n) {
    static const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"};
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(1, 12);
    std::vector<Document> docs;
    for (std::size_t i = 0; i < n; ++i) {
        std::string body;
        for (std::size_t j = len(rng); j > 0; --j) body += words[pick(rng)] + " ";
        docs.push_back({"doc" + std::to_string(i), words[pick(rng)], body, LangTag::en});
    }
    return docs;
}

}  // namespace

TEST_SUITE("index") {
    TEST_CASE("three docs with lengths 2, 4, 6") {
        const auto docs = three_docs();
        const auto index = build_index(docs, Analyzer{LangTag::en});
        CHECK(index.num_docs() == 3);
        CHECK(index.avgdl() == 4.0);
        CHECK(index.vocabulary_size() == 5);
        CHECK(index.doc(0) == DocInfo{"d1", 2});
        CHECK(index.doc(2) == DocInfo{"d3", 6});
        CHECK(index.df("a") == 3);
        CHECK(index.df("c") == 2);
        CHECK(index.df("zzz") == 0);
        const auto c = index.postings("c");
        REQUIRE(c.size() == 2);
        CHECK(c[0] == Posting{1, 2});
        CHECK(c[1] == Posting{2, 2});
        const auto s = stats(index);
        CHECK(s.num_docs == 3);
        CHECK(s.avgdl == 4.0);
        CHECK(s.vocabulary == 5);
    }

    TEST_CASE("empty corpus") {
        const auto index = build_index(std::vector<Document>{}, Analyzer{LangTag::fa});
        CHECK(index.num_docs() == 0);
        CHECK(index.avgdl() == 0.0);
        CHECK(index.vocabulary_size() == 0);
    }

    TEST_CASE("duplicate or empty id is rejected") {
        auto docs = three_docs();
        docs.push_back({"d2", "x", "y", LangTag::en});
        try {
            (void)build_index(docs, Analyzer{LangTag::en});
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("d2") != std::string::npos);
        }
        CHECK_THROWS_AS((void)build_index(std::vector<Document>{{"", "x", "", LangTag::en}}, Analyzer{LangTag::en}),
                        DataError);
    }

    TEST_CASE("document language must match the analyzer") {
        CHECK_THROWS_AS((void)build_index(three_docs(), Analyzer{LangTag::fa}), DataError);
    }

    TEST_CASE("posting invariants and token conservation") {
        std::mt19937 rng(11);
        const auto docs = random_corpus(rng, 150);
        const Analyzer en{LangTag::en};
        const auto index = build_index(docs, en, 4);
        std::size_t tokens = 0;
        for (const auto& d : docs) tokens += en.tokenize(d.indexed_text()).size();
        std::size_t tf_sum = 0, len_sum = 0;
        for (std::size_t t = 0; t < index.vocabulary_size(); ++t) {
            const auto postings = index.postings_at(t);
            CHECK(postings.size() <= index.num_docs());
            for (std::size_t i = 0; i < postings.size(); ++i) {
                CHECK(postings[i].tf >= 1);
                CHECK(postings[i].doc < index.num_docs());
                if (i > 0) CHECK(postings[i - 1].doc < postings[i].doc);
                tf_sum += postings[i].tf;
            }
        }
        for (const auto& info : index.doc_table()) len_sum += info.length;
        CHECK(tf_sum == tokens);
        CHECK(len_sum == tokens);
        CHECK(index.avgdl() == doctest::Approx(static_cast<double>(tokens) / 150.0).epsilon(1e-15));
        CHECK(std::is_sorted(index.terms().begin(), index.terms().end()));
    }

    TEST_CASE("build is independent of input order and worker count") {
        std::mt19937 rng(3);
        auto docs = random_corpus(rng, 80);
        const auto reference = build_index(docs, Analyzer{LangTag::en}, 1);
        for (unsigned workers : {2u, 3u, 8u}) {
            std::shuffle(docs.begin(), docs.end(), rng);
            CHECK(build_index(docs, Analyzer{LangTag::en}, workers) == reference);
        }
    }

    TEST_CASE("save and load round trip") {
        TempDir dir;
        const auto docs = three_docs();
        const auto index = build_index(docs, Analyzer{LangTag::en});
        save_index(index, dir / "three.idx");
        const auto loaded = load_index(dir / "three.idx");
        CHECK(loaded == index);
        CHECK(loaded.num_docs() == 3);
        CHECK(loaded.avgdl() == 4.0);
        for (const auto& term : index.terms()) {
            CHECK(loaded.df(term) == index.df(term));
            const auto a = loaded.postings(term);
            const auto b = index.postings(term);
            CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
        }
        save_index(loaded, dir / "again.idx");
        CHECK(slurp(dir / "three.idx") == slurp(dir / "again.idx"));

        const auto empty = build_index(std::vector<Document>{}, Analyzer{LangTag::zh});
        save_index(empty, dir / "empty.idx");
        CHECK(load_index(dir / "empty.idx") == empty);
    }

    TEST_CASE("header is plain text with magic and version") {
        TempDir dir;
        save_index(build_index(three_docs(), Analyzer{LangTag::en}), dir / "i.idx");
        const auto bytes = slurp(dir / "i.idx");
        CHECK(bytes.rfind("CLIRIDX 1\n", 0) == 0);
        CHECK(bytes.find("N=3") != std::string::npos);
    }

    TEST_CASE("every truncation is a format error") {
        TempDir dir;
        save_index(build_index(three_docs(), Analyzer{LangTag::en}), dir / "i.idx");
        const auto bytes = slurp(dir / "i.idx");
        const auto header_end = bytes.find('\n', bytes.find('\n') + 1) + 1;
        for (std::size_t cut = header_end; cut < bytes.size(); ++cut) {
            spit(dir / "cut.idx", bytes.substr(0, cut));
            CHECK_THROWS_AS((void)load_index(dir / "cut.idx"), IndexFormatError);
        }
        spit(dir / "extra.idx", bytes + "x");
        CHECK_THROWS_AS((void)load_index(dir / "extra.idx"), IndexFormatError);
    }

    TEST_CASE("wrong magic or version is a version error") {
        TempDir dir;
        save_index(build_index(three_docs(), Analyzer{LangTag::en}), dir / "i.idx");
        auto bytes = slurp(dir / "i.idx");
        spit(dir / "magic.idx", "NOTANIDX 1\n" + bytes.substr(bytes.find('\n') + 1));
        CHECK_THROWS_AS((void)load_index(dir / "magic.idx"), IndexVersionError);
        spit(dir / "version.idx", "CLIRIDX 2\n" + bytes.substr(bytes.find('\n') + 1));
        CHECK_THROWS_AS((void)load_index(dir / "version.idx"), IndexVersionError);
        spit(dir / "blank.idx", "");
        CHECK_THROWS_AS((void)load_index(dir / "blank.idx"), IndexVersionError);
    }

    TEST_CASE("missing file is an io error") {
        TempDir dir;
        CHECK_THROWS_AS((void)load_index(dir / "nope.idx"), IoError);
    }
}
