#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "clir/fusion.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace clir;

namespace {

Run ranked(const std::string& tag, const std::map<std::string, std::vector<std::string>>& lists) {
    Run run;
    run.run_tag = tag;
    for (const auto& [topic, docs] : lists) {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            run.topics[topic].push_back({docs[i], static_cast<long>(i + 1), static_cast<double>(docs.size() - i)});
        }
    }
    return run;
}

double fused_score(const Run& run, const std::string& topic, const std::string& doc) {
    auto it = run.topics.find(topic);
    if (it == run.topics.end()) return 0.0;
    for (const auto& d : it->second) {
        if (d.doc_id == doc) return d.score;
    }
    return 0.0;
}

// Independent reference: sum 1/(k+r) per (topic, doc), no truncation.
std::map<std::string, std::map<std::string, double>> rrf_oracle(const std::vector<Run>& runs, double k, long depth) {
    std::map<std::string, std::map<std::string, std::vector<long>>> ranks;
    for (const auto& run : runs) {
        for (const auto& [topic, docs] : run.topics) {
            for (const auto& d : docs) {
                if (d.rank <= depth) ranks[topic][d.doc_id].push_back(d.rank);
            }
        }
    }
    std::map<std::string, std::map<std::string, double>> out;
    for (auto& [topic, by_doc] : ranks) {
        for (auto& [doc, rs] : by_doc) {
            double s = 0.0;
            for (long r : rs) s += 1.0 / (k + static_cast<double>(r));
            out[topic][doc] = s;
        }
    }
    return out;
}

Run swap_up(const Run& run, const std::string& topic, std::size_t pos) {
    Run out = run;
    auto& docs = out.topics.at(topic);
    std::swap(docs[pos].doc_id, docs[pos - 1].doc_id);
    return out;
}

}  // namespace

TEST_SUITE("fusion") {
    TEST_CASE("rank 1 and rank 2 with k = 60") {
        const auto a = ranked("a", {{"q", {"d", "x"}}});
        const auto b = ranked("b", {{"q", {"y", "d"}}});
        const std::vector<Run> runs = {a, b};
        const auto fused = rrf_fuse(runs, RrfParams{60.0, 1000});
        CHECK(std::abs(fused_score(fused, "q", "d") - (1.0 / 61 + 1.0 / 62)) < 1e-12);
        CHECK(std::abs(fused_score(fused, "q", "d") - 0.0325224748810153) < 1e-12);
        CHECK(std::abs(fused_score(fused, "q", "x") - 1.0 / 62) < 1e-12);
        CHECK(fused.topics.at("q").front().doc_id == "d");
        CHECK(fused.run_tag == "rrf");
    }

    TEST_CASE("doc in one run only") {
        const std::vector<Run> runs = {ranked("a", {{"q", {"d"}}}), ranked("b", {{"q", {"e"}}, {"r", {"f"}}})};
        const auto fused = rrf_fuse(runs);
        CHECK(std::abs(fused_score(fused, "q", "d") - 1.0 / 61) < 1e-12);
        CHECK(std::abs(fused_score(fused, "r", "f") - 1.0 / 61) < 1e-12);
        // d and e tie; doc_id decides.
        CHECK(fused.topics.at("q")[0].doc_id == "d");
    }

    TEST_CASE("identical runs keep the input order") {
        const auto a = ranked("a", {{"q", {"z", "m", "a", "k"}}});
        const std::vector<Run> runs = {a, a};
        const auto fused = rrf_fuse(runs);
        std::vector<std::string> order;
        for (const auto& d : fused.topics.at("q")) order.push_back(d.doc_id);
        CHECK(order == std::vector<std::string>{"z", "m", "a", "k"});
    }

    TEST_CASE("fewer than two runs is a contract error") {
        CHECK_THROWS_AS((void)rrf_fuse(std::vector<Run>{}), ContractError);
        CHECK_THROWS_AS((void)rrf_fuse(std::vector<Run>{ranked("a", {{"q", {"d"}}})}), ContractError);
    }

    TEST_CASE("malformed input run is rejected") {
        Run bad = ranked("a", {{"q", {"d", "e"}}});
        bad.topics["q"][1].rank = 3;
        CHECK_THROWS_AS((void)rrf_fuse(std::vector<Run>{bad, ranked("b", {{"q", {"d"}}})}), DataError);
    }

    TEST_CASE("depth cuts contributions and output") {
        const std::vector<Run> runs = {ranked("a", {{"q", {"a", "b", "c"}}}), ranked("b", {{"q", {"c", "b", "a"}}})};
        const auto fused = rrf_fuse(runs, RrfParams{60.0, 2});
        REQUIRE(fused.topics.at("q").size() == 2);
        // a: rank 1 in A only (rank 3 in B is beyond depth); same for c; b: rank 2 twice.
        CHECK(fused.topics.at("q")[0].doc_id == "b");
        CHECK(std::abs(fused.topics.at("q")[0].score - 2.0 / 62) < 1e-12);
        CHECK(fused.topics.at("q")[1].doc_id == "a");
    }

    TEST_CASE("randomized: oracle, symmetry, bound, validity") {
        std::mt19937_64 rng(60);
        const std::vector<std::string> topics = {"1", "2", "3"};
        for (int trial = 0; trial < 100; ++trial) {
            const auto a = oracle::random_run(rng, topics, 30, 25, "a");
            const auto b = oracle::random_run(rng, {"2", "3", "4"}, 30, 25, "b");
            const RrfParams params{60.0, 20};
            const std::vector<Run> ab = {a, b}, ba = {b, a};
            const auto fused = rrf_fuse(ab, params);
            CHECK(rrf_fuse(ba, params) == fused);
            CHECK(validate_run(fused).empty());

            const auto expected = rrf_oracle(ab, params.k, params.depth);
            CHECK(fused.topics.size() == expected.size());
            for (const auto& [topic, docs] : fused.topics) {
                CHECK(docs.size() == std::min<std::size_t>(20, expected.at(topic).size()));
                for (const auto& d : docs) {
                    CHECK(std::abs(d.score - expected.at(topic).at(d.doc_id)) < 1e-12);
                    CHECK(d.score <= 2.0 / 61.0);
                }
                // Top score reaches the bound only for a doc ranked first in both runs.
                const bool shared_top = a.topics.count(topic) && b.topics.count(topic) &&
                                        a.topics.at(topic)[0].doc_id == b.topics.at(topic)[0].doc_id;
                CHECK((docs[0].score == 2.0 / 61.0) == shared_top);
            }
        }
    }

    TEST_CASE("randomized: improving a rank never lowers the fused score") {
        std::mt19937_64 rng(61);
        for (int trial = 0; trial < 100; ++trial) {
            const auto a = oracle::random_run(rng, {"q"}, 20, 20, "a");
            const auto b = oracle::random_run(rng, {"q"}, 20, 20, "b");
            const auto& docs = a.topics.at("q");
            if (docs.size() < 2) continue;
            const std::size_t pos = std::uniform_int_distribution<std::size_t>(1, docs.size() - 1)(rng);
            const std::string moved = docs[pos].doc_id;
            const RrfParams params{60.0, 1000};
            const auto before = rrf_fuse(std::vector<Run>{a, b}, params);
            const auto after = rrf_fuse(std::vector<Run>{swap_up(a, "q", pos), b}, params);
            CHECK(fused_score(after, "q", moved) > fused_score(before, "q", moved));
        }
    }
}
