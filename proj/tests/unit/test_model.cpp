#include <cmath>
#include <limits>

#include "clir/model.hpp"
#include "doctest.h"

using namespace clir;

namespace {

Run one_topic(std::vector<RankedDoc> docs) {
    Run run;
    run.run_tag = "t";
    run.topics["q1"] = std::move(docs);
    return run;
}

Topic sample_topic() {
    Topic topic;
    topic.topic_id = "7";
    topic.variants[{LangTag::en, TranslatorTag::original}] = {"a", "b"};
    topic.variants[{LangTag::fa, TranslatorTag::bing}] = {"x y", "z"};
    return topic;
}

}  // namespace

TEST_SUITE("model") {
    TEST_CASE("tag parsing is exact") {
        CHECK(parse_lang("fa") == LangTag::fa);
        CHECK(parse_lang("zh") == LangTag::zh);
        CHECK_FALSE(parse_lang("FA").has_value());
        CHECK_FALSE(parse_lang("de").has_value());
        CHECK(parse_translator("youdao") == TranslatorTag::youdao);
        CHECK(parse_translator("ht") == TranslatorTag::ht);
        CHECK_FALSE(parse_translator("google").has_value());
        CHECK(parse_query_fields("title_and_description") == QueryFields::title_and_description);
        for (auto t : {TranslatorTag::bing, TranslatorTag::facebook, TranslatorTag::huawei, TranslatorTag::caiyun,
                       TranslatorTag::youdao, TranslatorTag::ht, TranslatorTag::original}) {
            CHECK(parse_translator(to_string(t)) == t);
        }
    }

    TEST_CASE("well-formed run has no violations") {
        auto run = one_topic({{"d1", 1, 3.0}, {"d2", 2, 2.0}, {"d3", 3, 1.0}});
        CHECK(validate_run(run).empty());
        CHECK_NOTHROW(require_valid(run, "test"));
    }

    TEST_CASE("duplicate doc is one violation") {
        auto v = validate_run(one_topic({{"d1", 1, 3.0}, {"d1", 2, 2.0}}));
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule == RunRule::duplicate_doc);
        CHECK(v[0].topic_id == "q1");
        CHECK(v[0].position == 1);
    }

    TEST_CASE("ranks 1,3 give exactly one gap") {
        auto v = validate_run(one_topic({{"d1", 1, 3.0}, {"d2", 3, 2.0}}));
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule == RunRule::rank_gap);
    }

    TEST_CASE("rank sequences checked against 1..n") {
        // Oracle: a rank list is valid iff it equals 1..n exactly.
        const std::vector<std::vector<long>> cases = {{1}, {1, 2}, {2}, {1, 1}, {2, 1}, {1, 2, 4}, {0, 1}, {1, 2, 3}};
        for (const auto& ranks : cases) {
            std::vector<RankedDoc> docs;
            for (std::size_t i = 0; i < ranks.size(); ++i) {
                docs.push_back({"d" + std::to_string(i), ranks[i], 10.0 - static_cast<double>(i)});
            }
            bool oracle = true;
            for (std::size_t i = 0; i < ranks.size(); ++i) oracle = oracle && ranks[i] == static_cast<long>(i + 1);
            CHECK(validate_run(one_topic(docs)).empty() == oracle);
        }
    }

    TEST_CASE("score order and finiteness") {
        auto v = validate_run(one_topic({{"d1", 1, 1.0}, {"d2", 2, 2.0}}));
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule == RunRule::score_order);

        auto nan = validate_run(one_topic({{"d1", 1, std::numeric_limits<double>::quiet_NaN()}}));
        REQUIRE(nan.size() == 1);
        CHECK(nan[0].rule == RunRule::non_finite_score);

        CHECK(validate_run(one_topic({{"d1", 1, 1.0}, {"d2", 2, 1.0}})).empty());
        CHECK_THROWS_AS(require_valid(one_topic({{"d1", 1, 1.0}, {"d2", 2, 2.0}}), "x"), DataError);
    }

    TEST_CASE("assign_ranks breaks ties by doc_id") {
        auto ranked = assign_ranks({{"b", 1.0}, {"c", 2.0}, {"a", 1.0}});
        REQUIRE(ranked.size() == 3);
        CHECK(ranked[0] == RankedDoc{"c", 1, 2.0});
        CHECK(ranked[1] == RankedDoc{"a", 2, 1.0});
        CHECK(ranked[2] == RankedDoc{"b", 3, 1.0});
    }

    TEST_CASE("compose_query") {
        const Topic topic = sample_topic();
        CHECK(compose_query(topic, QueryFields::title_and_description, LangTag::en, TranslatorTag::original) == "a b");
        CHECK(compose_query(topic, QueryFields::title, LangTag::en, TranslatorTag::original) == "a");
        CHECK(compose_query(topic, QueryFields::description, LangTag::en, TranslatorTag::original) == "b");
        CHECK(compose_query(topic, QueryFields::title_and_description, LangTag::fa, TranslatorTag::bing) == "x y z");
        try {
            (void)compose_query(topic, QueryFields::title, LangTag::fa, TranslatorTag::caiyun);
            FAIL("expected MissingVariantError");
        } catch (const MissingVariantError& e) {
            CHECK(e.lang() == LangTag::fa);
            CHECK(e.translator() == TranslatorTag::caiyun);
            CHECK(std::string(e.what()).find("caiyun") != std::string::npos);
        }
    }

    TEST_CASE("run entries flatten in topic then rank order") {
        Run run;
        run.run_tag = "tag";
        run.topics["2"] = {{"x", 1, 1.0}};
        run.topics["1"] = {{"y", 1, 2.0}, {"z", 2, 1.0}};
        auto entries = run.entries();
        REQUIRE(entries.size() == 3);
        CHECK(run.entry_count() == 3);
        CHECK(entries[0] == RunEntry{"1", "y", 1, 2.0, "tag"});
        CHECK(entries[2] == RunEntry{"2", "x", 1, 1.0, "tag"});
    }

    TEST_CASE("qrels default to grade 0") {
        Qrels qrels;
        qrels.topics["q1"]["d1"] = 2;
        CHECK(qrels.grade("q1", "d1") == 2);
        CHECK(qrels.grade("q1", "d2") == 0);
        CHECK(qrels.grade("q9", "d1") == 0);
        CHECK(qrels.find("q9") == nullptr);
    }

    TEST_CASE("parameter checks") {
        CHECK_NOTHROW(check(Bm25Params{}));
        CHECK_THROWS_AS(check(Bm25Params{-1.0, 0.4}), ContractError);
        CHECK_THROWS_AS(check(Bm25Params{0.9, 1.5}), ContractError);
        CHECK_THROWS_AS(check(RbpParams{1.0}), ContractError);
        CHECK_THROWS_AS(check(RbpParams{0.0}), ContractError);
        CHECK_THROWS_AS(check(RrfParams{60.0, 0}), ContractError);
        CHECK_THROWS_AS(check(RrfParams{-1.0, 10}), ContractError);
    }
}
