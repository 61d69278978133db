#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace morphsynth;
using test_helpers::parse_fixture;
using test_helpers::points_of;

TEST_CASE("reference synthesis reproduces the stage-1 layer") {
    auto doc = parse_fixture("team.morph");
    auto sols = oracle::oracle_synthesize(*doc.find_structure("tau1"), "S");
    REQUIRE(sols.size() == 2);
    CHECK(sols[0].selection_string() == "L2*R1*E1*M0");
    CHECK(sols[0].quality == QualityVector{3, {3, 1, 0}});
    CHECK(sols[1].selection_string() == "L2*R1*E2*M0");
    CHECK(sols[1].quality == QualityVector{2, {4, 0, 0}});
}

TEST_CASE("reference chain recomputes the four stage assignments") {
    auto doc = parse_fixture("team.morph");
    const auto& net = *doc.find_network("stages");
    SynthesisConfig cfg;
    cfg.layer_depth = 1 << 20;
    auto got = oracle::oracle_chain(points_of(net), {net.scale_max, net.compat},
                                    AggregationMode::Adjacent, cfg, 3);
    REQUIRE(got.size() == 4);
    for (const auto& t : got) {
        CHECK(t.layer == 1);
        CHECK(t.quality == QualityVector{2, {4, 0, 0}});
    }
}

TEST_CASE("reference synthesis enforces its cap") {
    auto doc = parse_fixture("team.morph");
    CHECK_THROWS_WITH(oracle::oracle_synthesize(*doc.find_structure("tau0"), "S", {}, nullptr, 10),
                      Catch::Matchers::ContainsSubstring("cap"));
}

TEST_CASE("reference synthesis on an infeasible instance is empty") {
    auto doc = parse_fixture("infeasible.morph");
    CHECK(oracle::oracle_synthesize(*doc.find_structure("dead"), "S").empty());
}

TEST_CASE("reference quality recomputation agrees with the engine everywhere") {
    auto doc = parse_fixture("medical.morph");
    const auto& plan = *doc.find_structure("plan");
    CHECK(oracle::oracle_quality(plan, "X", {"J8", "M2"}) == QualityVector{2, {2, 0, 0}});
    CHECK(oracle::oracle_quality(plan, "Y", {"P1", "H8", "G1"}) == QualityVector{3, {2, 1, 0}});
    CHECK(oracle::oracle_quality(plan, "X", {"J8", "M2"}) == quality_of(plan, "X", {"J8", "M2"}));
}
