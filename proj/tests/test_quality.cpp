#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"

using namespace morphsynth;
using test_helpers::parse_fixture;

namespace {

QualityVector qv(int w, std::vector<int> tiers) { return {w, std::move(tiers)}; }

// test-local reference peel, kept deliberately naive
std::vector<std::vector<std::size_t>> naive_layers(const std::vector<QualityItem>& items) {
    std::vector<std::vector<std::size_t>> layers;
    std::vector<bool> done(items.size(), false);
    std::size_t left = items.size();
    while (left) {
        std::vector<std::size_t> layer;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (done[i]) continue;
            bool dom = false;
            for (std::size_t j = 0; j < items.size(); ++j)
                if (!done[j] && j != i &&
                    compare_quality(items[j].quality, items[i].quality) ==
                        Dominance::StrictlyDominates)
                    dom = true;
            if (!dom) layer.push_back(i);
        }
        for (auto i : layer) done[i] = true;
        left -= layer.size();
        layers.push_back(layer);
    }
    return layers;
}

}  // namespace

TEST_CASE("dominance verdicts on the recorded stage vectors") {
    CHECK(compare_quality(qv(3, {4, 0, 0}), qv(3, {3, 1, 0})) == Dominance::StrictlyDominates);
    CHECK(compare_quality(qv(2, {4, 0, 0}), qv(3, {3, 1, 0})) == Dominance::Other);
    CHECK(compare_quality(qv(3, {3, 1, 0}), qv(2, {4, 0, 0})) == Dominance::Other);
    CHECK(compare_quality(qv(3, {4, 0, 0}), qv(3, {4, 0, 0})) == Dominance::Equal);
}

TEST_CASE("trailing zero tiers never change a verdict") {
    std::mt19937 rng(7);
    for (int i = 0; i < 2000; ++i) {
        auto a = test_helpers::random_quality(rng);
        auto b = test_helpers::random_quality(rng);
        auto verdict = compare_quality(a, b);
        auto a2 = a;
        a2.tiers.push_back(0);
        a2.tiers.push_back(0);
        auto b2 = b;
        b2.tiers.push_back(0);
        CHECK(compare_quality(a2, b) == verdict);
        CHECK(compare_quality(a, b2) == verdict);
        CHECK(compare_quality(a2, b2) == verdict);
    }
}

TEST_CASE("dominance is a partial order") {
    std::mt19937 rng(11);
    for (int i = 0; i < 3000; ++i) {
        auto a = test_helpers::random_quality(rng);
        auto b = test_helpers::random_quality(rng);
        auto c = test_helpers::random_quality(rng);

        // reflexive as equality
        CHECK(compare_quality(a, a) == Dominance::Equal);
        // antisymmetric: mutual weak dominance forces equality
        if (covers(a, b) && covers(b, a)) CHECK(a == b);
        // transitive on the weak relation
        if (covers(a, b) && covers(b, c)) CHECK(covers(a, c));
    }
}

TEST_CASE("ideal point weakly dominates every same-size vector") {
    std::mt19937 rng(13);
    const int nu = 3, m = 5;
    QualityVector ideal{nu, {m, 0, 0}};
    std::uniform_int_distribution<int> w(0, nu);
    for (int i = 0; i < 500; ++i) {
        // random split of m picks over three tiers
        QualityVector v{w(rng), {0, 0, 0}};
        std::uniform_int_distribution<int> tier(0, 2);
        for (int k = 0; k < m; ++k) ++v.tiers[tier(rng)];
        CHECK(covers(ideal, v));
    }
}

TEST_CASE("pareto layering matches a naive peel on random inputs") {
    std::mt19937 rng(17);
    for (int round = 0; round < 200; ++round) {
        std::uniform_int_distribution<int> n(1, 12);
        std::vector<QualityItem> items;
        int count = n(rng);
        for (int i = 0; i < count; ++i)
            items.push_back({"i" + std::to_string(i), test_helpers::random_quality(rng, 3, 3, 4)});
        auto got = pareto_layers(items, 1 << 20);
        auto expected = naive_layers(items);
        REQUIRE(got.size() == expected.size());
        for (std::size_t l = 0; l < got.size(); ++l) {
            auto sorted_got = got[l];
            auto sorted_exp = expected[l];
            std::sort(sorted_got.begin(), sorted_got.end());
            std::sort(sorted_exp.begin(), sorted_exp.end());
            CHECK(sorted_got == sorted_exp);
        }
    }
}

TEST_CASE("layer listing is deterministic and depth-bounded") {
    std::vector<QualityItem> items = {
        {"b", qv(2, {4, 0, 0})},
        {"a", qv(2, {4, 0, 0})},
        {"c", qv(3, {3, 1, 0})},
        {"d", qv(1, {4, 0, 0})},
    };
    auto layers = pareto_layers(items, 1);
    REQUIRE(layers.size() == 1);
    // within the layer: w descending, then prefix sums, then id
    REQUIRE(layers[0].size() == 3);
    CHECK(items[layers[0][0]].id == "c");
    CHECK(items[layers[0][1]].id == "a");
    CHECK(items[layers[0][2]].id == "b");

    auto both = pareto_layers(items, 2);
    REQUIRE(both.size() == 2);
    CHECK(items[both[1][0]].id == "d");
}

TEST_CASE("singleton input forms layer one") {
    std::vector<QualityItem> items = {{"only", qv(2, {1})}};
    auto layers = pareto_layers(items, 4);
    REQUIRE(layers.size() == 1);
    REQUIRE(layers[0] == std::vector<std::size_t>{0});
}

TEST_CASE("quality of the recorded stage-1 compositions") {
    auto doc = parse_fixture("team.morph");
    const auto* tau1 = doc.find_structure("tau1");
    REQUIRE(tau1);
    CHECK(quality_of(*tau1, "S", {"L2", "R1", "E2", "M0"}) == qv(2, {4, 0, 0}));
    CHECK(quality_of(*tau1, "S", {"L2", "R1", "E1", "M0"}) == qv(3, {3, 1, 0}));
}

TEST_CASE("single-child composition gets the vacuous best w") {
    auto doc = parse_fixture("medical.morph");
    const auto* phys = doc.find_structure("phys");
    REQUIRE(phys);
    CHECK(quality_of(*phys, "S", {"J1"}) == qv(3, {1}));
}

TEST_CASE("environment subsystem value recomputes from its table") {
    auto doc = parse_fixture("medical.morph");
    const auto* plan = doc.find_structure("plan");
    REQUIRE(plan);
    CHECK(quality_of(*plan, "Y", {"P1", "H8", "G1"}) == qv(3, {2, 1, 0}));
}

TEST_CASE("quality is invariant under selection reordering") {
    auto doc = parse_fixture("team.morph");
    const auto* tau0 = doc.find_structure("tau0");
    REQUIRE(tau0);
    auto a = quality_of(*tau0, "S", {"L2", "R1", "E0", "M0"});
    auto b = quality_of(*tau0, "S", {"M0", "E0", "R1", "L2"});
    CHECK(a == b);
    CHECK(a == qv(3, {4, 0, 0}));
}

TEST_CASE("incomplete selection is rejected") {
    auto doc = parse_fixture("team.morph");
    const auto* tau0 = doc.find_structure("tau0");
    REQUIRE(tau0);
    CHECK_THROWS_AS(quality_of(*tau0, "S", {"L2", "R1", "E0"}), Error);
    CHECK_THROWS_AS(quality_of(*tau0, "S", {"L2", "R1", "E0", "M9"}), Error);
}
