#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace morphsynth;
using test_helpers::parse_fixture;
using test_helpers::read_fixture;

TEST_CASE("team fixture parses into four structures and one chain") {
    auto doc = parse_fixture("team.morph");
    REQUIRE(doc.structures.size() == 4);
    REQUIRE(doc.networks.size() == 1);
    CHECK(doc.networks.front().shape == ShapeHint::Chain);
    CHECK(doc.networks.front().compat.size() == 13);

    const auto* tau2 = doc.find_structure("tau2");
    REQUIRE(tau2);
    CHECK(tau2->partial);
    auto assumed = compat_lookup(tau2->compat, "E3", "M1");
    REQUIRE(assumed);
    CHECK(assumed->value == 3);
    CHECK(assumed->assumed);
}

TEST_CASE("empty input is an empty document") {
    auto result = parse("");
    CHECK(result.ok());
    CHECK(result.doc.structures.empty());
    CHECK(result.doc.networks.empty());

    auto blank = parse("   \n # just a comment\n\n");
    CHECK(blank.ok());
}

TEST_CASE("missing header is rejected when content follows") {
    auto result = parse("structure s { }\n");
    REQUIRE_FALSE(result.ok());
    CHECK(result.errors.front().message.find("morphfile 1") != std::string::npos);

    auto versioned = parse("morphfile 2\n");
    REQUIRE_FALSE(versioned.ok());
    CHECK(versioned.errors.front().message.find("unsupported") != std::string::npos);
}

TEST_CASE("value beyond the declared scale is rejected with its position") {
    const char* text =
        "morphfile 1\n"
        "structure s {\n"
        "  component A { alt A1 priority 1 }\n"
        "  component B { alt B1 priority 1 }\n"
        "  node S = A * B\n"
        "  compat A1 B1 = 5\n"
        "  scale 3\n"
        "}\n";
    auto result = parse(text);
    REQUIRE_FALSE(result.ok());
    const auto& e = result.errors.front();
    CHECK(e.message.find("value exceeds scale") != std::string::npos);
    CHECK(e.line == 6);
    CHECK(e.col == 3);
}

TEST_CASE("contradictory duplicate entries are rejected, consistent ones are not") {
    const char* base =
        "morphfile 1\n"
        "structure s {\n"
        "  component A { alt A1 priority 1 }\n"
        "  component B { alt B1 priority 1 }\n"
        "  node S = A * B\n"
        "  compat A1 B1 = 2\n"
        "  compat B1 A1 = 3\n"
        "}\n";
    auto bad = parse(base);
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.errors.front().message.find("contradictory duplicate") != std::string::npos);

    const char* same =
        "morphfile 1\n"
        "structure s {\n"
        "  component A { alt A1 priority 1 }\n"
        "  component B { alt B1 priority 1 }\n"
        "  node S = A * B\n"
        "  compat A1 B1 = 2\n"
        "  compat B1 A1 = 2\n"
        "}\n";
    CHECK(parse(same).ok());
}

TEST_CASE("dangling references are positioned errors") {
    const char* text =
        "morphfile 1\n"
        "network n chain {\n"
        "  point p uses ghost\n"
        "}\n";
    auto result = parse(text);
    REQUIRE_FALSE(result.ok());
    CHECK(result.errors.front().message.find("unknown structure 'ghost'") != std::string::npos);

    const char* incomplete =
        "morphfile 1\n"
        "structure s {\n"
        "  component A { alt A1 priority 1 }\n"
        "  component B { alt B1 priority 1 }\n"
        "  node S = A * B\n"
        "}\n"
        "network n chain {\n"
        "  point p uses s solutions { P1 = A1 }\n"
        "}\n";
    auto missing = parse(incomplete);
    REQUIRE_FALSE(missing.ok());
    CHECK(missing.errors.front().message.find("one alternative per component") !=
          std::string::npos);
}

TEST_CASE("duplicate definitions are rejected") {
    const char* text =
        "morphfile 1\n"
        "structure s {\n"
        "  component A { alt A1 priority 1 }\n"
        "  node S = A\n"
        "}\n"
        "structure s {\n"
        "  component A { alt A1 priority 1 }\n"
        "  node S = A\n"
        "}\n";
    auto result = parse(text);
    REQUIRE_FALSE(result.ok());
    CHECK(result.errors.front().message.find("duplicate definition") != std::string::npos);
}

TEST_CASE("round trip preserves every fixture structurally") {
    for (const auto* name : {"team.morph", "medical.morph", "networks.morph", "infeasible.morph"}) {
        auto first = parse(read_fixture(name));
        REQUIRE(first.ok());
        auto text1 = serialize(first.doc);
        auto second = parse(text1);
        REQUIRE(second.ok());
        CHECK(structurally_equal(first.doc, second.doc));
        // canonical form is a fixed point
        auto text2 = serialize(second.doc);
        CHECK(text1 == text2);
    }
}

TEST_CASE("serialization keeps assumption flags and labels") {
    auto doc = parse_fixture("medical.morph");
    auto text = serialize(doc);
    CHECK(text.find("compat E3 M1") == std::string::npos);  // team-only entry
    CHECK(text.find(" assumed") != std::string::npos);
    CHECK(text.find("\"H1&H4&H5&H7\"") != std::string::npos);
    CHECK(text.find("priority 1") != std::string::npos);
}

TEST_CASE("assumed entries carry their note through the round trip") {
    auto doc = parse_fixture("team.morph");
    const auto* tau2 = doc.find_structure("tau2");
    REQUIRE(tau2);
    auto entry = compat_lookup(tau2->compat, "E3", "M1");
    REQUIRE(entry);
    CHECK(entry->assumed);
    CHECK(entry->note == "forced by the stage-2 best composition");
    auto again = parse(serialize(doc));
    REQUIRE(again.ok());
    auto kept = compat_lookup(again.doc.find_structure("tau2")->compat, "E3", "M1");
    REQUIRE(kept);
    CHECK(kept->note == entry->note);
}

TEST_CASE("windows line endings parse the same") {
    auto unix_doc = parse(read_fixture("team.morph"));
    std::string crlf;
    for (char c : read_fixture("team.morph")) {
        if (c == '\n') crlf += '\r';
        crlf += c;
    }
    auto windows_doc = parse(crlf);
    REQUIRE(unix_doc.ok());
    REQUIRE(windows_doc.ok());
    CHECK(structurally_equal(unix_doc.doc, windows_doc.doc));
}

TEST_CASE("syntax errors carry line and column") {
    const char* text =
        "morphfile 1\n"
        "structure s {\n"
        "  component A { alt A1 priority one }\n"
        "  node S = A\n"
        "}\n";
    auto result = parse(text);
    REQUIRE_FALSE(result.ok());
    CHECK(result.errors.front().line == 3);
    CHECK(result.errors.front().message.find("priority value") != std::string::npos);
}

TEST_CASE("exported decision tree marks analysis points as diamonds") {
    auto doc = parse_fixture("medical.morph");
    auto text = export_graph(*doc.find_network("plan"));
    CHECK(text.find("digraph plan {") == 0);
    CHECK(text.find("a0 [shape=diamond];") != std::string::npos);
    CHECK(text.find("a1 [shape=diamond];") != std::string::npos);
    CHECK(text.find("a4 [shape=diamond];") != std::string::npos);
    CHECK(text.find("mu0 [shape=box];") != std::string::npos);
    CHECK(text.find("a0 -> mu1 [label=\"good\"];") != std::string::npos);
}

TEST_CASE("exported trajectory embeds the chosen solution names") {
    auto doc = parse_fixture("medical.morph");
    const auto* plan = doc.find_network("plan");
    const NamedTrajectory* final_traj = nullptr;
    for (const auto& t : plan->trajectories)
        if (t.name == "final") final_traj = &t;
    REQUIRE(final_traj);
    auto text = export_graph(*plan, final_traj);
    CHECK(text.find("label=\"mu4: S_mu4_3\"") != std::string::npos);
    CHECK(text.find("label=\"mu0: S_mu0_1\"") != std::string::npos);
}

TEST_CASE("exported feedback graph keeps the feedback arc") {
    auto doc = parse_fixture("medical.morph");
    auto text = export_graph(*doc.find_network("feedback"));
    CHECK(text.find("a4 -> mu0 [label=\"insufficient\"];") != std::string::npos);
}

TEST_CASE("empty network exports header and footer only") {
    TopLevelNetwork net;
    net.name = "void";
    CHECK(export_graph(net) == "digraph void {\n}\n");
}

TEST_CASE("export output is stable across runs") {
    auto doc = parse_fixture("networks.morph");
    const auto* net = doc.find_network("fig7a");
    CHECK(export_graph(*net) == export_graph(*net));
}
