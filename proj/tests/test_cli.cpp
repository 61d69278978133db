#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "helpers.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr combined
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(MORPHSYNTH_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    RunResult result;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) result.output.append(buf, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string fx(const std::string& name) { return test_helpers::fixture_path(name); }

}  // namespace

TEST_CASE("validate: fixtures pass, strict mode flags the open estimate") {
    auto ok = run("validate " + fx("team.morph"));
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("missing compatibility entry (E2,M1)") != std::string::npos);

    auto strict = run("validate " + fx("team.morph") + " --strict");
    CHECK(strict.exit_code == 1);

    auto medical = run("validate " + fx("medical.morph") + " --strict");
    CHECK(medical.exit_code == 0);
}

TEST_CASE("validate: malformed input reports positions and fails") {
    std::string path = "/tmp/morphsynth_cli_bad.morph";
    {
        std::ofstream out(path);
        out << "morphfile 1\nstructure s {\n  component A { alt }\n}\n";
    }
    auto bad = run("validate " + path);
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find(":3:") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("synth prints the stage-1 pair deterministically") {
    auto got = run("synth " + fx("team.morph") + " --structure tau1");
    CHECK(got.exit_code == 0);
    CHECK(got.output ==
          "S1 = L2*R1*E1*M0 N=(3;3,1,0) layer=1\n"
          "S2 = L2*R1*E2*M0 N=(2;4,0,0) layer=1\n");
    auto again = run("synth " + fx("team.morph") + " --structure tau1");
    CHECK(got.output == again.output);
}

TEST_CASE("synth honours the layer depth option") {
    auto one = run("synth " + fx("team.morph") + " --structure tau1");
    auto two = run("synth " + fx("team.morph") + " --structure tau1 --layers 2");
    CHECK(two.exit_code == 0);
    CHECK(two.output.find(one.output) == 0);
    CHECK(two.output.find("layer=2") != std::string::npos);
}

TEST_CASE("synth exit codes: unknown structure and empty result") {
    CHECK(run("synth " + fx("team.morph") + " --structure nope").exit_code == 1);
    CHECK(run("synth " + fx("infeasible.morph") + " --structure dead").exit_code == 2);
    CHECK(run("synth " + fx("infeasible.morph") + " --structure dead --admit-zero").exit_code ==
          0);
}

TEST_CASE("thread cap does not change output") {
    auto base = run("synth " + fx("medical.morph") + " --structure plan");
    std::string cmd = "env MORPHSYNTH_THREADS=3 " + std::string(MORPHSYNTH_BIN) + " synth " +
                      fx("medical.morph") + " --structure plan 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::string output;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
    pclose(pipe);
    CHECK(base.output == output);
}

TEST_CASE("trajectory lists the four stage chains in both modes") {
    for (const std::string mode : {"adjacent", "all-pairs"}) {
        auto got = run("trajectory " + fx("team.morph") + " --network stages --mode " + mode);
        CHECK(got.exit_code == 0);
        CHECK(got.output ==
              "<S_tau0_1 * S_tau1_1 * S_tau2_1 * S_tau3_1> N=(2;4,0,0) layer=1\n"
              "<S_tau0_1 * S_tau1_1 * S_tau2_1 * S_tau3_2> N=(2;4,0,0) layer=1\n"
              "<S_tau0_1 * S_tau1_2 * S_tau2_1 * S_tau3_1> N=(2;4,0,0) layer=1\n"
              "<S_tau0_1 * S_tau1_2 * S_tau2_1 * S_tau3_2> N=(2;4,0,0) layer=1\n");
    }
}

TEST_CASE("trajectory executes outcome walks before synthesizing") {
    auto down = run("trajectory " + fx("medical.morph") +
                    " --network plan --outcomes a0=insufficient,a4=good");
    CHECK(down.exit_code == 0);
    CHECK(down.output.find("path: mu0 -> mu4 -> mu5\n") != std::string::npos);
    CHECK(down.output.find("<S_mu0_1 * S_mu4_3 * S_mu5_1> N=(3;3,0,0,0) layer=1") !=
          std::string::npos);

    auto up = run("trajectory " + fx("medical.morph") +
                  " --network plan --outcomes a0=good,a1=good");
    CHECK(up.exit_code == 0);
    CHECK(up.output.find("path: mu0 -> mu1 -> mu2\n") != std::string::npos);
}

TEST_CASE("trajectory exits 2 when nothing is feasible") {
    std::string path = "/tmp/morphsynth_cli_dead_chain.morph";
    {
        std::ofstream out(path);
        out << "morphfile 1\n"
               "structure one {\n"
               "  component C { alt c1 priority 1 }\n"
               "  node S = C\n"
               "}\n"
               "network blocked chain {\n"
               "  point p uses one solutions { P = c1 }\n"
               "  point q uses one solutions { Q = c1 }\n"
               "  edge p -> q\n"
               "  compat p.P q.Q = 0\n"
               "}\n";
    }
    auto got = run("trajectory " + path + " --network blocked");
    CHECK(got.exit_code == 2);
    CHECK(got.output.find("no feasible trajectory") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("trajectory refuses cyclic networks without a transformation") {
    auto got = run("trajectory " + fx("medical.morph") + " --network feedback");
    CHECK(got.exit_code == 1);
    CHECK(got.output.find("cyclic network") != std::string::npos);

    auto simplified = run("trajectory " + fx("medical.morph") +
                          " --network feedback --simplify --outcomes a0=good,a1=good");
    CHECK(simplified.exit_code == 0);
    CHECK(simplified.output.find("removed back arcs: a4->mu0") != std::string::npos);
}

TEST_CASE("trajectory over a spanning tree notes the transformation") {
    auto got = run("trajectory " + fx("networks.morph") +
                   " --network fig7a_core --spanning-tree mu4");
    CHECK(got.exit_code == 0);
    CHECK(got.output.find("# transformed: spanning tree rooted at mu4") != std::string::npos);
}

TEST_CASE("verify reports the recorded discrepancies without failing") {
    auto team = run("verify " + fx("team.morph") + " --claims " + fx("team.claims"));
    CHECK(team.exit_code == 0);
    CHECK(team.output.find("MATCH tau1_S1 N=(2;4,0,0)") != std::string::npos);
    CHECK(team.output.find("MATCH tau1_S2 N=(3;3,1,0)") != std::string::npos);
    CHECK(team.output.find(
              "MISMATCH alpha_team expected=(3;4,0,0) recomputed=(2;4,0,0)") !=
          std::string::npos);

    auto medical = run("verify " + fx("medical.morph") + " --claims " + fx("medical.claims"));
    CHECK(medical.exit_code == 0);
    CHECK(medical.output.find("MISMATCH X3 expected=(3;2,0,0) recomputed=(2;2,0,0)") !=
          std::string::npos);
    CHECK(medical.output.find("MATCH Y1 N=(3;2,1,0,0)") != std::string::npos);
}

TEST_CASE("export renders networks and trajectories") {
    auto plan = run("export " + fx("medical.morph") + " --network plan");
    CHECK(plan.exit_code == 0);
    CHECK(plan.output.find("a0 [shape=diamond];") != std::string::npos);

    auto traj = run("export " + fx("medical.morph") + " --network plan --trajectory final");
    CHECK(traj.exit_code == 0);
    CHECK(traj.output.find("S_mu4_3") != std::string::npos);

    CHECK(run("export " + fx("medical.morph") + " --network nope").exit_code == 1);
}

TEST_CASE("json output mirrors the text results") {
    auto got = run("synth " + fx("team.morph") + " --structure tau1 --json");
    CHECK(got.exit_code == 0);
    auto parsed = nlohmann::json::parse(got.output);
    REQUIRE(parsed["nodes"].size() == 1);
    auto sols = parsed["nodes"][0]["solutions"];
    REQUIRE(sols.size() == 2);
    CHECK(sols[0]["selection"] == "L2*R1*E1*M0");
    CHECK(sols[0]["quality"]["text"] == "(3;3,1,0)");

    auto verify = run("verify " + fx("team.morph") + " --claims " + fx("team.claims") + " --json");
    CHECK(verify.exit_code == 0);
    auto vj = nlohmann::json::parse(verify.output);
    CHECK(vj["breach"] == false);
    bool found = false;
    for (const auto& claim : vj["claims"])
        if (claim["name"] == "alpha_team") {
            found = true;
            CHECK(claim["status"] == "MISMATCH");
            CHECK(claim["recomputed"] == "(2;4,0,0)");
        }
    CHECK(found);
}
