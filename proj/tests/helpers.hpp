#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <morphsynth/morphsynth.hpp>

namespace test_helpers {

inline std::string fixture_path(const std::string& name) {
    return std::string(MORPHSYNTH_FIXTURES) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(fixture_path(name), std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline morphsynth::MorphDocument parse_fixture(const std::string& name) {
    auto result = morphsynth::parse(read_fixture(name));
    if (!result.ok()) {
        std::string msg = "fixture " + name + " does not parse:";
        for (const auto& e : result.errors) msg += "\n  " + e.to_string();
        throw std::runtime_error(msg);
    }
    return std::move(result.doc);
}

// Local solution views for a network's morph points, declaration order.
inline std::vector<morphsynth::TrajectoryPoint> points_of(const morphsynth::TopLevelNetwork& net) {
    std::vector<morphsynth::TrajectoryPoint> out;
    for (const auto& n : net.nodes) {
        if (n.is_analysis) continue;
        morphsynth::TrajectoryPoint p;
        p.id = n.id;
        for (const auto& d : n.solutions)
            p.solutions.push_back({d.name, d.has_priority ? d.priority : 1});
        out.push_back(std::move(p));
    }
    return out;
}

// Seeded generator for random flat instances: up to `max_components`
// components with up to `max_alts` alternatives, priorities 1..3, a full
// compatibility table with values 0..3.
inline morphsynth::MorphStructure random_instance(std::mt19937& rng, int max_components = 5,
                                                  int max_alts = 4) {
    using namespace morphsynth;
    std::uniform_int_distribution<int> comp_count(2, max_components);
    std::uniform_int_distribution<int> alt_count(1, max_alts);
    std::uniform_int_distribution<int> priority(1, 3);
    std::uniform_int_distribution<int> value(0, 3);

    MorphStructure s;
    s.name = "random";
    s.scale_max = 3;
    int m = comp_count(rng);
    CompositeNode root;
    root.id = "S";
    for (int c = 0; c < m; ++c) {
        Component comp;
        comp.id = std::string(1, static_cast<char>('A' + c));
        int k = alt_count(rng);
        for (int a = 1; a <= k; ++a)
            comp.alternatives.push_back({comp.id + std::to_string(a), "", priority(rng)});
        root.children.push_back(comp.id);
        s.components.push_back(std::move(comp));
    }
    s.nodes.push_back(std::move(root));
    for (std::size_t i = 0; i < s.components.size(); ++i)
        for (std::size_t j = i + 1; j < s.components.size(); ++j)
            for (const auto& a : s.components[i].alternatives)
                for (const auto& b : s.components[j].alternatives)
                    s.compat[morphsynth::compat_key(a.id, b.id)] = {value(rng), false, {}};
    return s;
}

inline morphsynth::QualityVector random_quality(std::mt19937& rng, int max_w = 3,
                                                int max_tiers = 4, int max_count = 5) {
    std::uniform_int_distribution<int> w(0, max_w);
    std::uniform_int_distribution<int> len(1, max_tiers);
    std::uniform_int_distribution<int> count(0, max_count);
    morphsynth::QualityVector q;
    q.w = w(rng);
    int n = len(rng);
    for (int i = 0; i < n; ++i) q.tiers.push_back(count(rng));
    return q;
}

inline bool same_solutions(const std::vector<morphsynth::CompositeSolution>& a,
                           const std::vector<morphsynth::CompositeSolution>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].selection_string() != b[i].selection_string() || a[i].layer != b[i].layer ||
            !(a[i].quality == b[i].quality))
            return false;
    return true;
}

inline bool same_trajectories(const std::vector<morphsynth::Trajectory>& a,
                              const std::vector<morphsynth::Trajectory>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].key() != b[i].key() || a[i].layer != b[i].layer ||
            !(a[i].quality == b[i].quality))
            return false;
    return true;
}

}  // namespace test_helpers
