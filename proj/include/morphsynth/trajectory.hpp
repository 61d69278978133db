#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "quality.hpp"
#include "synthesis.hpp"

namespace morphsynth {

enum class AggregationMode { Adjacent, AllPairs };

struct LocalSolution {
    std::string name;
    int priority = 1;
};

struct TrajectoryPoint {
    std::string id;
    std::vector<LocalSolution> solutions;
};

struct InterPointCompat {
    int scale_max = 3;
    CompatEntries entries;  // keys "point.solution"

    static std::string ref(const std::string& point, const std::string& solution) {
        return point + "." + solution;
    }
};

struct Trajectory {
    std::vector<std::pair<std::string, std::string>> assignment;  // point -> solution
    QualityVector quality;
    int layer = 1;

    std::string to_string() const {
        std::string s = "<";
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            if (i) s += " * ";
            s += assignment[i].second;
        }
        s += ">";
        return s;
    }

    std::string key() const {
        std::string s;
        for (const auto& [p, sol] : assignment) {
            if (!s.empty()) s += "*";
            s += p + "." + sol;
        }
        return s;
    }
};

using OutcomeAssignment = std::map<std::string, std::string>;

struct DecisionPath {
    std::vector<std::string> points;
    bool truncated = false;
};

namespace detail {

inline int traj_pair_value(const InterPointCompat& compat, const std::string& pa,
                           const std::string& sa, const std::string& pb, const std::string& sb,
                           const SynthesisConfig& cfg) {
    if (auto v = compat_lookup(compat.entries, InterPointCompat::ref(pa, sa),
                               InterPointCompat::ref(pb, sb)))
        return v->value;
    if (cfg.missing_entries == MissingEntryPolicy::Assume) return cfg.assumed_value;
    throw Error("missing inter-point compatibility entry (" + pa + "." + sa + "," + pb + "." +
                sb + ")");
}

// Shared assignment enumerator: one solution per point, w = min over the
// given pair set, Pareto layers over the feasible assignments.
inline std::vector<Trajectory> assignments_over_pairs(
    const std::vector<TrajectoryPoint>& points,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs, const InterPointCompat& compat,
    const SynthesisConfig& cfg, int tier_depth) {
    for (const auto& p : points)
        if (p.solutions.empty()) throw Error("point '" + p.id + "' has no local solutions");

    int depth = tier_depth;
    for (const auto& p : points)
        for (const auto& s : p.solutions) depth = std::max(depth, s.priority);
    depth = std::max(depth, 1);

    // pairs whose second endpoint is i, for pruning during the walk
    std::vector<std::vector<std::size_t>> incoming(points.size());
    for (std::size_t k = 0; k < pairs.size(); ++k)
        incoming[std::max(pairs[k].first, pairs[k].second)].push_back(k);

    std::vector<Trajectory> pool;
    std::vector<int> pick(points.size(), -1);
    std::function<void(std::size_t, int)> walk = [&](std::size_t at, int w) {
        if (at == points.size()) {
            Trajectory t;
            t.quality.w = w;
            t.quality.tiers.assign(static_cast<std::size_t>(depth), 0);
            for (std::size_t i = 0; i < points.size(); ++i) {
                const auto& sol = points[i].solutions[static_cast<std::size_t>(pick[i])];
                t.assignment.push_back({points[i].id, sol.name});
                ++t.quality.tiers[static_cast<std::size_t>(sol.priority - 1)];
            }
            pool.push_back(std::move(t));
            return;
        }
        for (std::size_t i = 0; i < points[at].solutions.size(); ++i) {
            pick[at] = static_cast<int>(i);
            int w2 = w;
            bool dead = false;
            for (std::size_t k : incoming[at]) {
                auto [a, b] = pairs[k];
                int v = traj_pair_value(compat, points[a].id,
                                        points[a].solutions[static_cast<std::size_t>(pick[a])].name,
                                        points[b].id,
                                        points[b].solutions[static_cast<std::size_t>(pick[b])].name,
                                        cfg);
                if (v == 0 && !cfg.admit_zero) {
                    dead = true;
                    break;
                }
                w2 = std::min(w2, v);
            }
            if (!dead) walk(at + 1, w2);
            pick[at] = -1;
        }
    };
    walk(0, compat.scale_max);

    std::vector<QualityItem> items;
    for (const auto& t : pool) items.push_back({t.key(), t.quality});
    auto layers = pareto_layers(items, cfg.layer_depth);

    std::vector<Trajectory> out;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        for (std::size_t idx : layers[li]) {
            Trajectory t = pool[idx];
            t.layer = static_cast<int>(li + 1);
            out.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace detail

// Multistage chain: w aggregates either neighbor pairs only or every
// cross-point pair.
inline std::vector<Trajectory> chain_trajectories(const std::vector<TrajectoryPoint>& points,
                                                  const InterPointCompat& compat,
                                                  AggregationMode mode,
                                                  const SynthesisConfig& cfg = {},
                                                  int tier_depth = 0) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (mode == AggregationMode::Adjacent) {
        for (std::size_t i = 0; i + 1 < points.size(); ++i) pairs.push_back({i, i + 1});
    } else {
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j) pairs.push_back({i, j});
    }
    return detail::assignments_over_pairs(points, pairs, compat, cfg, tier_depth);
}

namespace detail {

inline std::vector<TrajectoryPoint> morph_points_of(const TopLevelNetwork& net) {
    std::vector<TrajectoryPoint> points;
    for (const auto& n : net.nodes) {
        if (n.is_analysis) continue;
        TrajectoryPoint p;
        p.id = n.id;
        for (const auto& d : n.solutions)
            p.solutions.push_back({d.name, d.has_priority ? d.priority : 1});
        points.push_back(std::move(p));
    }
    return points;
}

inline std::vector<std::pair<std::size_t, std::size_t>> arc_pairs(
    const TopLevelNetwork& net, const std::vector<TrajectoryPoint>& points) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < points.size(); ++i) index[points[i].id] = i;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& a : net.arcs()) {
        auto f = index.find(a.from), t = index.find(a.to);
        if (f == index.end() || t == index.end()) continue;
        auto key = std::minmax(f->second, t->second);
        if (seen.insert({key.first, key.second}).second)
            pairs.push_back({key.first, key.second});
    }
    return pairs;
}

}  // namespace detail

// Trajectories over an acyclic network of morph points: one solution per
// point, w taken over the arc-connected pairs. Trees use exactly their tree
// edges, mirroring the chain's adjacent mode.
inline std::vector<Trajectory> network_trajectories(const TopLevelNetwork& net,
                                                    const InterPointCompat& compat,
                                                    const SynthesisConfig& cfg = {},
                                                    int tier_depth = 0) {
    for (const auto& n : net.nodes)
        if (n.is_analysis)
            throw Error("network '" + net.name +
                        "' contains analysis points; resolve outcomes first");
    if (!network_is_acyclic(net)) throw Error("network '" + net.name + "' is cyclic");
    auto points = detail::morph_points_of(net);
    if (points.empty()) return {};
    auto pairs = detail::arc_pairs(net, points);
    return detail::assignments_over_pairs(points, pairs, compat, cfg, tier_depth);
}

inline std::vector<Trajectory> tree_trajectories(const TopLevelNetwork& net,
                                                 const InterPointCompat& compat,
                                                 const SynthesisConfig& cfg = {},
                                                 int tier_depth = 0) {
    for (const auto& n : net.nodes)
        if (n.is_analysis)
            throw Error("tree trajectories require a network of morph points only");
    TopLevelNetwork probe = net;
    probe.shape = ShapeHint::Tree;
    if (!validate_network(probe).valid())
        throw Error("network '" + net.name + "' is not a tree");
    return network_trajectories(net, compat, cfg, tier_depth);
}

// Walks the network from `start`. Morph points follow their unique outgoing
// arc, analysis points follow the branch named by `outcomes`. The walk stops
// at a sink or, on cyclic networks, once step_limit morph points were
// collected.
inline DecisionPath execute_decision_path(const TopLevelNetwork& net, const std::string& start,
                                          const OutcomeAssignment& outcomes, int step_limit) {
    if (step_limit < 1) throw Error("step limit must be positive");
    if (!net.find_node(start)) throw Error("unknown start node '" + start + "'");

    auto arcs = net.arcs();
    DecisionPath path;
    std::string cur = start;
    int guard = 0;
    for (;;) {
        if (++guard > 4 * step_limit + 16) {
            path.truncated = true;
            break;
        }
        const NetworkNode* node = net.find_node(cur);
        if (!node) throw Error("walk reached unknown node '" + cur + "'");

        if (node->is_analysis) {
            auto it = outcomes.find(cur);
            if (it == outcomes.end())
                throw Error("unresolved analysis point '" + cur + "' (no outcome supplied)");
            const Branch* chosen = nullptr;
            for (const auto& b : node->branches)
                if (b.outcome == it->second) chosen = &b;
            if (!chosen)
                throw Error("analysis point '" + cur + "' has no outcome \"" + it->second + "\"");
            cur = chosen->target;
            continue;
        }

        path.points.push_back(cur);
        std::vector<std::string> next;
        for (const auto& a : arcs)
            if (a.from == cur) next.push_back(a.to);
        if (next.empty()) break;
        if (next.size() > 1)
            throw Error("morph point '" + cur + "' has " + std::to_string(next.size()) +
                        " successors; outcome-driven walks need unique successors");
        if (static_cast<int>(path.points.size()) >= step_limit) {
            path.truncated = true;
            break;
        }
        cur = next.front();
    }
    return path;
}

// Chain synthesis over an explicit directed path of morph points.
inline std::vector<Trajectory> chain_for_path(const TopLevelNetwork& net,
                                              const std::vector<std::string>& path,
                                              const InterPointCompat& compat, AggregationMode mode,
                                              const SynthesisConfig& cfg = {},
                                              int tier_depth = 0) {
    std::vector<TrajectoryPoint> points;
    auto arcs = net.arcs();
    for (std::size_t i = 0; i < path.size(); ++i) {
        const NetworkNode* node = net.find_node(path[i]);
        if (!node) throw Error("unknown node '" + path[i] + "' in path");
        if (node->is_analysis) throw Error("path must contain morph points only");
        if (i > 0) {
            bool connected = false;
            for (const auto& a : arcs) connected |= a.from == path[i - 1] && a.to == path[i];
            if (!connected)
                throw Error("path is not directed: no arc " + path[i - 1] + "->" + path[i]);
        }
        TrajectoryPoint p;
        p.id = node->id;
        for (const auto& d : node->solutions)
            p.solutions.push_back({d.name, d.has_priority ? d.priority : 1});
        points.push_back(std::move(p));
    }
    return chain_trajectories(points, compat, mode, cfg, tier_depth);
}

// Breadth-first spanning arborescence rooted at `root`; ties broken by arc
// declaration order. Node set is preserved and must be fully reachable.
inline TopLevelNetwork spanning_tree(const TopLevelNetwork& net, const std::string& root) {
    if (!net.find_node(root)) throw Error("unknown root '" + root + "'");
    auto arcs = net.arcs();

    std::set<std::string> visited{root};
    std::vector<std::string> queue{root};
    std::set<std::size_t> keep;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        for (std::size_t ai = 0; ai < arcs.size(); ++ai) {
            if (arcs[ai].from != queue[qi]) continue;
            if (visited.insert(arcs[ai].to).second) {
                keep.insert(ai);
                queue.push_back(arcs[ai].to);
            }
        }
    }
    for (const auto& n : net.nodes)
        if (!visited.count(n.id))
            throw Error("node '" + n.id + "' unreachable from root '" + root + "'");

    TopLevelNetwork out = net;
    out.shape = ShapeHint::Tree;
    out.edges.clear();
    std::size_t arc_idx = 0;
    for (const auto& e : net.edges) {
        if (keep.count(arc_idx)) out.edges.push_back(e);
        ++arc_idx;
    }
    for (auto& n : out.nodes) {
        std::vector<Branch> kept;
        const NetworkNode* orig = net.find_node(n.id);
        for (const auto& b : orig->branches) {
            // branch arcs follow the explicit edges, in node/branch order
            if (keep.count(arc_idx)) kept.push_back(b);
            ++arc_idx;
        }
        n.branches = std::move(kept);
    }
    return out;
}

// Removes every back arc found by depth-first search from the declared
// roots, leaving an acyclic network with all nodes and all non-back arcs.
inline TopLevelNetwork simplify_network(const TopLevelNetwork& net) {
    std::vector<std::size_t> back;
    detail::find_back_arcs(net, back);
    if (back.empty()) return net;

    std::set<std::size_t> drop(back.begin(), back.end());
    TopLevelNetwork out = net;
    out.shape = ShapeHint::Dag;
    out.edges.clear();
    std::size_t arc_idx = 0;
    for (const auto& e : net.edges) {
        if (!drop.count(arc_idx)) out.edges.push_back(e);
        ++arc_idx;
    }
    for (auto& n : out.nodes) {
        std::vector<Branch> kept;
        const NetworkNode* orig = net.find_node(n.id);
        for (const auto& b : orig->branches) {
            if (!drop.count(arc_idx)) kept.push_back(b);
            ++arc_idx;
        }
        n.branches = std::move(kept);
    }
    return out;
}

}  // namespace morphsynth
