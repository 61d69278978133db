#pragma once

// Brute-force reference implementations used by the tests and the `verify`
// command. Everything here recomputes quality, dominance, and layering from
// first principles: no pruning, no code shared with the engine's
// enumeration, comparison, or peeling paths.

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "synthesis.hpp"
#include "trajectory.hpp"

namespace morphsynth::oracle {

constexpr long long kDefaultCap = 1'000'000;

namespace detail {

struct Option {
    std::string id;
    int priority = 1;
};

struct Axis {
    std::string child_id;
    std::vector<Option> options;
};

// w >= b.w and all tier prefix sums at least as large, computed afresh
inline bool weakly_dominates(const QualityVector& a, const QualityVector& b) {
    if (a.w < b.w) return false;
    std::size_t len = a.tiers.size() > b.tiers.size() ? a.tiers.size() : b.tiers.size();
    long long pa = 0, pb = 0;
    for (std::size_t r = 0; r < len; ++r) {
        pa += r < a.tiers.size() ? a.tiers[r] : 0;
        pb += r < b.tiers.size() ? b.tiers[r] : 0;
        if (pa < pb) return false;
    }
    return true;
}

inline bool same_quality(const QualityVector& a, const QualityVector& b) {
    return weakly_dominates(a, b) && weakly_dominates(b, a);
}

inline bool strict(const QualityVector& a, const QualityVector& b) {
    return weakly_dominates(a, b) && !same_quality(a, b);
}

template <typename T>
inline bool order_before(const T& a, const T& b) {
    if (a.quality.w != b.quality.w) return a.quality.w > b.quality.w;
    std::size_t len =
        a.quality.tiers.size() > b.quality.tiers.size() ? a.quality.tiers.size() : b.quality.tiers.size();
    long long pa = 0, pb = 0;
    for (std::size_t r = 0; r < len; ++r) {
        pa += r < a.quality.tiers.size() ? a.quality.tiers[r] : 0;
        pb += r < b.quality.tiers.size() ? b.quality.tiers[r] : 0;
        if (pa != pb) return pa > pb;
    }
    return a.sort_id < b.sort_id;
}

// repeated full scans: an item belongs to the current layer when nothing
// still unassigned strictly dominates it
template <typename T>
inline void peel_layers(std::vector<T>& items, int layer_depth) {
    std::vector<int> layer_of(items.size(), 0);
    int layer = 0;
    std::size_t assigned = 0;
    while (assigned < items.size()) {
        ++layer;
        std::vector<std::size_t> current;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (layer_of[i]) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < items.size(); ++j)
                if (!layer_of[j] && j != i && strict(items[j].quality, items[i].quality))
                    dominated = true;
            if (!dominated) current.push_back(i);
        }
        for (std::size_t i : current) layer_of[i] = layer;
        assigned += current.size();
    }
    std::vector<T> kept;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (layer_of[i] <= layer_depth) {
            items[i].layer = layer_of[i];
            kept.push_back(items[i]);
        }
    }
    std::sort(kept.begin(), kept.end(), [](const T& a, const T& b) {
        if (a.layer != b.layer) return a.layer < b.layer;
        return order_before(a, b);
    });
    items = std::move(kept);
}

inline int lookup_or_policy(const CompatEntries& entries, const std::string& a,
                            const std::string& b, const SynthesisConfig& cfg) {
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    auto it = entries.find(key);
    if (it != entries.end()) return it->second.value;
    if (cfg.missing_entries == MissingEntryPolicy::Assume) return cfg.assumed_value;
    throw Error("oracle: missing compatibility entry (" + a + "," + b + ")");
}

inline std::vector<Axis> structure_axes(const MorphStructure& s, const CompositeNode& node,
                                        const SynthesisConfig& cfg,
                                        const SolutionsByNode* child_solutions) {
    std::vector<Axis> axes;
    for (const auto& child : node.children) {
        Axis ax;
        ax.child_id = child;
        if (const Component* c = s.find_component(child)) {
            for (const auto& a : c->alternatives) ax.options.push_back({a.id, a.priority});
        } else {
            const NodeSolutions* declared = s.find_solutions(child);
            if (cfg.priority_rule == PriorityRule::Declared && declared) {
                for (const auto& d : declared->entries) {
                    if (!d.has_priority)
                        throw Error("oracle: solution '" + d.name + "' has no declared priority");
                    ax.options.push_back({d.name, d.priority});
                }
            } else if (child_solutions && child_solutions->count(child)) {
                for (const auto& sol : child_solutions->at(child))
                    ax.options.push_back({sol.name, sol.layer});
            } else {
                throw Error("oracle: no options for composite child '" + child + "'");
            }
        }
        axes.push_back(std::move(ax));
    }
    return axes;
}

struct RankedSolution {
    CompositeSolution value;
    QualityVector quality;
    std::string sort_id;
    int layer = 1;
};

}  // namespace detail

// Exhaustive counterpart of synthesize_node: materializes the whole
// cartesian product, evaluates every composition directly from the
// definition, filters, peels, sorts.
inline std::vector<CompositeSolution> oracle_synthesize(
    const MorphStructure& s, const std::string& node_id, const SynthesisConfig& cfg = {},
    const SolutionsByNode* child_solutions = nullptr, long long cap = kDefaultCap) {
    const CompositeNode* node = s.find_node(node_id);
    if (!node) throw Error("oracle: unknown node '" + node_id + "'");
    auto axes = detail::structure_axes(s, *node, cfg, child_solutions);

    long long space = 1;
    for (const auto& ax : axes) {
        if (ax.options.empty()) return {};
        space *= static_cast<long long>(ax.options.size());
        if (space > cap) throw Error("oracle: composition space exceeds cap");
    }

    int tier_depth = 1;
    for (const auto& ax : axes)
        for (const auto& o : ax.options)
            if (o.priority > tier_depth) tier_depth = o.priority;

    std::vector<detail::RankedSolution> ranked;
    std::vector<std::size_t> odo(axes.size(), 0);
    for (long long step = 0; step < space; ++step) {
        long long rem = step;
        for (std::size_t i = axes.size(); i-- > 0;) {
            odo[i] = static_cast<std::size_t>(rem % axes[i].options.size());
            rem /= static_cast<long long>(axes[i].options.size());
        }

        int w = s.scale_max;
        for (std::size_t i = 0; i < axes.size(); ++i)
            for (std::size_t j = i + 1; j < axes.size(); ++j) {
                int v = detail::lookup_or_policy(s.compat, axes[i].options[odo[i]].id,
                                                 axes[j].options[odo[j]].id, cfg);
                if (v < w) w = v;
            }
        if (w == 0 && !cfg.admit_zero) continue;

        detail::RankedSolution r;
        r.quality.w = w;
        r.quality.tiers.assign(static_cast<std::size_t>(tier_depth), 0);
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const auto& o = axes[i].options[odo[i]];
            r.value.selection.push_back({axes[i].child_id, o.id});
            r.quality.tiers[static_cast<std::size_t>(o.priority - 1)] += 1;
        }
        r.value.quality = r.quality;
        r.sort_id = r.value.selection_string();
        ranked.push_back(std::move(r));
    }

    detail::peel_layers(ranked, cfg.layer_depth);

    std::vector<CompositeSolution> out;
    for (auto& r : ranked) {
        r.value.layer = r.layer;
        r.value.name = node_id + std::to_string(out.size() + 1);
        out.push_back(std::move(r.value));
    }
    return out;
}

namespace detail {

struct RankedTrajectory {
    Trajectory value;
    QualityVector quality;
    std::string sort_id;
    int layer = 1;
};

inline std::vector<Trajectory> assignments(const std::vector<TrajectoryPoint>& points,
                                           const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                           const InterPointCompat& compat,
                                           const SynthesisConfig& cfg, int tier_depth,
                                           long long cap) {
    long long space = 1;
    for (const auto& p : points) {
        if (p.solutions.empty()) throw Error("oracle: point '" + p.id + "' has no solutions");
        space *= static_cast<long long>(p.solutions.size());
        if (space > cap) throw Error("oracle: assignment space exceeds cap");
    }

    int depth = tier_depth;
    for (const auto& p : points)
        for (const auto& s : p.solutions)
            if (s.priority > depth) depth = s.priority;
    if (depth < 1) depth = 1;

    std::vector<RankedTrajectory> ranked;
    std::vector<std::size_t> odo(points.size(), 0);
    for (long long step = 0; step < space; ++step) {
        long long rem = step;
        for (std::size_t i = points.size(); i-- > 0;) {
            odo[i] = static_cast<std::size_t>(rem % points[i].solutions.size());
            rem /= static_cast<long long>(points[i].solutions.size());
        }

        int w = compat.scale_max;
        for (const auto& [a, b] : pairs) {
            std::string ra = points[a].id + "." + points[a].solutions[odo[a]].name;
            std::string rb = points[b].id + "." + points[b].solutions[odo[b]].name;
            int v = lookup_or_policy(compat.entries, ra, rb, cfg);
            if (v < w) w = v;
        }
        if (w == 0 && !cfg.admit_zero) continue;

        RankedTrajectory r;
        r.quality.w = w;
        r.quality.tiers.assign(static_cast<std::size_t>(depth), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& sol = points[i].solutions[odo[i]];
            r.value.assignment.push_back({points[i].id, sol.name});
            r.quality.tiers[static_cast<std::size_t>(sol.priority - 1)] += 1;
        }
        r.value.quality = r.quality;
        r.sort_id = r.value.key();
        ranked.push_back(std::move(r));
    }

    peel_layers(ranked, cfg.layer_depth);

    std::vector<Trajectory> out;
    for (auto& r : ranked) {
        r.value.layer = r.layer;
        out.push_back(std::move(r.value));
    }
    return out;
}

}  // namespace detail

inline std::vector<Trajectory> oracle_chain(const std::vector<TrajectoryPoint>& points,
                                            const InterPointCompat& compat, AggregationMode mode,
                                            const SynthesisConfig& cfg = {}, int tier_depth = 0,
                                            long long cap = kDefaultCap) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (mode == AggregationMode::Adjacent) {
        for (std::size_t i = 0; i + 1 < points.size(); ++i) pairs.push_back({i, i + 1});
    } else {
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j) pairs.push_back({i, j});
    }
    return detail::assignments(points, pairs, compat, cfg, tier_depth, cap);
}

inline std::vector<Trajectory> oracle_network(const TopLevelNetwork& net,
                                              const InterPointCompat& compat,
                                              const SynthesisConfig& cfg = {}, int tier_depth = 0,
                                              long long cap = kDefaultCap) {
    std::vector<TrajectoryPoint> points;
    std::map<std::string, std::size_t> index;
    for (const auto& n : net.nodes) {
        if (n.is_analysis) throw Error("oracle: analysis points are not assignable");
        TrajectoryPoint p;
        p.id = n.id;
        for (const auto& d : n.solutions)
            p.solutions.push_back({d.name, d.has_priority ? d.priority : 1});
        index[p.id] = points.size();
        points.push_back(std::move(p));
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& a : net.arcs()) {
        std::size_t u = index.at(a.from), v = index.at(a.to);
        auto key = u < v ? std::make_pair(u, v) : std::make_pair(v, u);
        bool seen = false;
        for (const auto& p : pairs) seen |= p == key;
        if (!seen) pairs.push_back(key);
    }
    return detail::assignments(points, pairs, compat, cfg, tier_depth, cap);
}

// Direct recomputation of one composition's quality from the tables.
inline QualityVector oracle_quality(const MorphStructure& s, const std::string& node_id,
                                    const std::vector<std::string>& picks,
                                    const SynthesisConfig& cfg = {}) {
    const CompositeNode* node = s.find_node(node_id);
    if (!node) throw Error("oracle: unknown node '" + node_id + "'");

    int tier_depth = 1;
    std::vector<std::pair<std::string, int>> chosen;
    for (const auto& child : node->children) {
        std::string id;
        int priority = 0;
        if (const Component* c = s.find_component(child)) {
            for (const auto& a : c->alternatives) {
                if (a.priority > tier_depth) tier_depth = a.priority;
                for (const auto& p : picks)
                    if (p == a.id) {
                        id = a.id;
                        priority = a.priority;
                    }
            }
        } else if (const NodeSolutions* ns = s.find_solutions(child)) {
            for (const auto& d : ns->entries) {
                if (d.priority > tier_depth) tier_depth = d.priority;
                for (const auto& p : picks)
                    if (p == d.name) {
                        id = d.name;
                        priority = d.has_priority ? d.priority : 1;
                    }
            }
        }
        if (id.empty())
            throw Error("oracle: selection does not cover child '" + child + "'");
        chosen.push_back({id, priority});
    }

    QualityVector q;
    q.w = s.scale_max;
    q.tiers.assign(static_cast<std::size_t>(tier_depth), 0);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        q.tiers[static_cast<std::size_t>(chosen[i].second - 1)] += 1;
        for (std::size_t j = i + 1; j < chosen.size(); ++j) {
            int v = detail::lookup_or_policy(s.compat, chosen[i].first, chosen[j].first, cfg);
            if (v < q.w) q.w = v;
        }
    }
    return q;
}

}  // namespace morphsynth::oracle
