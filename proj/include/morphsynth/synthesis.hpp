#pragma once

#include <functional>
#include <future>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "model.hpp"
#include "quality.hpp"

namespace morphsynth {

enum class MissingEntryPolicy { StrictError, Assume };
enum class PriorityRule { ParetoLayer, Declared };

struct SynthesisConfig {
    int layer_depth = 1;
    MissingEntryPolicy missing_entries = MissingEntryPolicy::StrictError;
    int assumed_value = 0;  // used when missing_entries == Assume
    bool admit_zero = false;
    PriorityRule priority_rule = PriorityRule::ParetoLayer;
    unsigned threads = 1;

    static SynthesisConfig all_layers() {
        SynthesisConfig cfg;
        cfg.layer_depth = 1 << 20;
        return cfg;
    }
};

struct CompositeSolution {
    std::string name;
    std::vector<std::pair<std::string, std::string>> selection;  // child -> option
    QualityVector quality;
    int layer = 1;

    std::string selection_string() const {
        std::string s;
        for (std::size_t i = 0; i < selection.size(); ++i) {
            if (i) s += "*";
            s += selection[i].second;
        }
        return s;
    }
};

using SolutionsByNode = std::map<std::string, std::vector<CompositeSolution>>;

namespace detail {

struct Choice {
    std::string id;
    int priority = 1;
};

struct ChoiceSet {
    std::string child_id;
    std::vector<Choice> options;
};

// Resolves the selectable options per child of `node`. Component children
// contribute their alternatives; composite children contribute declared
// solutions (declared rule) or previously synthesized ones whose priority
// is the Pareto layer index.
inline std::vector<ChoiceSet> build_choice_sets(const MorphStructure& s, const CompositeNode& node,
                                                const SynthesisConfig& cfg,
                                                const SolutionsByNode* child_solutions) {
    std::vector<ChoiceSet> sets;
    for (const auto& child : node.children) {
        ChoiceSet cs;
        cs.child_id = child;
        if (const Component* c = s.find_component(child)) {
            for (const auto& a : c->alternatives) cs.options.push_back({a.id, a.priority});
        } else if (s.find_node(child)) {
            const NodeSolutions* declared = s.find_solutions(child);
            if (cfg.priority_rule == PriorityRule::Declared && declared) {
                for (const auto& d : declared->entries) {
                    if (!d.has_priority)
                        throw Error("solution '" + d.name + "' of node '" + child +
                                    "' has no declared priority");
                    cs.options.push_back({d.name, d.priority});
                }
            } else if (child_solutions && child_solutions->count(child)) {
                for (const auto& sol : child_solutions->at(child))
                    cs.options.push_back({sol.name, sol.layer});
            } else if (cfg.priority_rule == PriorityRule::Declared && !declared) {
                throw Error("node '" + child + "' has no declared solutions");
            } else {
                throw Error("node '" + child +
                            "' is composite; synthesize the hierarchy or declare its solutions");
            }
        } else {
            throw Error("node '" + node.id + "' references unknown child '" + child + "'");
        }
        if (cs.options.empty()) throw Error("child '" + child + "' offers no options");
        sets.push_back(std::move(cs));
    }
    return sets;
}

inline int tier_depth_of(const std::vector<ChoiceSet>& sets) {
    int depth = 1;
    for (const auto& cs : sets)
        for (const auto& o : cs.options) depth = std::max(depth, o.priority);
    return depth;
}

// Pairwise compatibility of two chosen options, honoring the missing-entry
// policy.
inline int pair_value(const CompatEntries& compat, const std::string& a, const std::string& b,
                      const SynthesisConfig& cfg) {
    if (auto v = compat_lookup(compat, a, b)) return v->value;
    if (cfg.missing_entries == MissingEntryPolicy::Assume) return cfg.assumed_value;
    throw Error("missing compatibility entry (" + a + "," + b + ")");
}

// Depth-first cartesian enumeration. Partial selections containing a
// zero-compatibility pair are abandoned unless zero-w compositions are
// admitted.
inline void enumerate_feasible(const std::vector<ChoiceSet>& sets, const CompatEntries& compat,
                               const SynthesisConfig& cfg, int scale_max, std::size_t first_lo,
                               std::size_t first_hi,
                               std::vector<std::pair<std::vector<int>, int>>& out) {
    std::vector<int> picked(sets.size(), -1);
    std::function<void(std::size_t, int)> walk = [&](std::size_t depth, int w) {
        if (depth == sets.size()) {
            out.push_back({picked, w});
            return;
        }
        std::size_t lo = depth == 0 ? first_lo : 0;
        std::size_t hi = depth == 0 ? first_hi : sets[depth].options.size();
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& opt = sets[depth].options[i];
            int w2 = w;
            bool dead = false;
            for (std::size_t d = 0; d < depth; ++d) {
                int v = pair_value(compat, sets[d].options[picked[d]].id, opt.id, cfg);
                if (v == 0 && !cfg.admit_zero) {
                    dead = true;
                    break;
                }
                w2 = std::min(w2, v);
            }
            if (dead) continue;
            picked[depth] = static_cast<int>(i);
            walk(depth + 1, w2);
            picked[depth] = -1;
        }
    };
    walk(0, scale_max);
}

inline std::vector<std::pair<std::vector<int>, int>> enumerate_node(
    const std::vector<ChoiceSet>& sets, const CompatEntries& compat, const SynthesisConfig& cfg,
    int scale_max) {
    long long space = 1;
    for (const auto& cs : sets) space *= static_cast<long long>(cs.options.size());

    unsigned threads = std::max(1u, cfg.threads);
    std::size_t first = sets.front().options.size();
    if (threads <= 1 || space < 256 || first < 2) {
        std::vector<std::pair<std::vector<int>, int>> out;
        enumerate_feasible(sets, compat, cfg, scale_max, 0, first, out);
        return out;
    }

    // Split the first child's options across workers; chunk results are
    // concatenated in chunk order, so the outcome is schedule-independent.
    unsigned chunks = std::min<unsigned>(threads, static_cast<unsigned>(first));
    std::vector<std::future<std::vector<std::pair<std::vector<int>, int>>>> futures;
    for (unsigned k = 0; k < chunks; ++k) {
        std::size_t lo = first * k / chunks;
        std::size_t hi = first * (k + 1) / chunks;
        futures.push_back(std::async(std::launch::async, [&, lo, hi] {
            std::vector<std::pair<std::vector<int>, int>> part;
            enumerate_feasible(sets, compat, cfg, scale_max, lo, hi, part);
            return part;
        }));
    }
    std::vector<std::pair<std::vector<int>, int>> out;
    for (auto& f : futures) {
        auto part = f.get();
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

inline QualityVector make_quality(const std::vector<ChoiceSet>& sets, const std::vector<int>& pick,
                                  int w, int tier_depth) {
    QualityVector q;
    q.w = w;
    q.tiers.assign(static_cast<std::size_t>(tier_depth), 0);
    for (std::size_t i = 0; i < sets.size(); ++i)
        ++q.tiers[static_cast<std::size_t>(sets[i].options[pick[i]].priority - 1)];
    return q;
}

}  // namespace detail

// Quality of one explicit selection at a composite node: w is the minimum
// pairwise compatibility across the chosen options (vacuously the scale
// maximum for single-child nodes), n counts choices per priority tier.
inline QualityVector quality_of(const MorphStructure& s, const std::string& node_id,
                                const std::vector<std::string>& picks,
                                const SynthesisConfig& cfg = {}) {
    const CompositeNode* node = s.find_node(node_id);
    if (!node) throw Error("unknown node '" + node_id + "'");

    struct Chosen {
        std::string id;
        int priority;
    };
    std::vector<Chosen> chosen(node->children.size(), {"", 0});
    int tier_depth = 1;
    for (std::size_t ci = 0; ci < node->children.size(); ++ci) {
        const auto& child = node->children[ci];
        if (const Component* c = s.find_component(child)) {
            for (const auto& a : c->alternatives) {
                tier_depth = std::max(tier_depth, a.priority);
                for (const auto& p : picks)
                    if (p == a.id) chosen[ci] = {a.id, a.priority};
            }
        } else {
            const NodeSolutions* ns = s.find_solutions(child);
            if (ns) {
                for (const auto& d : ns->entries) {
                    tier_depth = std::max(tier_depth, d.priority);
                    for (const auto& p : picks)
                        if (p == d.name) chosen[ci] = {d.name, d.priority};
                }
            }
        }
        if (chosen[ci].id.empty())
            throw Error("selection does not cover child '" + child + "' of node '" + node_id +
                        "'");
    }
    if (picks.size() != node->children.size())
        throw Error("selection size " + std::to_string(picks.size()) + " does not match node '" +
                    node_id + "' arity " + std::to_string(node->children.size()));

    QualityVector q;
    q.w = s.scale_max;
    q.tiers.assign(static_cast<std::size_t>(tier_depth), 0);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        ++q.tiers[static_cast<std::size_t>(chosen[i].priority - 1)];
        for (std::size_t j = i + 1; j < chosen.size(); ++j)
            q.w = std::min(q.w, detail::pair_value(s.compat, chosen[i].id, chosen[j].id, cfg));
    }
    return q;
}

// Enumerates the composition space of one node, drops infeasible
// compositions, and returns Pareto layers up to cfg.layer_depth. Output is
// deterministic: layers ascending, within a layer w descending, tier prefix
// sums descending, then selection text.
inline std::vector<CompositeSolution> synthesize_node(
    const MorphStructure& s, const std::string& node_id, const SynthesisConfig& cfg = {},
    const SolutionsByNode* child_solutions = nullptr) {
    const CompositeNode* node = s.find_node(node_id);
    if (!node) throw Error("unknown node '" + node_id + "'");

    auto sets = detail::build_choice_sets(s, *node, cfg, child_solutions);
    int tier_depth = detail::tier_depth_of(sets);
    auto feasible = detail::enumerate_node(sets, s.compat, cfg, s.scale_max);

    std::vector<CompositeSolution> pool;
    std::vector<QualityItem> items;
    for (const auto& [pick, w] : feasible) {
        if (w == 0 && !cfg.admit_zero) continue;
        CompositeSolution sol;
        for (std::size_t i = 0; i < sets.size(); ++i)
            sol.selection.push_back({sets[i].child_id, sets[i].options[pick[i]].id});
        sol.quality = detail::make_quality(sets, pick, w, tier_depth);
        items.push_back({sol.selection_string(), sol.quality});
        pool.push_back(std::move(sol));
    }

    auto layers = pareto_layers(items, cfg.layer_depth);
    std::vector<CompositeSolution> out;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        for (std::size_t idx : layers[li]) {
            CompositeSolution sol = pool[idx];
            sol.layer = static_cast<int>(li + 1);
            sol.name = node_id + std::to_string(out.size() + 1);
            out.push_back(std::move(sol));
        }
    }
    return out;
}

// Bottom-up synthesis over the whole structure tree. Each composite node is
// synthesized after its composite children; the children's retained
// solutions act as virtual alternatives at the parent, prioritized by layer
// index or by declared priority per cfg.priority_rule.
inline SolutionsByNode synthesize_hierarchy(const MorphStructure& s,
                                            const SynthesisConfig& cfg = {}) {
    if (s.nodes.empty()) throw Error("structure '" + s.name + "' declares no composite node");
    SolutionsByNode result;
    std::function<void(const std::string&)> build = [&](const std::string& id) {
        const CompositeNode* node = s.find_node(id);
        if (!node) throw Error("unknown node '" + id + "'");
        for (const auto& child : node->children)
            if (s.find_node(child) && !result.count(child)) build(child);
        result[id] = synthesize_node(s, id, cfg, &result);
    };
    build(s.root_id());
    return result;
}

}  // namespace morphsynth
