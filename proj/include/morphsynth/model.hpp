#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace morphsynth {

// Thrown on contract violations that cannot be expressed as report items:
// unresolved references, missing compatibility entries under a strict
// policy, exceeded enumeration caps.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DesignAlternative {
    std::string id;
    std::string label;
    int priority = 1;  // ordinal, 1 = best

    friend bool operator==(const DesignAlternative&, const DesignAlternative&) = default;
};

struct Component {
    std::string id;
    std::vector<DesignAlternative> alternatives;

    const DesignAlternative* find(const std::string& alt) const {
        for (const auto& a : alternatives)
            if (a.id == alt) return &a;
        return nullptr;
    }

    friend bool operator==(const Component&, const Component&) = default;
};

// Children are ids of components or of other composite nodes.
struct CompositeNode {
    std::string id;
    std::vector<std::string> children;

    friend bool operator==(const CompositeNode&, const CompositeNode&) = default;
};

struct CompatValue {
    int value = 0;
    bool assumed = false;
    std::string note;  // optional free text on assumed entries

    friend bool operator==(const CompatValue&, const CompatValue&) = default;
};

inline std::pair<std::string, std::string> compat_key(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
}

// Symmetric by construction: entries are stored under the normalized
// unordered pair of option names.
using CompatEntries = std::map<std::pair<std::string, std::string>, CompatValue>;

inline std::optional<CompatValue> compat_lookup(const CompatEntries& entries, const std::string& a,
                                                const std::string& b) {
    auto it = entries.find(compat_key(a, b));
    if (it == entries.end()) return std::nullopt;
    return it->second;
}

// A named composition declared in the input: one option per child of the
// owning composite node (structure level) or per component of a point's
// structure (network level).
struct DeclaredSolution {
    std::string name;
    std::vector<std::string> selection;
    int priority = 1;
    bool has_priority = false;

    friend bool operator==(const DeclaredSolution&, const DeclaredSolution&) = default;
};

struct NodeSolutions {
    std::string node;
    std::vector<DeclaredSolution> entries;

    friend bool operator==(const NodeSolutions&, const NodeSolutions&) = default;
};

struct MorphStructure {
    std::string name;
    bool partial = false;  // missing compat entries downgrade to warnings
    int scale_max = 3;     // nu, best compatibility level
    std::vector<Component> components;
    std::vector<CompositeNode> nodes;
    std::vector<NodeSolutions> solutions;
    CompatEntries compat;

    const Component* find_component(const std::string& id) const {
        for (const auto& c : components)
            if (c.id == id) return &c;
        return nullptr;
    }

    const CompositeNode* find_node(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }

    const NodeSolutions* find_solutions(const std::string& node) const {
        for (const auto& s : solutions)
            if (s.node == node) return &s;
        return nullptr;
    }

    // The composite node never referenced as a child.
    std::string root_id() const {
        std::set<std::string> referenced;
        for (const auto& n : nodes)
            for (const auto& c : n.children) referenced.insert(c);
        for (const auto& n : nodes)
            if (!referenced.count(n.id)) return n.id;
        return nodes.empty() ? std::string() : nodes.front().id;
    }

    int priority_depth() const {
        int depth = 1;
        for (const auto& c : components)
            for (const auto& a : c.alternatives) depth = std::max(depth, a.priority);
        for (const auto& s : solutions)
            for (const auto& d : s.entries) depth = std::max(depth, d.priority);
        return depth;
    }

    friend bool operator==(const MorphStructure&, const MorphStructure&) = default;
};

enum class ShapeHint { Chain, Tree, Dag, General };

inline const char* shape_name(ShapeHint s) {
    switch (s) {
        case ShapeHint::Chain: return "chain";
        case ShapeHint::Tree: return "tree";
        case ShapeHint::Dag: return "dag";
        default: return "general";
    }
}

struct Branch {
    std::string outcome;
    std::string target;

    friend bool operator==(const Branch&, const Branch&) = default;
};

struct NetworkNode {
    std::string id;
    bool is_analysis = false;
    std::string structure;                   // morph points only
    std::vector<DeclaredSolution> solutions; // morph points only
    std::vector<Branch> branches;            // analysis points only

    friend bool operator==(const NetworkNode&, const NetworkNode&) = default;
};

struct Edge {
    std::string from;
    std::string to;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// One arc of the effective graph: explicit edges plus analysis branches.
struct Arc {
    std::string from;
    std::string to;
    std::string outcome;  // empty for plain edges
};

struct NamedTrajectory {
    std::string name;
    std::vector<std::pair<std::string, std::string>> picks;  // point -> solution

    friend bool operator==(const NamedTrajectory&, const NamedTrajectory&) = default;
};

struct TopLevelNetwork {
    std::string name;
    ShapeHint shape = ShapeHint::General;
    int scale_max = 3;
    std::vector<NetworkNode> nodes;
    std::vector<Edge> edges;
    CompatEntries compat;  // keyed by "point.solution" names
    std::vector<NamedTrajectory> trajectories;

    const NetworkNode* find_node(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }

    // Declaration order: explicit edges first, then branch arcs in node and
    // branch order. Graph algorithms tie-break by this order.
    std::vector<Arc> arcs() const {
        std::vector<Arc> out;
        for (const auto& e : edges) out.push_back({e.from, e.to, {}});
        for (const auto& n : nodes)
            for (const auto& b : n.branches) out.push_back({n.id, b.target, b.outcome});
        return out;
    }

    // In-degree-zero nodes in declaration order; cyclic networks without a
    // source fall back to the first declared node.
    std::vector<std::string> roots() const {
        std::set<std::string> with_in;
        for (const auto& a : arcs()) with_in.insert(a.to);
        std::vector<std::string> out;
        for (const auto& n : nodes)
            if (!with_in.count(n.id)) out.push_back(n.id);
        if (out.empty() && !nodes.empty()) out.push_back(nodes.front().id);
        return out;
    }

    friend bool operator==(const TopLevelNetwork&, const TopLevelNetwork&) = default;
};

enum class Severity { Error, Warning };

struct Violation {
    Severity severity;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> items;

    void error(std::string msg) { items.push_back({Severity::Error, std::move(msg)}); }
    void warning(std::string msg) { items.push_back({Severity::Warning, std::move(msg)}); }

    bool valid() const {
        for (const auto& v : items)
            if (v.severity == Severity::Error) return false;
        return true;
    }

    std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& v : items) n += v.severity == Severity::Error;
        return n;
    }
};

namespace detail {

// Options selectable for one child of a composite node: a component's
// alternatives, or the declared solutions of a composite child.
struct ChildOptions {
    std::string child_id;
    bool is_component = false;
    std::vector<std::string> option_ids;
};

inline std::vector<ChildOptions> child_options(const MorphStructure& s, const CompositeNode& node) {
    std::vector<ChildOptions> out;
    for (const auto& child : node.children) {
        ChildOptions co;
        co.child_id = child;
        if (const Component* c = s.find_component(child)) {
            co.is_component = true;
            for (const auto& a : c->alternatives) co.option_ids.push_back(a.id);
        } else if (s.find_node(child)) {
            if (const NodeSolutions* ns = s.find_solutions(child))
                for (const auto& d : ns->entries) co.option_ids.push_back(d.name);
        }
        out.push_back(std::move(co));
    }
    return out;
}

// Maps an option name to the child that owns it, per composite node.
inline std::map<std::string, std::string> option_owner_map(const MorphStructure& s) {
    std::map<std::string, std::string> owner;
    for (const auto& c : s.components)
        for (const auto& a : c.alternatives)
            if (!owner.emplace(a.id, c.id).second) owner[a.id] = "?";  // ambiguous
    for (const auto& ns : s.solutions)
        for (const auto& d : ns.entries)
            if (!owner.emplace(d.name, ns.node).second) owner[d.name] = "?";
    return owner;
}

}  // namespace detail

inline ValidationReport validate_structure(const MorphStructure& s) {
    ValidationReport report;

    std::set<std::string> piece_ids;
    for (const auto& c : s.components) {
        if (!piece_ids.insert(c.id).second)
            report.error("duplicate id '" + c.id + "' in structure '" + s.name + "'");
        if (c.alternatives.empty()) report.error("empty component '" + c.id + "'");
        std::set<std::string> alt_ids;
        for (const auto& a : c.alternatives) {
            if (!alt_ids.insert(a.id).second)
                report.error("duplicate alternative '" + a.id + "' in component '" + c.id + "'");
            if (a.priority < 1)
                report.error("alternative '" + a.id + "' has priority " +
                             std::to_string(a.priority) + " (must be >= 1)");
        }
    }
    for (const auto& n : s.nodes)
        if (!piece_ids.insert(n.id).second)
            report.error("duplicate id '" + n.id + "' in structure '" + s.name + "'");

    if (s.nodes.empty()) {
        report.error("structure '" + s.name + "' declares no composite node");
        return report;
    }
    if (s.scale_max < 1) report.error("compatibility scale must be >= 1");

    // Children must form a tree: no piece referenced twice, no node cycles,
    // exactly one root.
    std::map<std::string, std::string> parent;
    for (const auto& n : s.nodes) {
        for (const auto& child : n.children) {
            if (!s.find_component(child) && !s.find_node(child)) {
                report.error("node '" + n.id + "' references unknown child '" + child + "'");
                continue;
            }
            if (!parent.emplace(child, n.id).second)
                report.error("child '" + child + "' referenced by more than one node");
        }
    }
    int root_count = 0;
    for (const auto& n : s.nodes)
        if (!parent.count(n.id)) ++root_count;
    if (root_count != 1)
        report.error("structure '" + s.name + "' must have exactly one root node, found " +
                     std::to_string(root_count));
    for (const auto& n : s.nodes) {
        std::set<std::string> seen;
        std::string cur = n.id;
        while (parent.count(cur)) {
            if (!seen.insert(cur).second) {
                report.error("cyclic child reference through node '" + n.id + "'");
                break;
            }
            cur = parent[cur];
        }
    }
    for (const auto& c : s.components)
        if (!parent.count(c.id))
            report.warning("component '" + c.id + "' is not part of the composition tree");

    // Declared solutions must pick exactly one option per child.
    for (const auto& ns : s.solutions) {
        const CompositeNode* node = s.find_node(ns.node);
        if (!node) {
            report.error("solutions declared for unknown node '" + ns.node + "'");
            continue;
        }
        for (const auto& d : ns.entries) {
            if (d.selection.size() != node->children.size())
                report.error("solution '" + d.name + "' selects " +
                             std::to_string(d.selection.size()) + " options, node '" + ns.node +
                             "' has " + std::to_string(node->children.size()) + " children");
        }
    }

    // Compatibility entries: known references, distinct sibling children,
    // values inside the scale.
    auto owner = detail::option_owner_map(s);
    for (const auto& [key, val] : s.compat) {
        const auto& [a, b] = key;
        auto ita = owner.find(a);
        auto itb = owner.find(b);
        if (ita == owner.end() || itb == owner.end()) {
            report.error("compatibility entry (" + a + "," + b + ") references unknown option");
            continue;
        }
        if (ita->second == "?" || itb->second == "?") {
            report.error("compatibility entry (" + a + "," + b + ") is ambiguous");
            continue;
        }
        if (ita->second == itb->second) {
            report.error("compatibility entry (" + a + "," + b +
                         ") relates two options of the same component");
            continue;
        }
        bool siblings = false;
        for (const auto& n : s.nodes) {
            bool has_a = false, has_b = false;
            for (const auto& child : n.children) {
                has_a |= child == ita->second;
                has_b |= child == itb->second;
            }
            if (has_a && has_b) siblings = true;
        }
        if (!siblings)
            report.error("compatibility entry (" + a + "," + b +
                         ") does not relate sibling children of one node");
        if (val.value < 0 || val.value > s.scale_max)
            report.error("compatibility value " + std::to_string(val.value) + " for (" + a + "," +
                         b + ") outside scale 0.." + std::to_string(s.scale_max));
    }

    // Completeness: every cross pair at every node needs an estimate. Only
    // checkable where composite children carry declared solutions.
    for (const auto& n : s.nodes) {
        auto children = detail::child_options(s, n);
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (!children[i].is_component && children[i].option_ids.empty()) continue;
            for (std::size_t j = i + 1; j < children.size(); ++j) {
                if (!children[j].is_component && children[j].option_ids.empty()) continue;
                for (const auto& a : children[i].option_ids) {
                    for (const auto& b : children[j].option_ids) {
                        if (compat_lookup(s.compat, a, b)) continue;
                        std::string msg = "missing compatibility entry (" + a + "," + b + ")";
                        if (s.partial)
                            report.warning(msg);
                        else
                            report.error(msg);
                    }
                }
            }
        }
    }

    return report;
}

namespace detail {

// Depth-first walk over the arcs in declaration order; reports the first
// closing arc of every cycle found.
inline void find_back_arcs(const TopLevelNetwork& net, std::vector<std::size_t>& back,
                           std::vector<std::string>* visit_order = nullptr) {
    auto arcs = net.arcs();
    std::map<std::string, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < arcs.size(); ++i) out[arcs[i].from].push_back(i);

    std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
    std::vector<std::pair<std::string, std::size_t>> stack;

    auto run = [&](const std::string& start) {
        if (state[start]) return;
        stack.push_back({start, 0});
        state[start] = 1;
        if (visit_order) visit_order->push_back(start);
        while (!stack.empty()) {
            auto& [id, next] = stack.back();
            auto& offs = out[id];
            if (next >= offs.size()) {
                state[id] = 2;
                stack.pop_back();
                continue;
            }
            std::size_t arc_idx = offs[next++];
            const std::string& to = arcs[arc_idx].to;
            if (!net.find_node(to)) continue;
            int st = state[to];
            if (st == 1) {
                back.push_back(arc_idx);
            } else if (st == 0) {
                state[to] = 1;
                if (visit_order) visit_order->push_back(to);
                stack.push_back({to, 0});
            }
        }
    };

    for (const auto& r : net.roots()) run(r);
    for (const auto& n : net.nodes) run(n.id);
}

}  // namespace detail

inline bool network_is_acyclic(const TopLevelNetwork& net) {
    std::vector<std::size_t> back;
    detail::find_back_arcs(net, back);
    return back.empty();
}

inline ValidationReport validate_network(const TopLevelNetwork& net) {
    ValidationReport report;

    std::set<std::string> ids;
    for (const auto& n : net.nodes)
        if (!ids.insert(n.id).second)
            report.error("duplicate node '" + n.id + "' in network '" + net.name + "'");

    auto arcs = net.arcs();
    for (const auto& a : arcs) {
        if (!net.find_node(a.from))
            report.error("edge references unknown node '" + a.from + "'");
        if (!net.find_node(a.to))
            report.error("edge or branch targets unknown node '" + a.to + "'");
    }
    for (const auto& n : net.nodes) {
        std::set<std::string> outcomes;
        for (const auto& b : n.branches)
            if (!outcomes.insert(b.outcome).second)
                report.error("analysis point '" + n.id + "' repeats outcome \"" + b.outcome +
                             "\"");
    }
    if (!report.valid()) return report;

    std::vector<std::size_t> back;
    detail::find_back_arcs(net, back);
    bool acyclic = back.empty();

    std::map<std::string, int> in_deg, out_deg;
    for (const auto& a : arcs) {
        ++out_deg[a.from];
        ++in_deg[a.to];
    }

    auto cycle_msg = [&](std::size_t idx) {
        return "cycle detected (" + arcs[idx].from + "->" + arcs[idx].to + ")";
    };

    switch (net.shape) {
        case ShapeHint::Chain: {
            if (!acyclic) {
                report.error(cycle_msg(back.front()));
                break;
            }
            int heads = 0, tails = 0;
            bool simple = true;
            for (const auto& n : net.nodes) {
                if (in_deg[n.id] > 1 || out_deg[n.id] > 1) simple = false;
                if (in_deg[n.id] == 0) ++heads;
                if (out_deg[n.id] == 0) ++tails;
            }
            if (!simple || heads != 1 || tails != 1 ||
                arcs.size() + 1 != net.nodes.size())
                report.error("network '" + net.name + "' is not a simple path");
            break;
        }
        case ShapeHint::Tree: {
            if (!acyclic) {
                report.error(cycle_msg(back.front()));
                break;
            }
            int roots = 0;
            bool ok = arcs.size() + 1 == net.nodes.size();
            for (const auto& n : net.nodes) {
                if (in_deg[n.id] == 0)
                    ++roots;
                else if (in_deg[n.id] != 1)
                    ok = false;
            }
            if (roots != 1 || !ok)
                report.error("network '" + net.name + "' is not a tree");
            break;
        }
        case ShapeHint::Dag:
            if (!acyclic) report.error(cycle_msg(back.front()));
            break;
        case ShapeHint::General:
            break;
    }

    // Reachability from the declared roots.
    std::vector<std::string> reached;
    {
        std::vector<std::size_t> ignore;
        detail::find_back_arcs(net, ignore, &reached);
    }
    std::set<std::string> reachable;
    {
        // Restrict to nodes reachable from roots only (the full walk above
        // restarts everywhere); redo a plain BFS from the roots.
        std::vector<std::string> queue = net.roots();
        for (const auto& r : queue) reachable.insert(r);
        for (std::size_t i = 0; i < queue.size(); ++i) {
            for (const auto& a : arcs)
                if (a.from == queue[i] && reachable.insert(a.to).second) queue.push_back(a.to);
        }
    }
    for (const auto& n : net.nodes)
        if (!reachable.count(n.id))
            report.warning("node '" + n.id + "' unreachable from declared roots");

    return report;
}

}  // namespace morphsynth
