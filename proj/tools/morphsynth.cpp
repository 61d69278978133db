// Command-line front end: validate, synth, trajectory, verify, export.
// Exit codes: 0 success, 1 validation/parse failure, 2 infeasible or empty
// result, 3 internal invariant breach (engine and oracle disagree).

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <morphsynth/morphsynth.hpp>

namespace ms = morphsynth;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitEmpty = 2;
constexpr int kExitBreach = 3;

unsigned thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MORPHSYNTH_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v < 1024) return std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Returns the parsed document or prints positioned diagnostics and exits.
ms::MorphDocument load_or_exit(const std::string& path) {
    auto text = read_file(path);
    if (!text) {
        std::cerr << path << ": cannot read file\n";
        std::exit(kExitInvalid);
    }
    auto result = ms::parse(*text);
    if (!result.ok()) {
        for (const auto& e : result.errors)
            std::cerr << path << ":" << e.to_string() << "\n";
        std::exit(kExitInvalid);
    }
    return std::move(result.doc);
}

json quality_json(const ms::QualityVector& q) {
    return json{{"w", q.w}, {"tiers", q.tiers}, {"text", q.to_string()}};
}

// Structures with declared node solutions reproduce hand-assigned
// priorities; everything else uses Pareto-layer priorities.
ms::SynthesisConfig synth_config(const ms::MorphStructure& s, int layers, bool partial,
                                 bool admit_zero) {
    ms::SynthesisConfig cfg;
    cfg.layer_depth = layers;
    cfg.admit_zero = admit_zero;
    cfg.threads = thread_cap();
    if (partial || s.partial) {
        cfg.missing_entries = ms::MissingEntryPolicy::Assume;
        cfg.assumed_value = 0;
    }
    if (!s.solutions.empty()) cfg.priority_rule = ms::PriorityRule::Declared;
    return cfg;
}

bool node_is_flat(const ms::MorphStructure& s, const std::string& node_id) {
    const ms::CompositeNode* node = s.find_node(node_id);
    if (!node) return false;
    for (const auto& child : node->children)
        if (!s.find_component(child)) return false;
    return true;
}

// Children before parents, starting from the root.
std::vector<std::string> node_print_order(const ms::MorphStructure& s) {
    std::vector<std::string> order;
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
        const ms::CompositeNode* node = s.find_node(id);
        if (!node) return;
        for (const auto& child : node->children)
            if (s.find_node(child)) visit(child);
        order.push_back(id);
    };
    visit(s.root_id());
    return order;
}

int cmd_validate(const std::string& path, bool strict, bool as_json) {
    auto text = read_file(path);
    if (!text) {
        std::cerr << path << ": cannot read file\n";
        return kExitInvalid;
    }
    auto result = ms::parse(*text);
    if (!result.ok()) {
        json out = json::array();
        for (const auto& e : result.errors) {
            if (as_json)
                out.push_back({{"line", e.line}, {"col", e.col}, {"message", e.message}});
            else
                std::cerr << path << ":" << e.to_string() << "\n";
        }
        if (as_json) std::cout << json{{"file", path}, {"parse_errors", out}}.dump(2) << "\n";
        return kExitInvalid;
    }

    std::size_t errors = 0, warnings = 0;
    json jreports = json::array();
    auto show = [&](const std::string& kind, const std::string& name,
                    const ms::ValidationReport& report) {
        json jitems = json::array();
        for (const auto& item : report.items) {
            bool is_err = item.severity == ms::Severity::Error;
            errors += is_err;
            warnings += !is_err;
            if (as_json)
                jitems.push_back({{"severity", is_err ? "error" : "warning"},
                                  {"message", item.message}});
            else
                std::cout << kind << " " << name << ": " << (is_err ? "error" : "warning")
                          << ": " << item.message << "\n";
        }
        if (as_json)
            jreports.push_back({{"kind", kind}, {"name", name}, {"items", jitems}});
    };
    for (const auto& s : result.doc.structures) show("structure", s.name, ms::validate_structure(s));
    for (const auto& n : result.doc.networks) show("network", n.name, ms::validate_network(n));

    bool failed = errors > 0 || (strict && warnings > 0);
    if (as_json) {
        std::cout << json{{"file", path},
                          {"errors", errors},
                          {"warnings", warnings},
                          {"strict", strict},
                          {"valid", !failed},
                          {"reports", jreports}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << (failed ? "invalid: " : "valid: ") << errors << " error(s), " << warnings
                  << " warning(s)\n";
    }
    return failed ? kExitInvalid : kExitOk;
}

void print_solution_line(const ms::CompositeSolution& sol) {
    std::cout << sol.name << " = " << sol.selection_string() << " N=" << sol.quality.to_string()
              << " layer=" << sol.layer << "\n";
}

int cmd_synth(const std::string& path, const std::string& structure, const std::string& node,
              int layers, bool partial, bool admit_zero, bool as_json) {
    auto doc = load_or_exit(path);
    const ms::MorphStructure* s = doc.find_structure(structure);
    if (!s) {
        std::cerr << "unknown structure '" << structure << "'\n";
        return kExitInvalid;
    }
    auto cfg = synth_config(*s, layers, partial, admit_zero);

    try {
        std::vector<std::pair<std::string, std::vector<ms::CompositeSolution>>> sections;
        if (!node.empty()) {
            if (!s->find_node(node)) {
                std::cerr << "unknown node '" << node << "' in structure '" << structure << "'\n";
                return kExitInvalid;
            }
            if (node_is_flat(*s, node)) {
                sections.push_back({node, ms::synthesize_node(*s, node, cfg)});
            } else {
                auto all = ms::synthesize_hierarchy(*s, cfg);
                sections.push_back({node, all.at(node)});
            }
        } else if (s->nodes.size() == 1) {
            sections.push_back({s->root_id(), ms::synthesize_node(*s, s->root_id(), cfg)});
        } else {
            auto all = ms::synthesize_hierarchy(*s, cfg);
            for (const auto& id : node_print_order(*s)) sections.push_back({id, all.at(id)});
        }

        bool multi = sections.size() > 1;
        json jsections = json::array();
        for (const auto& [id, sols] : sections) {
            if (as_json) {
                json jsols = json::array();
                for (const auto& sol : sols)
                    jsols.push_back({{"name", sol.name},
                                     {"selection", sol.selection_string()},
                                     {"quality", quality_json(sol.quality)},
                                     {"layer", sol.layer}});
                jsections.push_back({{"node", id}, {"solutions", jsols}});
            } else {
                if (multi) std::cout << "node " << id << "\n";
                for (const auto& sol : sols) print_solution_line(sol);
            }
        }
        if (as_json)
            std::cout << json{{"structure", structure}, {"nodes", jsections}}.dump(2) << "\n";

        // the requested (or final) composition level decides emptiness
        if (sections.back().second.empty()) {
            std::cerr << "no feasible composition\n";
            return kExitEmpty;
        }
        return kExitOk;
    } catch (const ms::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

struct PointSetup {
    std::vector<ms::TrajectoryPoint> points;
    int tier_depth = 1;
};

// Declared local solutions, or layer-1 synthesis with priority 1 when a
// point declares none.
PointSetup local_solutions(const ms::MorphDocument& doc, const ms::TopLevelNetwork& net) {
    PointSetup setup;
    for (const auto& n : net.nodes) {
        if (n.is_analysis) continue;
        ms::TrajectoryPoint p;
        p.id = n.id;
        const ms::MorphStructure* s = doc.find_structure(n.structure);
        if (s) setup.tier_depth = std::max(setup.tier_depth, s->priority_depth());
        if (!n.solutions.empty()) {
            for (const auto& d : n.solutions)
                p.solutions.push_back({d.name, d.has_priority ? d.priority : 1});
        } else if (s) {
            auto cfg = synth_config(*s, 1, false, false);
            for (const auto& sol : ms::synthesize_node(*s, s->root_id(), cfg))
                p.solutions.push_back({sol.name, 1});
        }
        setup.points.push_back(std::move(p));
    }
    return setup;
}

// Simple-path detection; returns the morph points in chain order.
std::optional<std::vector<std::string>> chain_order(const ms::TopLevelNetwork& net) {
    auto arcs = net.arcs();
    std::map<std::string, int> in_deg;
    std::map<std::string, std::vector<std::string>> next;
    for (const auto& a : arcs) {
        ++in_deg[a.to];
        next[a.from].push_back(a.to);
    }
    std::string head;
    for (const auto& n : net.nodes) {
        if (next[n.id].size() > 1 || in_deg[n.id] > 1) return std::nullopt;
        if (in_deg[n.id] == 0) {
            if (!head.empty()) return std::nullopt;
            head = n.id;
        }
    }
    if (head.empty()) return std::nullopt;
    std::vector<std::string> order;
    std::string cur = head;
    while (true) {
        order.push_back(cur);
        if (next[cur].empty()) break;
        cur = next[cur].front();
    }
    if (order.size() != net.nodes.size()) return std::nullopt;
    return order;
}

void print_trajectories(const std::vector<ms::Trajectory>& trajectories) {
    for (const auto& t : trajectories)
        std::cout << t.to_string() << " N=" << t.quality.to_string() << " layer=" << t.layer
                  << "\n";
}

json trajectories_json(const std::vector<ms::Trajectory>& trajectories) {
    json arr = json::array();
    for (const auto& t : trajectories) {
        json assign = json::array();
        for (const auto& [p, sname] : t.assignment) assign.push_back({{"point", p}, {"solution", sname}});
        arr.push_back({{"assignment", assign},
                       {"text", t.to_string()},
                       {"quality", quality_json(t.quality)},
                       {"layer", t.layer}});
    }
    return arr;
}

int cmd_trajectory(const std::string& path, const std::string& network, const std::string& mode_s,
                   const std::string& outcomes_s, const std::string& start,
                   const std::string& spanning_root, bool simplify, int layers, int step_limit,
                   bool as_json) {
    auto doc = load_or_exit(path);
    const ms::TopLevelNetwork* found = doc.find_network(network);
    if (!found) {
        std::cerr << "unknown network '" << network << "'\n";
        return kExitInvalid;
    }
    ms::AggregationMode mode =
        mode_s == "all-pairs" ? ms::AggregationMode::AllPairs : ms::AggregationMode::Adjacent;

    json jout;
    jout["network"] = network;
    jout["mode"] = mode_s;

    try {
        ms::TopLevelNetwork net = *found;
        if (!spanning_root.empty()) {
            net = ms::spanning_tree(net, spanning_root);
            if (!as_json)
                std::cout << "# transformed: spanning tree rooted at " << spanning_root << "\n";
            jout["transformation"] = "spanning-tree:" + spanning_root;
        } else if (simplify) {
            std::vector<std::size_t> back;
            ms::detail::find_back_arcs(net, back);
            auto arcs = net.arcs();
            std::string removed;
            for (std::size_t i : back)
                removed += (removed.empty() ? "" : ", ") + arcs[i].from + "->" + arcs[i].to;
            net = ms::simplify_network(net);
            if (!as_json) std::cout << "# transformed: removed back arcs: " << removed << "\n";
            jout["transformation"] = "simplify";
            jout["removed_arcs"] = removed;
        }

        ms::SynthesisConfig cfg;
        cfg.layer_depth = layers;
        cfg.threads = thread_cap();

        auto setup = local_solutions(doc, net);
        ms::InterPointCompat compat{net.scale_max, net.compat};

        if (!outcomes_s.empty()) {
            ms::OutcomeAssignment outcomes;
            std::stringstream ss(outcomes_s);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto eq = item.find('=');
                if (eq == std::string::npos) {
                    std::cerr << "bad outcome '" << item << "' (expected point=label)\n";
                    return kExitInvalid;
                }
                outcomes[item.substr(0, eq)] = item.substr(eq + 1);
            }
            std::string from = start.empty() ? net.roots().front() : start;
            auto walk = ms::execute_decision_path(net, from, outcomes, step_limit);

            std::string path_text;
            for (const auto& p : walk.points)
                path_text += (path_text.empty() ? "" : " -> ") + p;
            jout["path"] = walk.points;
            jout["truncated"] = walk.truncated;
            if (!as_json) {
                std::cout << "path: " << path_text << (walk.truncated ? " (truncated)" : "")
                          << "\n";
            }

            std::set<std::string> uniq(walk.points.begin(), walk.points.end());
            if (walk.truncated || uniq.size() != walk.points.size()) {
                if (!as_json)
                    std::cout << "# revisits or truncation: no trajectory synthesis over this walk\n";
                if (as_json) std::cout << jout.dump(2) << "\n";
                return kExitOk;
            }

            std::vector<ms::TrajectoryPoint> pts;
            for (const auto& id : walk.points)
                for (const auto& p : setup.points)
                    if (p.id == id) pts.push_back(p);
            auto trajectories = ms::chain_trajectories(pts, compat, mode, cfg, setup.tier_depth);
            if (as_json) {
                jout["trajectories"] = trajectories_json(trajectories);
                std::cout << jout.dump(2) << "\n";
            } else {
                print_trajectories(trajectories);
            }
            if (trajectories.empty()) {
                std::cerr << "no feasible trajectory\n";
                return kExitEmpty;
            }
            return kExitOk;
        }

        if (!ms::network_is_acyclic(net)) {
            std::cerr << "cyclic network '" << network
                      << "' (use --spanning-tree or --simplify)\n";
            return kExitInvalid;
        }
        for (const auto& n : net.nodes) {
            if (n.is_analysis) {
                std::cerr << "network '" << network
                          << "' contains analysis points; supply --outcomes\n";
                return kExitInvalid;
            }
        }

        std::vector<ms::Trajectory> trajectories;
        auto order = chain_order(net);
        if (order) {
            std::vector<ms::TrajectoryPoint> pts;
            for (const auto& id : *order)
                for (const auto& p : setup.points)
                    if (p.id == id) pts.push_back(p);
            trajectories = ms::chain_trajectories(pts, compat, mode, cfg, setup.tier_depth);
        } else if (mode == ms::AggregationMode::AllPairs) {
            std::cerr << "all-pairs aggregation requires a chain network\n";
            return kExitInvalid;
        } else {
            trajectories = ms::network_trajectories(net, compat, cfg, setup.tier_depth);
        }

        if (as_json) {
            jout["trajectories"] = trajectories_json(trajectories);
            std::cout << jout.dump(2) << "\n";
        } else {
            print_trajectories(trajectories);
        }
        if (trajectories.empty()) {
            std::cerr << "no feasible trajectory\n";
            return kExitEmpty;
        }
        return kExitOk;
    } catch (const ms::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

int cmd_export(const std::string& path, const std::string& network,
               const std::string& trajectory, bool as_json) {
    auto doc = load_or_exit(path);
    const ms::TopLevelNetwork* net = doc.find_network(network);
    if (!net) {
        std::cerr << "unknown network '" << network << "'\n";
        return kExitInvalid;
    }
    const ms::NamedTrajectory* traj = nullptr;
    if (!trajectory.empty()) {
        for (const auto& t : net->trajectories)
            if (t.name == trajectory) traj = &t;
        if (!traj) {
            std::cerr << "unknown trajectory '" << trajectory << "' in network '" << network
                      << "'\n";
            return kExitInvalid;
        }
    }
    auto text = ms::export_graph(*net, traj);
    if (as_json)
        std::cout << json{{"network", network}, {"trajectory", trajectory}, {"dot", text}}.dump(2)
                  << "\n";
    else
        std::cout << text;
    return kExitOk;
}

// --- verify: engine/oracle sweep plus claim recomputation ---

struct Claim {
    std::string name;
    bool is_network = false;
    std::string structure;
    std::string node;  // empty = root
    std::vector<std::string> selection;
    std::string network;
    std::string mode = "adjacent";
    std::vector<std::pair<std::string, std::string>> assignment;
    ms::QualityVector expect;
    std::string source;
    int line = 0;
};

std::optional<ms::QualityVector> parse_quality_text(const std::string& text) {
    if (text.size() < 4 || text.front() != '(' || text.back() != ')') return std::nullopt;
    auto semi = text.find(';');
    if (semi == std::string::npos) return std::nullopt;
    ms::QualityVector q;
    try {
        q.w = std::stoi(text.substr(1, semi - 1));
        std::string rest = text.substr(semi + 1, text.size() - semi - 2);
        std::stringstream ss(rest);
        std::string part;
        while (std::getline(ss, part, ',')) q.tiers.push_back(std::stoi(part));
    } catch (...) {
        return std::nullopt;
    }
    return q;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(part);
    return out;
}

std::optional<std::vector<Claim>> parse_claims(const std::string& path) {
    auto text = read_file(path);
    if (!text) {
        std::cerr << path << ": cannot read file\n";
        return std::nullopt;
    }
    std::vector<Claim> claims;
    std::istringstream in(*text);
    std::string line;
    int lineno = 0;
    bool header = false;
    bool ok = true;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty()) continue;
        if (!header) {
            if (tok.size() != 2 || tok[0] != "claims" || tok[1] != "1") {
                std::cerr << path << ":" << lineno << ": expected 'claims 1' header\n";
                return std::nullopt;
            }
            header = true;
            continue;
        }
        auto bad = [&](const std::string& msg) {
            std::cerr << path << ":" << lineno << ": " << msg << "\n";
            ok = false;
        };
        if (tok[0] != "claim" || tok.size() < 2) {
            bad("expected 'claim <name> ...'");
            continue;
        }
        Claim c;
        c.name = tok[1];
        c.line = lineno;
        std::size_t i = 2;
        bool has_expect = false;
        while (i < tok.size()) {
            const std::string& key = tok[i];
            if (key == "structure" && i + 1 < tok.size()) {
                c.structure = tok[++i];
            } else if (key == "node" && i + 1 < tok.size()) {
                c.node = tok[++i];
            } else if (key == "selection" && i + 1 < tok.size()) {
                c.selection = split(tok[++i], '*');
            } else if (key == "network" && i + 1 < tok.size()) {
                c.is_network = true;
                c.network = tok[++i];
            } else if (key == "mode" && i + 1 < tok.size()) {
                c.mode = tok[++i];
            } else if (key == "assignment" && i + 1 < tok.size()) {
                for (const auto& part : split(tok[++i], '*')) {
                    auto dot = part.find('.');
                    if (dot == std::string::npos) {
                        bad("assignment entries must be point.solution");
                        break;
                    }
                    c.assignment.push_back({part.substr(0, dot), part.substr(dot + 1)});
                }
            } else if (key == "expect" && i + 1 < tok.size()) {
                auto q = parse_quality_text(tok[++i]);
                if (!q) {
                    bad("bad quality vector '" + tok[i] + "'");
                } else {
                    c.expect = *q;
                    has_expect = true;
                }
            } else if (key == "source" && i + 1 < tok.size()) {
                c.source = tok[++i];
            } else {
                bad("unknown token '" + key + "'");
            }
            ++i;
        }
        if (!has_expect) bad("claim '" + c.name + "' has no expected value");
        claims.push_back(std::move(c));
    }
    if (!ok) return std::nullopt;
    return claims;
}

bool same_listing(const std::vector<ms::CompositeSolution>& a,
                  const std::vector<ms::CompositeSolution>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].selection_string() != b[i].selection_string() || a[i].layer != b[i].layer ||
            !(a[i].quality == b[i].quality))
            return false;
    return true;
}

bool same_listing(const std::vector<ms::Trajectory>& a, const std::vector<ms::Trajectory>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].key() != b[i].key() || a[i].layer != b[i].layer ||
            !(a[i].quality == b[i].quality))
            return false;
    return true;
}

int cmd_verify(const std::string& path, const std::string& claims_path, bool as_json) {
    auto doc = load_or_exit(path);
    bool breach = false;
    json jequiv = json::array();
    json jclaims = json::array();

    auto note_equiv = [&](const std::string& target, bool okay, std::size_t count) {
        if (!okay) breach = true;
        if (as_json)
            jequiv.push_back({{"target", target}, {"ok", okay}, {"results", count}});
        else
            std::cout << "equivalence " << target << ": "
                      << (okay ? "OK (" + std::to_string(count) + " results)" : "ENGINE/ORACLE DISAGREE")
                      << "\n";
    };

    for (const auto& s : doc.structures) {
        auto cfg = synth_config(s, 1 << 20, false, false);
        try {
            if (s.nodes.size() == 1) {
                auto engine = ms::synthesize_node(s, s.root_id(), cfg);
                auto reference = ms::oracle::oracle_synthesize(s, s.root_id(), cfg);
                note_equiv("structure " + s.name, same_listing(engine, reference), engine.size());
            } else {
                auto engine = ms::synthesize_hierarchy(s, cfg);
                bool okay = true;
                std::size_t total = 0;
                for (const auto& [id, sols] : engine) {
                    auto reference = ms::oracle::oracle_synthesize(s, id, cfg, &engine);
                    okay = okay && same_listing(sols, reference);
                    total += sols.size();
                }
                note_equiv("structure " + s.name, okay, total);
            }
        } catch (const ms::Error& e) {
            if (!as_json)
                std::cout << "equivalence structure " << s.name << ": skipped (" << e.what()
                          << ")\n";
        }
    }

    for (const auto& net : doc.networks) {
        bool has_analysis = false;
        for (const auto& n : net.nodes) has_analysis |= n.is_analysis;
        if (has_analysis || !ms::network_is_acyclic(net)) {
            if (!as_json)
                std::cout << "equivalence network " << net.name
                          << ": skipped (analysis points or cycles)\n";
            continue;
        }
        try {
            ms::SynthesisConfig cfg;
            cfg.layer_depth = 1 << 20;
            ms::InterPointCompat compat{net.scale_max, net.compat};
            int tier_depth = 1;
            for (const auto& n : net.nodes) {
                const ms::MorphStructure* s = doc.find_structure(n.structure);
                if (s) tier_depth = std::max(tier_depth, s->priority_depth());
            }
            auto engine = ms::network_trajectories(net, compat, cfg, tier_depth);
            auto reference = ms::oracle::oracle_network(net, compat, cfg, tier_depth);
            note_equiv("network " + net.name, same_listing(engine, reference), engine.size());
        } catch (const ms::Error& e) {
            if (!as_json)
                std::cout << "equivalence network " << net.name << ": skipped (" << e.what()
                          << ")\n";
        }
    }

    if (!claims_path.empty()) {
        auto claims = parse_claims(claims_path);
        if (!claims) return kExitInvalid;
        for (const auto& c : *claims) {
            try {
                ms::QualityVector engine_q, oracle_q;
                if (!c.is_network) {
                    const ms::MorphStructure* s = doc.find_structure(c.structure);
                    if (!s) throw ms::Error("unknown structure '" + c.structure + "'");
                    std::string node = c.node.empty() ? s->root_id() : c.node;
                    auto cfg = synth_config(*s, 1, false, false);
                    engine_q = ms::quality_of(*s, node, c.selection, cfg);
                    oracle_q = ms::oracle::oracle_quality(*s, node, c.selection, cfg);
                } else {
                    const ms::TopLevelNetwork* net = doc.find_network(c.network);
                    if (!net) throw ms::Error("unknown network '" + c.network + "'");
                    ms::InterPointCompat compat{net->scale_max, net->compat};
                    int tier_depth = 1;
                    for (const auto& n : net->nodes) {
                        const ms::MorphStructure* sp = doc.find_structure(n.structure);
                        if (sp) tier_depth = std::max(tier_depth, sp->priority_depth());
                    }
                    std::vector<ms::TrajectoryPoint> pts;
                    for (const auto& [point, sol] : c.assignment) {
                        const ms::NetworkNode* n = net->find_node(point);
                        if (!n) throw ms::Error("unknown point '" + point + "'");
                        int priority = 1;
                        for (const auto& d : n->solutions)
                            if (d.name == sol && d.has_priority) priority = d.priority;
                        pts.push_back({point, {{sol, priority}}});
                    }
                    ms::SynthesisConfig cfg;
                    auto mode = c.mode == "all-pairs" ? ms::AggregationMode::AllPairs
                                                      : ms::AggregationMode::Adjacent;
                    auto engine = ms::chain_trajectories(pts, compat, mode, cfg, tier_depth);
                    auto reference = ms::oracle::oracle_chain(pts, compat, mode, cfg, tier_depth);
                    if (engine.size() != 1 || reference.size() != 1)
                        throw ms::Error("claim assignment is not feasible");
                    engine_q = engine.front().quality;
                    oracle_q = reference.front().quality;
                }

                if (!(engine_q == oracle_q)) {
                    breach = true;
                    std::cout << "DISAGREE " << c.name << " engine=" << engine_q.to_string()
                              << " oracle=" << oracle_q.to_string() << "\n";
                    continue;
                }
                bool match = engine_q == c.expect;
                std::size_t pad = std::max(engine_q.tiers.size(), c.expect.tiers.size());
                if (as_json) {
                    jclaims.push_back({{"name", c.name},
                                       {"status", match ? "MATCH" : "MISMATCH"},
                                       {"expected", c.expect.to_string_padded(pad)},
                                       {"recomputed", engine_q.to_string_padded(pad)},
                                       {"source", c.source}});
                } else if (match) {
                    std::cout << "MATCH " << c.name << " N=" << engine_q.to_string_padded(pad)
                              << "\n";
                } else {
                    std::cout << "MISMATCH " << c.name
                              << " expected=" << c.expect.to_string_padded(pad)
                              << " recomputed=" << engine_q.to_string_padded(pad) << "\n";
                }
            } catch (const ms::Error& e) {
                std::cerr << "error: claim " << c.name << ": " << e.what() << "\n";
                return kExitInvalid;
            }
        }
    }

    if (as_json)
        std::cout << json{{"file", path},
                          {"equivalence", jequiv},
                          {"claims", jclaims},
                          {"breach", breach}}
                         .dump(2)
                  << "\n";
    return breach ? kExitBreach : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"combinatorial synthesis of modular systems and multistage trajectories"};
    app.require_subcommand(1);

    std::string file, structure, node, network, mode = "adjacent", outcomes, start,
                spanning_root, trajectory, claims;
    int layers = 1, step_limit = 100;
    bool strict = false, partial = false, admit_zero = false, simplify = false, as_json = false;

    auto* validate = app.add_subcommand("validate", "parse and validate a morph file");
    validate->add_option("file", file)->required();
    validate->add_flag("--strict", strict, "treat warnings as failures");
    validate->add_flag("--json", as_json);

    auto* synth = app.add_subcommand("synth", "synthesize Pareto-efficient compositions");
    synth->add_option("file", file)->required();
    synth->add_option("--structure", structure)->required();
    synth->add_option("--node", node);
    synth->add_option("--layers", layers)->check(CLI::PositiveNumber);
    synth->add_flag("--partial", partial, "treat missing compatibility entries as 0");
    synth->add_flag("--admit-zero", admit_zero, "keep compositions with w = 0");
    synth->add_flag("--json", as_json);

    auto* traj = app.add_subcommand("trajectory", "compose multistage trajectories");
    traj->add_option("file", file)->required();
    traj->add_option("--network", network)->required();
    traj->add_option("--mode", mode)->check(CLI::IsMember({"adjacent", "all-pairs"}));
    traj->add_option("--outcomes", outcomes, "comma list point=label for analysis points");
    traj->add_option("--start", start, "start node for --outcomes walks");
    traj->add_option("--spanning-tree", spanning_root, "replace network by a BFS spanning tree");
    traj->add_flag("--simplify", simplify, "drop back arcs before synthesis");
    traj->add_option("--layers", layers)->check(CLI::PositiveNumber);
    traj->add_option("--step-limit", step_limit)->check(CLI::PositiveNumber);
    traj->add_flag("--json", as_json);

    auto* verify = app.add_subcommand("verify", "cross-check engine, oracle, and recorded claims");
    verify->add_option("file", file)->required();
    verify->add_option("--claims", claims);
    verify->add_flag("--json", as_json);

    auto* exp = app.add_subcommand("export", "emit a dot graph of a network or trajectory");
    exp->add_option("file", file)->required();
    exp->add_option("--network", network)->required();
    exp->add_option("--trajectory", trajectory);
    exp->add_flag("--json", as_json);

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) return cmd_validate(file, strict, as_json);
    if (synth->parsed())
        return cmd_synth(file, structure, node, layers, partial, admit_zero, as_json);
    if (traj->parsed())
        return cmd_trajectory(file, network, mode, outcomes, start, spanning_root, simplify,
                              layers, step_limit, as_json);
    if (verify->parsed()) return cmd_verify(file, claims, as_json);
    if (exp->parsed()) return cmd_export(file, network, trajectory, as_json);
    return kExitOk;
}
