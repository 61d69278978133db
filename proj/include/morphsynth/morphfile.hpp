#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "model.hpp"

namespace morphsynth {

struct ParseError {
    int line = 0;
    int col = 0;
    std::string message;

    std::string to_string() const {
        return std::to_string(line) + ":" + std::to_string(col) + ": " + message;
    }
};

struct MorphDocument {
    std::vector<MorphStructure> structures;
    std::vector<TopLevelNetwork> networks;

    const MorphStructure* find_structure(const std::string& name) const {
        for (const auto& s : structures)
            if (s.name == name) return &s;
        return nullptr;
    }

    const TopLevelNetwork* find_network(const std::string& name) const {
        for (const auto& n : networks)
            if (n.name == name) return &n;
        return nullptr;
    }
};

struct ParseResult {
    MorphDocument doc;
    std::vector<ParseError> errors;

    bool ok() const { return errors.empty(); }
};

namespace mf_detail {

enum class TokKind { Ident, Int, Str, LBrace, RBrace, Eq, Star, Dot, Arrow, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    long long num = 0;
    int line = 1;
    int col = 1;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::vector<Token> lex(std::string_view text, std::vector<ParseError>& errors) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (i < text.size() && text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\r' || c == ' ' || c == '\t' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            t.kind = TokKind::Ident;
            t.text = std::string(text.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            t.kind = TokKind::Int;
            t.text = std::string(text.substr(i, j - i));
            t.num = std::stoll(t.text);
            advance(j - i);
        } else if (c == '"') {
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
            if (j >= text.size() || text[j] != '"') {
                errors.push_back({line, col, "unterminated string"});
                advance(j - i);
                continue;
            }
            t.kind = TokKind::Str;
            t.text = std::string(text.substr(i + 1, j - i - 1));
            advance(j - i + 1);
        } else if (c == '{') {
            t.kind = TokKind::LBrace;
            advance(1);
        } else if (c == '}') {
            t.kind = TokKind::RBrace;
            advance(1);
        } else if (c == '=') {
            t.kind = TokKind::Eq;
            advance(1);
        } else if (c == '*') {
            t.kind = TokKind::Star;
            advance(1);
        } else if (c == '.') {
            t.kind = TokKind::Dot;
            advance(1);
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            t.kind = TokKind::Arrow;
            advance(2);
        } else {
            errors.push_back({line, col, std::string("unexpected character '") + c + "'"});
            advance(1);
            continue;
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = TokKind::End;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

struct Parser {
    std::vector<Token> toks;
    std::size_t at = 0;
    std::vector<ParseError>& errors;
    MorphDocument& doc;
    // reference checks deferred until the whole document is known
    std::vector<std::function<void()>> deferred;

    Parser(std::vector<Token> t, std::vector<ParseError>& e, MorphDocument& d)
        : toks(std::move(t)), errors(e), doc(d) {}

    const Token& peek() const { return toks[at]; }
    const Token& get() {
        const Token& t = toks[at];
        if (t.kind != TokKind::End) ++at;
        return t;
    }
    bool done() const { return peek().kind == TokKind::End; }

    void fail(const Token& t, std::string msg) { errors.push_back({t.line, t.col, std::move(msg)}); }

    // error recovery: skip the rest of the offending line
    void sync_line(int line) {
        while (!done() && peek().line == line && peek().kind != TokKind::RBrace) ++at;
    }

    bool expect_kw(const char* kw) {
        if (peek().kind == TokKind::Ident && peek().text == kw) {
            ++at;
            return true;
        }
        fail(peek(), std::string("expected '") + kw + "'");
        return false;
    }

    std::optional<std::string> expect_ident(const char* what) {
        if (peek().kind == TokKind::Ident) return get().text;
        fail(peek(), std::string("expected ") + what);
        return std::nullopt;
    }

    std::optional<int> expect_int(const char* what) {
        if (peek().kind == TokKind::Int) return static_cast<int>(get().num);
        fail(peek(), std::string("expected ") + what);
        return std::nullopt;
    }

    bool expect(TokKind k, const char* what) {
        if (peek().kind == k) {
            ++at;
            return true;
        }
        fail(peek(), std::string("expected ") + what);
        return false;
    }

    bool at_kw(const char* kw) const {
        return peek().kind == TokKind::Ident && peek().text == kw;
    }

    // ids joined by '*'
    std::vector<std::string> star_list() {
        std::vector<std::string> refs;
        auto first = expect_ident("identifier");
        if (!first) return refs;
        refs.push_back(*first);
        while (peek().kind == TokKind::Star) {
            ++at;
            auto next = expect_ident("identifier after '*'");
            if (!next) break;
            refs.push_back(*next);
        }
        return refs;
    }

    void parse_document() {
        if (done()) return;
        const Token& head = peek();
        if (!(head.kind == TokKind::Ident && head.text == "morphfile")) {
            fail(head, "expected 'morphfile 1' header");
        } else {
            ++at;
            auto version = expect_int("format version");
            if (version && *version != 1)
                fail(toks[at - 1], "unsupported morphfile version " + std::to_string(*version));
        }
        while (!done()) {
            if (at_kw("structure")) {
                ++at;
                parse_structure();
            } else if (at_kw("network")) {
                ++at;
                parse_network();
            } else {
                fail(peek(), "expected 'structure' or 'network'");
                sync_line(peek().line);
                if (!done() && peek().kind == TokKind::RBrace) ++at;
            }
        }
        for (auto& check : deferred) check();
    }

    struct PendingCompat {
        Token pos;
        std::string a, b;
        int value = 0;
        bool assumed = false;
        std::string note;
    };

    void store_compat(CompatEntries& entries, const PendingCompat& pc, int scale_max) {
        if (pc.value < 0 || pc.value > scale_max) {
            fail(pc.pos, "value exceeds scale: " + std::to_string(pc.value) + " > " +
                             std::to_string(scale_max));
            return;
        }
        auto key = compat_key(pc.a, pc.b);
        auto it = entries.find(key);
        if (it != entries.end()) {
            if (it->second.value != pc.value || it->second.assumed != pc.assumed)
                fail(pc.pos, "contradictory duplicate compatibility entry (" + pc.a + "," + pc.b +
                                 ")");
            return;
        }
        entries[key] = {pc.value, pc.assumed, pc.note};
    }

    std::optional<PendingCompat> parse_compat_tail(Token pos, std::string a, std::string b) {
        PendingCompat pc;
        pc.pos = pos;
        pc.a = std::move(a);
        pc.b = std::move(b);
        if (!expect(TokKind::Eq, "'='")) return std::nullopt;
        auto v = expect_int("compatibility value");
        if (!v) return std::nullopt;
        pc.value = *v;
        if (at_kw("assumed")) {
            ++at;
            pc.assumed = true;
            if (peek().kind == TokKind::Str) pc.note = get().text;
        }
        return pc;
    }

    void parse_structure() {
        MorphStructure s;
        Token name_tok = peek();
        auto name = expect_ident("structure name");
        if (!name) {
            sync_line(name_tok.line);
            return;
        }
        s.name = *name;
        if (doc.find_structure(s.name))
            fail(name_tok, "duplicate definition of structure '" + s.name + "'");
        if (at_kw("partial")) {
            ++at;
            s.partial = true;
        }
        if (!expect(TokKind::LBrace, "'{'")) return;

        std::vector<PendingCompat> compats;

        while (!done() && peek().kind != TokKind::RBrace) {
            Token head = peek();
            if (at_kw("scale")) {
                ++at;
                if (auto v = expect_int("scale value")) {
                    if (*v < 1)
                        fail(head, "scale must be >= 1");
                    else
                        s.scale_max = *v;
                }
            } else if (at_kw("component")) {
                ++at;
                parse_component(s);
            } else if (at_kw("node")) {
                ++at;
                CompositeNode n;
                if (auto id = expect_ident("node id")) n.id = *id;
                if (expect(TokKind::Eq, "'='")) n.children = star_list();
                if (!n.id.empty()) s.nodes.push_back(std::move(n));
            } else if (at_kw("solutions")) {
                ++at;
                NodeSolutions ns;
                if (auto id = expect_ident("node id")) ns.node = *id;
                if (expect(TokKind::LBrace, "'{'")) {
                    while (!done() && peek().kind != TokKind::RBrace) {
                        Token etok = peek();
                        DeclaredSolution d;
                        auto nm = expect_ident("solution name");
                        if (!nm) {
                            sync_line(etok.line);
                            continue;
                        }
                        d.name = *nm;
                        if (!expect(TokKind::Eq, "'='")) {
                            sync_line(etok.line);
                            continue;
                        }
                        d.selection = star_list();
                        if (at_kw("priority")) {
                            ++at;
                            if (auto p = expect_int("priority value")) {
                                d.priority = *p;
                                d.has_priority = true;
                                if (*p < 1) fail(etok, "priority must be >= 1");
                            }
                        }
                        ns.entries.push_back(std::move(d));
                    }
                    expect(TokKind::RBrace, "'}'");
                }
                s.solutions.push_back(std::move(ns));
            } else if (at_kw("compat")) {
                ++at;
                auto a = expect_ident("option reference");
                auto b = a ? expect_ident("option reference") : std::nullopt;
                if (a && b) {
                    if (auto pc = parse_compat_tail(head, *a, *b)) compats.push_back(*pc);
                } else {
                    sync_line(head.line);
                }
            } else {
                fail(head, "unexpected token '" + head.text + "' in structure block");
                sync_line(head.line);
            }
        }
        expect(TokKind::RBrace, "'}'");

        for (const auto& pc : compats) store_compat(s.compat, pc, s.scale_max);

        doc.structures.push_back(std::move(s));
        std::size_t struct_idx = doc.structures.size() - 1;
        deferred.push_back([this, struct_idx, name_tok] { check_structure_refs(struct_idx, name_tok); });
    }

    void parse_component(MorphStructure& s) {
        Component c;
        Token pos = peek();
        if (auto id = expect_ident("component id")) c.id = *id;
        if (!expect(TokKind::LBrace, "'{'")) return;
        while (!done() && peek().kind != TokKind::RBrace) {
            Token head = peek();
            if (!at_kw("alt")) {
                fail(head, "expected 'alt' inside component block");
                sync_line(head.line);
                continue;
            }
            ++at;
            DesignAlternative a;
            if (auto id = expect_ident("alternative id")) a.id = *id;
            if (expect_kw("priority")) {
                if (auto p = expect_int("priority value")) {
                    a.priority = *p;
                    if (*p < 1) fail(head, "priority must be >= 1");
                }
            }
            if (peek().kind == TokKind::Str) a.label = get().text;
            if (!a.id.empty()) c.alternatives.push_back(std::move(a));
        }
        expect(TokKind::RBrace, "'}'");
        if (!c.id.empty())
            s.components.push_back(std::move(c));
        else
            fail(pos, "component without id");
    }

    void parse_network() {
        TopLevelNetwork net;
        Token name_tok = peek();
        auto name = expect_ident("network name");
        if (!name) {
            sync_line(name_tok.line);
            return;
        }
        net.name = *name;
        if (doc.find_network(net.name))
            fail(name_tok, "duplicate definition of network '" + net.name + "'");
        if (peek().kind == TokKind::Ident) {
            const std::string& t = peek().text;
            if (t == "chain" || t == "tree" || t == "dag" || t == "general") {
                net.shape = t == "chain"  ? ShapeHint::Chain
                            : t == "tree" ? ShapeHint::Tree
                            : t == "dag"  ? ShapeHint::Dag
                                          : ShapeHint::General;
                ++at;
            }
        }
        if (!expect(TokKind::LBrace, "'{'")) return;

        std::vector<PendingCompat> compats;

        while (!done() && peek().kind != TokKind::RBrace) {
            Token head = peek();
            if (at_kw("scale")) {
                ++at;
                if (auto v = expect_int("scale value")) {
                    if (*v < 1)
                        fail(head, "scale must be >= 1");
                    else
                        net.scale_max = *v;
                }
            } else if (at_kw("point")) {
                ++at;
                NetworkNode node;
                if (auto id = expect_ident("point id")) node.id = *id;
                if (expect_kw("uses")) {
                    if (auto sref = expect_ident("structure name")) node.structure = *sref;
                }
                if (at_kw("solutions")) {
                    ++at;
                    if (expect(TokKind::LBrace, "'{'")) {
                        while (!done() && peek().kind != TokKind::RBrace) {
                            Token etok = peek();
                            DeclaredSolution d;
                            auto nm = expect_ident("solution name");
                            if (!nm) {
                                sync_line(etok.line);
                                continue;
                            }
                            d.name = *nm;
                            if (!expect(TokKind::Eq, "'='")) {
                                sync_line(etok.line);
                                continue;
                            }
                            d.selection = star_list();
                            if (at_kw("priority")) {
                                ++at;
                                if (auto p = expect_int("priority value")) {
                                    d.priority = *p;
                                    d.has_priority = true;
                                    if (*p < 1) fail(etok, "priority must be >= 1");
                                }
                            }
                            node.solutions.push_back(std::move(d));
                        }
                        expect(TokKind::RBrace, "'}'");
                    }
                }
                if (!node.id.empty()) {
                    if (net.find_node(node.id))
                        fail(head, "duplicate node '" + node.id + "'");
                    net.nodes.push_back(std::move(node));
                }
            } else if (at_kw("analysis")) {
                ++at;
                NetworkNode node;
                node.is_analysis = true;
                if (auto id = expect_ident("analysis point id")) node.id = *id;
                if (expect(TokKind::LBrace, "'{'")) {
                    while (!done() && peek().kind != TokKind::RBrace) {
                        Token btok = peek();
                        if (!at_kw("on")) {
                            fail(btok, "expected 'on' inside analysis block");
                            sync_line(btok.line);
                            continue;
                        }
                        ++at;
                        Branch b;
                        if (peek().kind == TokKind::Str)
                            b.outcome = get().text;
                        else
                            fail(peek(), "expected quoted outcome label");
                        if (expect(TokKind::Arrow, "'->'")) {
                            if (auto target = expect_ident("successor id")) b.target = *target;
                        }
                        if (!b.outcome.empty() && !b.target.empty())
                            node.branches.push_back(std::move(b));
                    }
                    expect(TokKind::RBrace, "'}'");
                }
                if (!node.id.empty()) {
                    if (net.find_node(node.id))
                        fail(head, "duplicate node '" + node.id + "'");
                    net.nodes.push_back(std::move(node));
                }
            } else if (at_kw("edge")) {
                ++at;
                Edge e;
                if (auto from = expect_ident("edge source")) e.from = *from;
                if (expect(TokKind::Arrow, "'->'")) {
                    if (auto to = expect_ident("edge target")) e.to = *to;
                }
                if (!e.from.empty() && !e.to.empty()) net.edges.push_back(std::move(e));
            } else if (at_kw("compat")) {
                ++at;
                auto a = parse_point_ref();
                auto b = a ? parse_point_ref() : std::nullopt;
                if (a && b) {
                    if (auto pc = parse_compat_tail(head, *a, *b)) compats.push_back(*pc);
                } else {
                    sync_line(head.line);
                }
            } else if (at_kw("trajectory")) {
                ++at;
                NamedTrajectory tr;
                if (auto nm = expect_ident("trajectory name")) tr.name = *nm;
                if (expect(TokKind::LBrace, "'{'")) {
                    while (!done() && peek().kind != TokKind::RBrace) {
                        Token ptok = peek();
                        auto point = expect_ident("point id");
                        if (!point) {
                            sync_line(ptok.line);
                            continue;
                        }
                        if (!expect(TokKind::Eq, "'='")) {
                            sync_line(ptok.line);
                            continue;
                        }
                        auto sol = expect_ident("solution name");
                        if (sol) tr.picks.push_back({*point, *sol});
                    }
                    expect(TokKind::RBrace, "'}'");
                }
                if (!tr.name.empty()) net.trajectories.push_back(std::move(tr));
            } else {
                fail(head, "unexpected token '" + head.text + "' in network block");
                sync_line(head.line);
            }
        }
        expect(TokKind::RBrace, "'}'");

        for (const auto& pc : compats) store_compat(net.compat, pc, net.scale_max);

        doc.networks.push_back(std::move(net));
        std::size_t net_idx = doc.networks.size() - 1;
        deferred.push_back([this, net_idx, name_tok] { check_network_refs(net_idx, name_tok); });
    }

    // "point.solution" written as three tokens
    std::optional<std::string> parse_point_ref() {
        auto p = expect_ident("point id");
        if (!p) return std::nullopt;
        if (!expect(TokKind::Dot, "'.'")) return std::nullopt;
        auto s = expect_ident("solution name");
        if (!s) return std::nullopt;
        return *p + "." + *s;
    }

    void check_structure_refs(std::size_t idx, Token pos) {
        const MorphStructure& s = doc.structures[idx];
        // options selectable per node child: component alternatives or the
        // declared solutions of a composite child
        for (const auto& ns : s.solutions) {
            const CompositeNode* node = s.find_node(ns.node);
            if (!node) {
                fail(pos, "structure '" + s.name + "' declares solutions for unknown node '" +
                              ns.node + "'");
                continue;
            }
            for (const auto& d : ns.entries) {
                std::set<std::string> covered;
                for (const auto& ref : d.selection) {
                    bool found = false;
                    for (const auto& child : node->children) {
                        const Component* c = s.find_component(child);
                        if (c && c->find(ref)) {
                            found = true;
                            if (!covered.insert(child).second)
                                fail(pos, "solution '" + d.name + "' selects child '" + child +
                                              "' twice");
                        } else if (const NodeSolutions* sub = s.find_solutions(child)) {
                            for (const auto& sd : sub->entries)
                                if (sd.name == ref) {
                                    found = true;
                                    if (!covered.insert(child).second)
                                        fail(pos, "solution '" + d.name + "' selects child '" +
                                                      child + "' twice");
                                }
                        }
                    }
                    if (!found)
                        fail(pos, "solution '" + d.name + "' references unknown option '" + ref +
                                      "'");
                }
                if (covered.size() != node->children.size())
                    fail(pos, "solution '" + d.name + "' does not select one option per child of '" +
                                  ns.node + "'");
            }
        }
        std::set<std::string> known;
        for (const auto& c : s.components)
            for (const auto& a : c.alternatives) known.insert(a.id);
        for (const auto& ns : s.solutions)
            for (const auto& d : ns.entries) known.insert(d.name);
        for (const auto& [key, val] : s.compat) {
            if (!known.count(key.first))
                fail(pos, "compatibility entry references unknown option '" + key.first + "'");
            if (!known.count(key.second))
                fail(pos, "compatibility entry references unknown option '" + key.second + "'");
        }
    }

    void check_network_refs(std::size_t idx, Token pos) {
        const TopLevelNetwork& net = doc.networks[idx];
        for (const auto& node : net.nodes) {
            if (node.is_analysis) {
                for (const auto& b : node.branches)
                    if (!net.find_node(b.target))
                        fail(pos, "analysis point '" + node.id + "' targets unknown node '" +
                                      b.target + "'");
                continue;
            }
            const MorphStructure* s = doc.find_structure(node.structure);
            if (!s) {
                fail(pos, "point '" + node.id + "' uses unknown structure '" + node.structure +
                              "'");
                continue;
            }
            for (const auto& d : node.solutions) {
                std::set<std::string> covered;
                for (const auto& ref : d.selection) {
                    const Component* owner = nullptr;
                    for (const auto& c : s->components)
                        if (c.find(ref)) owner = &c;
                    if (!owner) {
                        fail(pos, "solution '" + d.name + "' at point '" + node.id +
                                      "' references unknown alternative '" + ref + "'");
                    } else if (!covered.insert(owner->id).second) {
                        fail(pos, "solution '" + d.name + "' at point '" + node.id +
                                      "' selects component '" + owner->id + "' twice");
                    }
                }
                if (covered.size() != s->components.size())
                    fail(pos, "solution '" + d.name + "' at point '" + node.id +
                                  "' does not select one alternative per component");
            }
        }
        for (const auto& e : net.edges) {
            if (!net.find_node(e.from))
                fail(pos, "edge references unknown node '" + e.from + "'");
            if (!net.find_node(e.to)) fail(pos, "edge references unknown node '" + e.to + "'");
        }
        auto solution_exists = [&](const std::string& ref) {
            auto dot = ref.find('.');
            if (dot == std::string::npos) return false;
            const NetworkNode* n = net.find_node(ref.substr(0, dot));
            if (!n || n->is_analysis) return false;
            for (const auto& d : n->solutions)
                if (d.name == ref.substr(dot + 1)) return true;
            return false;
        };
        for (const auto& [key, val] : net.compat) {
            if (!solution_exists(key.first))
                fail(pos, "compatibility entry references unknown solution '" + key.first + "'");
            if (!solution_exists(key.second))
                fail(pos, "compatibility entry references unknown solution '" + key.second + "'");
        }
        for (const auto& tr : net.trajectories) {
            for (const auto& [point, sol] : tr.picks) {
                const NetworkNode* n = net.find_node(point);
                if (!n || n->is_analysis) {
                    fail(pos, "trajectory '" + tr.name + "' assigns unknown point '" + point +
                                  "'");
                    continue;
                }
                bool found = false;
                for (const auto& d : n->solutions) found |= d.name == sol;
                if (!found)
                    fail(pos, "trajectory '" + tr.name + "' assigns unknown solution '" + sol +
                                  "' at point '" + point + "'");
            }
        }
    }
};

}  // namespace mf_detail

inline ParseResult parse(std::string_view text) {
    ParseResult result;
    auto toks = mf_detail::lex(text, result.errors);
    mf_detail::Parser p(std::move(toks), result.errors, result.doc);
    p.parse_document();
    return result;
}

namespace mf_detail {

inline void write_solution(std::ostream& os, const DeclaredSolution& d, const char* indent) {
    os << indent << d.name << " = ";
    for (std::size_t i = 0; i < d.selection.size(); ++i) {
        if (i) os << "*";
        os << d.selection[i];
    }
    if (d.has_priority) os << " priority " << d.priority;
    os << "\n";
}

inline void write_compat(std::ostream& os, const CompatEntries& entries, bool dotted) {
    for (const auto& [key, val] : entries) {
        os << "  compat " << key.first << " " << key.second << " = " << val.value;
        (void)dotted;
        if (val.assumed) os << " assumed";
        if (val.assumed && !val.note.empty()) os << " \"" << val.note << "\"";
        os << "\n";
    }
}

}  // namespace mf_detail

// Canonical text form: definitions sorted by kind then name, block contents
// in declaration order, compatibility entries in normalized key order.
// Serializing the same document twice yields identical bytes.
inline std::string serialize(const MorphDocument& doc) {
    std::ostringstream os;
    os << "morphfile 1\n";

    std::vector<const MorphStructure*> structures;
    for (const auto& s : doc.structures) structures.push_back(&s);
    std::sort(structures.begin(), structures.end(),
              [](auto* a, auto* b) { return a->name < b->name; });
    std::vector<const TopLevelNetwork*> networks;
    for (const auto& n : doc.networks) networks.push_back(&n);
    std::sort(networks.begin(), networks.end(),
              [](auto* a, auto* b) { return a->name < b->name; });

    for (const auto* s : structures) {
        os << "\nstructure " << s->name << (s->partial ? " partial" : "") << " {\n";
        os << "  scale " << s->scale_max << "\n";
        for (const auto& c : s->components) {
            os << "  component " << c.id << " {\n";
            for (const auto& a : c.alternatives) {
                os << "    alt " << a.id << " priority " << a.priority;
                if (!a.label.empty()) os << " \"" << a.label << "\"";
                os << "\n";
            }
            os << "  }\n";
        }
        for (const auto& n : s->nodes) {
            os << "  node " << n.id << " =";
            for (std::size_t i = 0; i < n.children.size(); ++i)
                os << (i ? " * " : " ") << n.children[i];
            os << "\n";
        }
        for (const auto& ns : s->solutions) {
            os << "  solutions " << ns.node << " {\n";
            for (const auto& d : ns.entries) mf_detail::write_solution(os, d, "    ");
            os << "  }\n";
        }
        mf_detail::write_compat(os, s->compat, false);
        os << "}\n";
    }

    for (const auto* net : networks) {
        os << "\nnetwork " << net->name << " " << shape_name(net->shape) << " {\n";
        os << "  scale " << net->scale_max << "\n";
        for (const auto& n : net->nodes) {
            if (n.is_analysis) {
                os << "  analysis " << n.id << " {\n";
                for (const auto& b : n.branches)
                    os << "    on \"" << b.outcome << "\" -> " << b.target << "\n";
                os << "  }\n";
            } else {
                os << "  point " << n.id << " uses " << n.structure;
                if (n.solutions.empty()) {
                    os << "\n";
                } else {
                    os << " solutions {\n";
                    for (const auto& d : n.solutions) mf_detail::write_solution(os, d, "    ");
                    os << "  }\n";
                }
            }
        }
        for (const auto& e : net->edges) os << "  edge " << e.from << " -> " << e.to << "\n";
        mf_detail::write_compat(os, net->compat, true);
        for (const auto& tr : net->trajectories) {
            os << "  trajectory " << tr.name << " {\n";
            for (const auto& [p, sol] : tr.picks) os << "    " << p << " = " << sol << "\n";
            os << "  }\n";
        }
        os << "}\n";
    }
    return os.str();
}

// Order-insensitive at the top level, order-sensitive inside definitions
// (declaration order is semantic for graph tie-breaking).
inline bool structurally_equal(const MorphDocument& a, const MorphDocument& b) {
    auto sa = a.structures;
    auto sb = b.structures;
    auto na = a.networks;
    auto nb = b.networks;
    auto by_name = [](const auto& x, const auto& y) { return x.name < y.name; };
    std::sort(sa.begin(), sa.end(), by_name);
    std::sort(sb.begin(), sb.end(), by_name);
    std::sort(na.begin(), na.end(), by_name);
    std::sort(nb.begin(), nb.end(), by_name);
    return sa == sb && na == nb;
}

// DOT-compatible rendering: morph points as boxes (carrying the assigned
// solution when a trajectory is supplied), analysis points as diamonds.
inline std::string export_graph(const TopLevelNetwork& net,
                                const NamedTrajectory* trajectory = nullptr) {
    std::ostringstream os;
    os << "digraph " << (trajectory ? trajectory->name : net.name) << " {\n";
    for (const auto& n : net.nodes) {
        if (n.is_analysis) {
            os << "  " << n.id << " [shape=diamond];\n";
            continue;
        }
        std::string chosen;
        if (trajectory)
            for (const auto& [p, sol] : trajectory->picks)
                if (p == n.id) chosen = sol;
        if (chosen.empty())
            os << "  " << n.id << " [shape=box];\n";
        else
            os << "  " << n.id << " [shape=box, label=\"" << n.id << ": " << chosen << "\"];\n";
    }
    for (const auto& a : net.arcs()) {
        os << "  " << a.from << " -> " << a.to;
        if (!a.outcome.empty()) os << " [label=\"" << a.outcome << "\"]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace morphsynth
