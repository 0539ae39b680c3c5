/*
 * Copyright 2026 the mdlc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mdlc/datalog.hh"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

namespace mdlc {

std::string Atom::to_text() const {
    std::string out = pred + "(";
    for (size_t i = 0; i < vars.size(); ++i) {
        if (i) out += ",";
        out += vars[i];
    }
    return out + ")";
}

std::string Rule::to_text() const {
    std::string out = head.to_text() + " :- ";
    for (size_t i = 0; i < body.size(); ++i) {
        if (i) out += ", ";
        out += body[i].to_text();
    }
    return out + ".";
}

std::set<std::string> Rule::variables() const {
    std::set<std::string> vars(head.vars.begin(), head.vars.end());
    for (const auto& a : body) vars.insert(a.vars.begin(), a.vars.end());
    return vars;
}

std::set<std::string> DatalogProgram::idb() const {
    std::set<std::string> out;
    for (const auto& r : rules) out.insert(r.head.pred);
    return out;
}

std::set<std::string> DatalogProgram::edb() const {
    auto heads = idb();
    std::set<std::string> out;
    for (const auto& r : rules)
        for (const auto& a : r.body)
            if (!heads.count(a.pred)) out.insert(a.pred);
    return out;
}

std::string DatalogProgram::to_text() const {
    std::string out;
    for (const auto& r : rules) out += r.to_text() + "\n";
    return out;
}

std::string DatalogQuery::to_text() const {
    return program.to_text() + "QUERY " + query_pred +
           (mode == QueryMode::Unary ? " UNARY" : " BOOLEAN") + "\n";
}

size_t DatalogQuery::size() const {
    size_t n = 0;
    for (const auto& r : program.rules) n += 1 + r.body.size();
    return n;
}

namespace {

int builtin_arity(const std::string& pred) {
    static const std::set<std::string> unary = {"root", "leaf", "ls", "hnlc", "hnrc"};
    static const std::set<std::string> binary = {"child", "desc", "fc", "ns", "lc", "rc"};
    if (pred.rfind("label_", 0) == 0) return 1;
    if (unary.count(pred)) return 1;
    if (binary.count(pred)) return 2;
    return -1;
}

void check_atom(const Atom& a, SchemaKind schema, const Alphabet& alphabet,
                const std::set<std::string>& idb) {
    if (a.vars.empty() || a.vars.size() > 2)
        throw validation_error("atom arity must be 1 or 2: " + a.to_text());
    if (is_builtin_predicate(a.pred)) {
        int ar = builtin_arity(a.pred);
        if (ar != static_cast<int>(a.vars.size()))
            throw validation_error("wrong arity for built-in '" + a.pred + "'");
        if (a.pred.rfind("label_", 0) == 0) {
            std::string sym = a.pred.substr(6);
            if (!alphabet.contains(sym))
                throw validation_error("unknown label '" + sym + "' in " + a.to_text());
        } else if (!schema_allows(schema, a.pred, ar)) {
            throw validation_error("predicate '" + a.pred + "' not available in schema " +
                                   schema_name(schema));
        }
    } else {
        if (!idb.count(a.pred))
            throw validation_error("unknown predicate '" + a.pred + "'");
        if (a.vars.size() != 1)
            throw validation_error("intensional predicates are unary: " + a.to_text());
    }
}

}  // namespace

void validate_program(const DatalogProgram& p, SchemaKind schema, const Alphabet& alphabet) {
    auto idb = p.idb();
    for (const auto& name : idb)
        if (is_builtin_predicate(name))
            throw validation_error("head predicate '" + name + "' collides with a built-in");
    for (const auto& r : p.rules) {
        if (r.body.empty()) throw validation_error("empty rule body in " + r.to_text());
        if (r.head.vars.size() != 1)
            throw validation_error("non-monadic head in " + r.to_text());
        std::set<std::string> body_vars;
        for (const auto& a : r.body) body_vars.insert(a.vars.begin(), a.vars.end());
        for (const auto& v : r.head.vars)
            if (!body_vars.count(v))
                throw validation_error("unsafe rule (head variable '" + v + "' not in body): " +
                                       r.to_text());
        check_atom(r.head, schema, alphabet, idb);
        for (const auto& a : r.body) check_atom(a, schema, alphabet, idb);
    }
}

void validate_query(const DatalogQuery& q) {
    if (!q.alphabet) throw validation_error("query has no alphabet");
    validate_program(q.program, q.schema, *q.alphabet);
    if (!q.program.idb().count(q.query_pred))
        throw validation_error("query predicate '" + q.query_pred + "' is not intensional");
}

namespace {

struct ProgramParser {
    const std::string& s;
    size_t pos = 0;

    explicit ProgramParser(const std::string& text) : s(text) {}

    void skip_ws_comments() {
        while (pos < s.size()) {
            char c = s[pos];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos;
            } else if (c == '#') {
                while (pos < s.size() && s[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    bool name_char(char c) const {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '|' || c == '!' ||
               c == '-';
    }

    std::string read_name() {
        skip_ws_comments();
        size_t start = pos;
        while (pos < s.size() && name_char(s[pos])) ++pos;
        if (pos == start) throw parse_error("expected a name", pos);
        std::string name = s.substr(start, pos - start);
        // Composite labels extend a label_ predicate through a balanced group.
        if (name == "label_" && pos < s.size() && s[pos] == '(') {
            int depth = 0;
            size_t gstart = pos;
            while (pos < s.size()) {
                if (s[pos] == '(') ++depth;
                if (s[pos] == ')') {
                    --depth;
                    if (depth == 0) {
                        ++pos;
                        break;
                    }
                }
                ++pos;
            }
            if (depth != 0) throw parse_error("unbalanced label", gstart);
            name += s.substr(gstart, pos - gstart);
        }
        return name;
    }

    void expect(char c) {
        skip_ws_comments();
        if (pos >= s.size() || s[pos] != c)
            throw parse_error(std::string("expected '") + c + "'", pos);
        ++pos;
    }

    bool peek(char c) {
        skip_ws_comments();
        return pos < s.size() && s[pos] == c;
    }

    static std::string lower(std::string x) {
        std::transform(x.begin(), x.end(), x.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        return x;
    }

    Atom read_atom() {
        std::string name = read_name();
        // Built-in keywords are case-insensitive; normalize their prefix.
        std::string low = lower(name);
        if (low.rfind("label_", 0) == 0)
            name = "label_" + name.substr(6);
        else if (is_builtin_predicate(low))
            name = low;
        Atom a;
        a.pred = name;
        expect('(');
        a.vars.push_back(read_name());
        while (peek(',')) {
            ++pos;
            a.vars.push_back(read_name());
        }
        expect(')');
        return a;
    }
};

}  // namespace

DatalogProgram parse_program(const std::string& text, SchemaKind schema, const Alphabet& alphabet) {
    DatalogProgram p;
    ProgramParser pp(text);
    pp.skip_ws_comments();
    while (pp.pos < text.size()) {
        Rule r;
        r.head = pp.read_atom();
        pp.skip_ws_comments();
        if (pp.pos + 1 < text.size() && text[pp.pos] == ':' && text[pp.pos + 1] == '-') {
            pp.pos += 2;
        } else {
            throw parse_error("expected ':-'", pp.pos);
        }
        r.body.push_back(pp.read_atom());
        while (pp.peek(',')) {
            ++pp.pos;
            r.body.push_back(pp.read_atom());
        }
        pp.expect('.');
        p.rules.push_back(std::move(r));
        pp.skip_ws_comments();
    }
    validate_program(p, schema, alphabet);
    return p;
}

DatalogQuery parse_query(const std::string& text, SchemaKind schema, AlphabetPtr alphabet) {
    // Split off the QUERY line.
    std::istringstream in(text);
    std::string line, program_text, query_pred, mode_word;
    bool saw_query = false;
    while (std::getline(in, line)) {
        std::string stripped = line;
        auto first = stripped.find_first_not_of(" \t\r");
        if (first != std::string::npos && stripped.compare(first, 6, "QUERY ") == 0) {
            std::istringstream ql(stripped.substr(first + 6));
            ql >> query_pred >> mode_word;
            saw_query = true;
        } else {
            program_text += line + "\n";
        }
    }
    if (!saw_query) throw parse_error("missing QUERY line", text.size());
    DatalogQuery q;
    q.alphabet = std::move(alphabet);
    q.schema = schema;
    q.program = parse_program(program_text, schema, *q.alphabet);
    q.query_pred = query_pred;
    if (mode_word.empty() || mode_word == "BOOLEAN")
        q.mode = QueryMode::Boolean;
    else if (mode_word == "UNARY")
        q.mode = QueryMode::Unary;
    else
        throw parse_error("bad query mode '" + mode_word + "'", text.size());
    validate_query(q);
    return q;
}

// ---------------------------------------------------------------------------
// Evaluation. Predicates and variables are interned per call; rules fire via
// backtracking joins over per-predicate indexes.

namespace {

struct EvalFacts {
    int num_nodes;
    std::unordered_map<std::string, int> pred_ids;
    std::vector<std::string> pred_names;
    std::vector<char> pred_unary;
    // unary: pred -> bitmap; binary: pred -> pair set + adjacency
    std::vector<std::vector<char>> unary;
    std::vector<std::set<std::pair<int, int>>> binary;
    std::vector<std::vector<std::vector<int>>> succ;  // pred -> a -> list of b
    std::vector<std::vector<std::vector<int>>> pred_of;  // pred -> b -> list of a

    int intern(const std::string& name, bool is_unary) {
        auto it = pred_ids.find(name);
        if (it != pred_ids.end()) return it->second;
        int id = static_cast<int>(pred_names.size());
        pred_ids.emplace(name, id);
        pred_names.push_back(name);
        pred_unary.push_back(is_unary);
        unary.emplace_back(num_nodes, 0);
        binary.emplace_back();
        succ.emplace_back(num_nodes);
        pred_of.emplace_back(num_nodes);
        return id;
    }

    bool add_unary(int p, int a) {
        if (unary[p][a]) return false;
        unary[p][a] = 1;
        return true;
    }
    bool add_binary(int p, int a, int b) {
        if (!binary[p].insert({a, b}).second) return false;
        succ[p][a].push_back(b);
        pred_of[p][b].push_back(a);
        return true;
    }
};

struct CompiledAtom {
    int pred;
    bool unary;
    int v0, v1;  // variable slots
};

struct CompiledRule {
    CompiledAtom head;
    std::vector<CompiledAtom> body;
    int num_vars;
};

struct Evaluator {
    EvalFacts f;
    std::vector<CompiledRule> rules;

    Evaluator(const DatalogProgram& p, const FactSet& base) {
        f.num_nodes = base.num_nodes;
        for (const auto& [name, s] : base.unary) {
            int id = f.intern(name, true);
            for (int a : s) f.add_unary(id, a);
        }
        for (const auto& [name, s] : base.binary) {
            int id = f.intern(name, false);
            for (auto [a, b] : s) f.add_binary(id, a, b);
        }
        for (const auto& r : p.rules) {
            CompiledRule cr;
            std::unordered_map<std::string, int> var_ids;
            auto var = [&](const std::string& v) {
                auto it = var_ids.find(v);
                if (it != var_ids.end()) return it->second;
                int id = static_cast<int>(var_ids.size());
                var_ids.emplace(v, id);
                return id;
            };
            auto compile = [&](const Atom& a) {
                CompiledAtom ca;
                ca.unary = a.vars.size() == 1;
                ca.pred = f.intern(a.pred, ca.unary);
                ca.v0 = var(a.vars[0]);
                ca.v1 = ca.unary ? -1 : var(a.vars[1]);
                return ca;
            };
            cr.head = compile(r.head);
            for (const auto& a : r.body) cr.body.push_back(compile(a));
            cr.num_vars = static_cast<int>(var_ids.size());
            rules.push_back(std::move(cr));
        }
    }

    // Matches body atoms from position i on; `delta_pos`, when >= 0, marks
    // the atom that must be matched against the delta instead of the full
    // set. New heads are collected into `out`.
    template <typename OnMatch>
    void join(const CompiledRule& r, size_t i, std::vector<int>& binding, int delta_pos,
              const EvalFacts& delta, const OnMatch& on_match) {
        if (i == r.body.size()) {
            on_match(binding);
            return;
        }
        const CompiledAtom& a = r.body[i];
        const EvalFacts& src = (static_cast<int>(i) == delta_pos) ? delta : f;
        int p = a.pred;
        // The delta may not know this predicate at all.
        if (static_cast<int>(i) == delta_pos) {
            auto it = delta.pred_ids.find(f.pred_names[a.pred]);
            if (it == delta.pred_ids.end()) return;
            p = it->second;
        }
        if (a.unary) {
            int b0 = binding[a.v0];
            if (b0 >= 0) {
                if (src.unary[p][b0]) join(r, i + 1, binding, delta_pos, delta, on_match);
            } else {
                for (int n = 0; n < f.num_nodes; ++n) {
                    if (!src.unary[p][n]) continue;
                    binding[a.v0] = n;
                    join(r, i + 1, binding, delta_pos, delta, on_match);
                }
                binding[a.v0] = -1;
            }
            return;
        }
        int b0 = binding[a.v0], b1 = binding[a.v1];
        if (b0 >= 0 && b1 >= 0) {
            if (src.binary[p].count({b0, b1})) join(r, i + 1, binding, delta_pos, delta, on_match);
        } else if (b0 >= 0) {
            for (int n : src.succ[p][b0]) {
                if (a.v0 == a.v1 && n != b0) continue;
                binding[a.v1] = n;
                join(r, i + 1, binding, delta_pos, delta, on_match);
            }
            binding[a.v1] = -1;
        } else if (b1 >= 0) {
            for (int n : src.pred_of[p][b1]) {
                binding[a.v0] = n;
                join(r, i + 1, binding, delta_pos, delta, on_match);
            }
            binding[a.v0] = -1;
        } else {
            for (const auto& [x, y] : src.binary[p]) {
                if (a.v0 == a.v1 && x != y) continue;
                binding[a.v0] = x;
                binding[a.v1] = y;
                join(r, i + 1, binding, delta_pos, delta, on_match);
            }
            binding[a.v0] = -1;
            binding[a.v1] = -1;
        }
    }

    // Runs every rule once against the current facts (optionally requiring
    // one body atom to come from `delta`) and returns the new head facts.
    std::vector<std::pair<int, int>> step(int delta_pos_mode, const EvalFacts& delta) {
        std::vector<std::pair<int, int>> fresh;
        for (const auto& r : rules) {
            std::vector<int> positions;
            if (delta_pos_mode < 0) {
                positions.push_back(-1);
            } else {
                for (size_t i = 0; i < r.body.size(); ++i) positions.push_back(static_cast<int>(i));
            }
            for (int dp : positions) {
                std::vector<int> binding(r.num_vars, -1);
                join(r, 0, binding, dp, delta, [&](const std::vector<int>& bd) {
                    int node = bd[r.head.v0];
                    if (!f.unary[r.head.pred][node]) fresh.emplace_back(r.head.pred, node);
                });
            }
        }
        return fresh;
    }
};

FactSet to_fact_set(const Evaluator& ev) {
    FactSet out;
    out.num_nodes = ev.f.num_nodes;
    for (size_t p = 0; p < ev.f.pred_names.size(); ++p) {
        if (ev.f.pred_unary[p]) {
            std::set<int>& s = out.unary[ev.f.pred_names[p]];
            for (int n = 0; n < ev.f.num_nodes; ++n)
                if (ev.f.unary[p][n]) s.insert(n);
            if (s.empty()) out.unary.erase(ev.f.pred_names[p]);
        } else if (!ev.f.binary[p].empty()) {
            out.binary[ev.f.pred_names[p]] = ev.f.binary[p];
        }
    }
    return out;
}

}  // namespace

FactSet immediate_consequence(const DatalogProgram& p, const FactSet& facts) {
    Evaluator ev(p, facts);
    EvalFacts none;
    none.num_nodes = facts.num_nodes;
    auto fresh = ev.step(-1, none);
    for (auto [pred, node] : fresh) ev.f.add_unary(pred, node);
    return to_fact_set(ev);
}

FactSet fixpoint_naive(const DatalogProgram& p, const FactSet& facts) {
    FactSet cur = facts;
    while (true) {
        FactSet next = immediate_consequence(p, cur);
        if (next == cur) return cur;
        cur = std::move(next);
    }
}

FactSet fixpoint(const DatalogProgram& p, const FactSet& facts) {
    Evaluator ev(p, facts);
    // round 0: fire everything once
    EvalFacts none;
    none.num_nodes = facts.num_nodes;
    auto fresh = ev.step(-1, none);
    while (!fresh.empty()) {
        EvalFacts delta;
        delta.num_nodes = facts.num_nodes;
        bool any = false;
        for (auto [pred, node] : fresh) {
            if (ev.f.add_unary(pred, node)) {
                int dp = delta.intern(ev.f.pred_names[pred], true);
                delta.add_unary(dp, node);
                any = true;
            }
        }
        if (!any) break;
        fresh = ev.step(0, delta);
    }
    return to_fact_set(ev);
}

namespace {
std::set<int> eval_on_facts(const DatalogQuery& q, const FactSet& base) {
    FactSet fix = fixpoint(q.program, base);
    auto it = fix.unary.find(q.query_pred);
    if (it == fix.unary.end()) return {};
    return it->second;
}
}  // namespace

std::set<int> eval_unary(const DatalogQuery& q, const LabeledTree& tree) {
    if (q.alphabet && !(*q.alphabet == *tree.alphabet))
        throw validation_error("query and tree alphabets differ");
    return eval_on_facts(q, facts_of(tree, q.schema));
}

bool eval_boolean(const DatalogQuery& q, const LabeledTree& tree) {
    return eval_unary(q, tree).count(tree.root()) != 0;
}

std::set<int> eval_unary(const DatalogQuery& q, const BinaryTree& tree) {
    if (q.schema != SchemaKind::TauB)
        throw validation_error("binary trees evaluate tau_b queries only");
    if (q.alphabet && !(*q.alphabet == *tree.alphabet))
        throw validation_error("query and tree alphabets differ");
    return eval_on_facts(q, facts_of(tree, SchemaKind::TauB));
}

bool eval_boolean(const DatalogQuery& q, const BinaryTree& tree) {
    return eval_unary(q, tree).count(tree.root()) != 0;
}

DatalogQuery prune_query(const DatalogQuery& q) {
    // Forward: a head is derivable only if some rule for it has a body all
    // of whose intensional predicates are derivable.
    std::set<std::string> derivable;
    bool changed = true;
    auto idb = q.program.idb();
    while (changed) {
        changed = false;
        for (const auto& r : q.program.rules) {
            if (derivable.count(r.head.pred)) continue;
            bool ok = true;
            for (const auto& a : r.body)
                if (idb.count(a.pred) && !derivable.count(a.pred)) ok = false;
            if (ok) {
                derivable.insert(r.head.pred);
                changed = true;
            }
        }
    }
    // Backward: predicates reachable from the query predicate through
    // rules whose bodies are fully derivable.
    std::set<std::string> needed = {q.query_pred};
    changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : q.program.rules) {
            if (!needed.count(r.head.pred) || !derivable.count(r.head.pred)) continue;
            bool fireable = true;
            for (const auto& a : r.body)
                if (idb.count(a.pred) && !derivable.count(a.pred)) fireable = false;
            if (!fireable) continue;
            for (const auto& a : r.body)
                if (idb.count(a.pred) && needed.insert(a.pred).second) changed = true;
        }
    }
    DatalogQuery out = q;
    out.program.rules.clear();
    for (const auto& r : q.program.rules) {
        if (!needed.count(r.head.pred)) continue;
        bool fireable = derivable.count(r.head.pred) != 0;
        for (const auto& a : r.body)
            if (idb.count(a.pred) && !derivable.count(a.pred)) fireable = false;
        if (fireable) out.program.rules.push_back(r);
    }
    // The query predicate must stay intensional even when nothing derives it.
    if (!out.program.idb().count(q.query_pred)) {
        // self-recursive with no base case: in normal form, fires nowhere
        Atom self{q.query_pred, {"x"}};
        out.program.rules.push_back({self, {self, self}});
    }
    return out;
}

}  // namespace mdlc
