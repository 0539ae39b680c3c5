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

#include "mdlc/rewrite.hh"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <map>
#include <unordered_set>

namespace mdlc {

int RuleGraph::var_index(const std::string& v) const {
    for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == v) return static_cast<int>(i);
    return -1;
}

RuleGraph build_rule_graph(const Rule& r) {
    RuleGraph g;
    auto add_var = [&](const std::string& v) {
        if (g.var_index(v) < 0) g.vars.push_back(v);
    };
    for (const auto& v : r.head.vars) add_var(v);
    for (const auto& a : r.body)
        for (const auto& v : a.vars) add_var(v);
    for (size_t i = 0; i < r.body.size(); ++i) {
        const Atom& a = r.body[i];
        if (a.vars.size() == 2)
            g.edges.push_back({g.var_index(a.vars[0]), g.var_index(a.vars[1]), a.pred,
                               static_cast<int>(i)});
    }
    return g;
}

bool has_directed_cycle(const RuleGraph& g) {
    int n = static_cast<int>(g.vars.size());
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : g.edges) {
        if (e.from == e.to) return true;
        adj[e.from].push_back(e.to);
    }
    std::vector<int> state(n, 0);  // 0 new, 1 open, 2 done
    std::function<bool(int)> dfs = [&](int v) {
        state[v] = 1;
        for (int w : adj[v]) {
            if (state[w] == 1) return true;
            if (state[w] == 0 && dfs(w)) return true;
        }
        state[v] = 2;
        return false;
    };
    for (int v = 0; v < n; ++v)
        if (state[v] == 0 && dfs(v)) return true;
    return false;
}

namespace {
struct UnionFind {
    std::vector<int> up;
    explicit UnionFind(int n) : up(n) {
        for (int i = 0; i < n; ++i) up[i] = i;
    }
    int find(int x) { return up[x] == x ? x : up[x] = find(up[x]); }
    bool join(int a, int b) {  // false when already connected
        a = find(a);
        b = find(b);
        if (a == b) return false;
        up[a] = b;
        return true;
    }
};
}  // namespace

bool has_undirected_cycle(const RuleGraph& g) {
    UnionFind uf(static_cast<int>(g.vars.size()));
    for (const auto& e : g.edges) {
        if (e.from == e.to) return true;
        if (!uf.join(e.from, e.to)) return true;
    }
    return false;
}

TmnfForm tmnf_form(const Rule& r) {
    if (r.head.vars.size() != 1 || r.body.size() != 2) return TmnfForm::NotTmnf;
    const std::string& x = r.head.vars[0];
    const Atom &a0 = r.body[0], &a1 = r.body[1];
    if (a0.vars.size() == 1 && a1.vars.size() == 1) {
        if (a0.vars[0] == x && a1.vars[0] == x) return TmnfForm::UnaryUnary;
        return TmnfForm::NotTmnf;
    }
    const Atom* bin = nullptr;
    const Atom* un = nullptr;
    if (a0.vars.size() == 2 && a1.vars.size() == 1) {
        bin = &a0;
        un = &a1;
    } else if (a1.vars.size() == 2 && a0.vars.size() == 1) {
        bin = &a1;
        un = &a0;
    } else {
        return TmnfForm::NotTmnf;
    }
    if (bin->vars[0] == bin->vars[1]) return TmnfForm::NotTmnf;
    if (bin->vars[0] == x && un->vars[0] == bin->vars[1]) return TmnfForm::BinaryForward;
    if (bin->vars[1] == x && un->vars[0] == bin->vars[0]) return TmnfForm::BinaryBackward;
    return TmnfForm::NotTmnf;
}

bool is_tmnf(const DatalogProgram& p) {
    for (const auto& r : p.rules)
        if (tmnf_form(r) == TmnfForm::NotTmnf) return false;
    return true;
}

std::vector<TmnfForm> tmnf_certificate(const DatalogProgram& p) {
    std::vector<TmnfForm> out;
    for (const auto& r : p.rules) {
        TmnfForm f = tmnf_form(r);
        if (f == TmnfForm::NotTmnf)
            throw validation_error("rule not in normal form: " + r.to_text());
        out.push_back(f);
    }
    return out;
}

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    return out;
}

std::unordered_set<std::string> all_pred_names(const DatalogProgram& p) {
    std::unordered_set<std::string> names;
    for (const auto& r : p.rules) {
        names.insert(r.head.pred);
        for (const auto& a : r.body) names.insert(a.pred);
    }
    return names;
}

void substitute_var(Rule& r, const std::string& from, const std::string& to) {
    for (auto& v : r.head.vars)
        if (v == from) v = to;
    for (auto& a : r.body)
        for (auto& v : a.vars)
            if (v == from) v = to;
}

void dedupe_body(Rule& r) {
    std::vector<Atom> out;
    for (const auto& a : r.body)
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    r.body = std::move(out);
}

// Deterministic key identifying a rule up to variable renaming and body
// order. Distinct keys may still denote equivalent rules; equal keys always
// denote equivalent ones, which is the safe direction for a seen-set.
std::string rule_key(Rule r) {
    for (int pass = 0; pass < 3; ++pass) {
        std::map<std::string, std::string> ren;
        auto name = [&](const std::string& v) {
            auto it = ren.find(v);
            if (it != ren.end()) return it->second;
            std::string nv = "v" + std::to_string(ren.size());
            ren.emplace(v, nv);
            return nv;
        };
        for (auto& v : r.head.vars) v = name(v);
        for (auto& a : r.body)
            for (auto& v : a.vars) v = name(v);
        std::sort(r.body.begin(), r.body.end());
    }
    return r.to_text();
}

/// If the query predicate lost all its rules, adds one that never fires so
/// it stays intensional (self-recursive without a base case, in normal form).
void ensure_query_pred(DatalogQuery& q) {
    if (q.program.idb().count(q.query_pred)) return;
    Atom self{q.query_pred, {"x"}};
    q.program.rules.push_back({self, {self, self}});
}

}  // namespace

// ---------------------------------------------------------------------------

RewriteResult unary_to_boolean(const DatalogQuery& q) {
    if (q.mode != QueryMode::Unary)
        throw validation_error("unary_to_boolean expects a unary query");
    for (const auto& r : q.program.rules)
        for (const auto& a : r.body)
            if (a.pred == "desc")
                throw validation_error("eliminate desc before unary_to_boolean");
    RewriteResult res;
    const Alphabet& sigma = *q.alphabet;
    AlphabetPtr marked = marked_alphabet(q.alphabet);

    auto taken = all_pred_names(q.program);
    NameGen names(taken);
    std::string x0 = names.fresh("mark0"), x1 = names.fresh("mark1");
    std::string c0 = names.fresh("cnt0"), c1 = names.fresh("cnt1");
    std::string qb = names.fresh(sanitize(q.query_pred) + "_b");
    std::map<std::string, std::string> lbl;  // label_<a> -> derived alias
    for (const auto& s : sigma.symbols()) lbl["label_" + s] = names.fresh("lbl_" + sanitize(s));

    DatalogProgram p;
    for (const auto& s : sigma.symbols()) {
        std::string l0 = "label_" + marked_symbol(s, false);
        std::string l1 = "label_" + marked_symbol(s, true);
        p.rules.push_back({{lbl["label_" + s], {"x"}}, {{l0, {"x"}}}});
        p.rules.push_back({{x0, {"x"}}, {{l0, {"x"}}}});
        p.rules.push_back({{lbl["label_" + s], {"x"}}, {{l1, {"x"}}}});
        p.rules.push_back({{x1, {"x"}}, {{l1, {"x"}}}});
    }
    // the original program, with label atoms redirected to the aliases
    for (Rule r : q.program.rules) {
        for (auto& a : r.body) {
            auto it = lbl.find(a.pred);
            if (it != lbl.end()) a.pred = it->second;
        }
        p.rules.push_back(std::move(r));
    }
    // bottom-up count of marks over the first-child/next-sibling structure:
    // cnt_j(x) says the encoding subtree at x holds exactly j marks
    auto add = [&](std::initializer_list<Atom> body, const std::string& head) {
        p.rules.push_back({{head, {"x"}}, std::vector<Atom>(body)});
    };
    add({{"leaf", {"x"}}, {"ls", {"x"}}, {x0, {"x"}}}, c0);
    add({{"leaf", {"x"}}, {"ls", {"x"}}, {x1, {"x"}}}, c1);
    add({{"leaf", {"x"}}, {"ns", {"x", "y"}}, {x0, {"x"}}, {c0, {"y"}}}, c0);
    add({{"leaf", {"x"}}, {"ns", {"x", "y"}}, {x0, {"x"}}, {c1, {"y"}}}, c1);
    add({{"leaf", {"x"}}, {"ns", {"x", "y"}}, {x1, {"x"}}, {c0, {"y"}}}, c1);
    add({{"ls", {"x"}}, {"fc", {"x", "y"}}, {x0, {"x"}}, {c0, {"y"}}}, c0);
    add({{"ls", {"x"}}, {"fc", {"x", "y"}}, {x0, {"x"}}, {c1, {"y"}}}, c1);
    add({{"ls", {"x"}}, {"fc", {"x", "y"}}, {x1, {"x"}}, {c0, {"y"}}}, c1);
    add({{"fc", {"x", "y"}}, {"ns", {"x", "z"}}, {x0, {"x"}}, {c0, {"y"}}, {c0, {"z"}}}, c0);
    add({{"fc", {"x", "y"}}, {"ns", {"x", "z"}}, {x0, {"x"}}, {c0, {"y"}}, {c1, {"z"}}}, c1);
    add({{"fc", {"x", "y"}}, {"ns", {"x", "z"}}, {x0, {"x"}}, {c1, {"y"}}, {c0, {"z"}}}, c1);
    add({{"fc", {"x", "y"}}, {"ns", {"x", "z"}}, {x1, {"x"}}, {c0, {"y"}}, {c0, {"z"}}}, c1);
    // accept at the root iff exactly one mark exists and it satisfies q
    p.rules.push_back(
        {{qb, {"x"}},
         {{"root", {"x"}}, {c1, {"x"}}, {q.query_pred, {"y"}}, {x1, {"y"}}}});

    res.query.program = std::move(p);
    res.query.query_pred = qb;
    res.query.mode = QueryMode::Boolean;
    res.query.schema = SchemaKind::TauGKChild;
    res.query.alphabet = marked;
    res.log.push_back("unary_to_boolean: marked alphabet with " +
                      std::to_string(marked->size()) + " symbols, query predicate " + qb);
    validate_query(res.query);
    return res;
}

// ---------------------------------------------------------------------------
// Acyclicity.

namespace {

struct AcyclicCore {
    std::vector<std::string>* log;
    std::unordered_set<std::string> seen;
    size_t processed = 0;
    size_t cap = 200000;

    void note(const std::string& s) {
        if (log) log->push_back(s);
    }

    // Rewrites one rule until acyclic; appends results to `out`.
    void run(const Rule& seed, std::vector<Rule>& out) {
        std::deque<Rule> queue = {seed};
        while (!queue.empty()) {
            if (++processed > cap)
                throw cap_error("acyclic rewriting exceeded " + std::to_string(cap) + " steps");
            Rule r = std::move(queue.front());
            queue.pop_front();
            dedupe_body(r);
            std::string key = rule_key(r);
            if (!seen.insert(key).second) continue;
            RuleGraph g = build_rule_graph(r);
            if (has_directed_cycle(g)) {
                note("drop (directed cycle, unsatisfiable): " + r.to_text());
                continue;
            }
            bool has_join = false;
            std::vector<int> indeg(g.vars.size(), 0);
            for (const auto& e : g.edges)
                if (++indeg[e.to] >= 2) has_join = true;
            if (!has_join) {
                out.push_back(std::move(r));
                continue;
            }
            rewrite_step(r, g, queue);
        }
    }

    // Pivot selection: a variable with two incoming binary atoms (this
    // covers every undirected cycle once directed cycles are gone, and
    // additionally normalizes shared-target joins the same way) such that
    // no directed path leads from it to another such variable.
    void rewrite_step(const Rule& r, const RuleGraph& g, std::deque<Rule>& queue) {
        int n = static_cast<int>(g.vars.size());
        std::vector<int> indeg(n, 0);
        for (const auto& e : g.edges) indeg[e.to]++;
        std::vector<std::vector<int>> adj(n);
        for (const auto& e : g.edges) adj[e.from].push_back(e.to);
        auto reaches_join_var = [&](int z) {
            std::vector<bool> vis(n, false);
            std::deque<int> dq = {z};
            bool first = true;
            while (!dq.empty()) {
                int v = dq.front();
                dq.pop_front();
                if (!first && indeg[v] >= 2) return true;
                first = false;
                for (int w : adj[v])
                    if (!vis[w]) {
                        vis[w] = true;
                        dq.push_back(w);
                    }
            }
            return false;
        };
        int z = -1;
        for (int v = 0; v < n; ++v)
            if (indeg[v] >= 2 && !reaches_join_var(v)) {
                z = v;
                break;
            }
        if (z < 0) throw internal_error("no rewrite pivot in " + r.to_text());
        int e1 = -1, e2 = -1;
        for (size_t e = 0; e < g.edges.size(); ++e)
            if (g.edges[e].to == z) {
                if (e1 < 0) e1 = static_cast<int>(e);
                else if (e2 < 0) e2 = static_cast<int>(e);
            }
        apply_case(r, g, z, e1, e2, queue);
    }

    void apply_case(const Rule& r, const RuleGraph& g, int z, int ei1, int ei2,
                    std::deque<Rule>& queue) {
        const auto& E1 = g.edges[ei1];
        const auto& E2 = g.edges[ei2];
        if (E2.to != z)
            throw internal_error("companion edge does not enter the pivot: " + r.to_text());
        std::string R = E1.pred, S = E2.pred;
        std::string x = g.vars[E1.from], y = g.vars[E2.from];
        int a1 = E1.atom_index, a2 = E2.atom_index;
        auto without = [&](const Rule& base, std::initializer_list<int> drop) {
            Rule out;
            out.head = base.head;
            for (size_t i = 0; i < base.body.size(); ++i)
                if (std::find(drop.begin(), drop.end(), static_cast<int>(i)) == drop.end())
                    out.body.push_back(base.body[i]);
            return out;
        };
        auto is_fcns = [](const std::string& p) { return p == "fc" || p == "ns"; };
        if ((R == "fc" && S == "ns") || (R == "ns" && S == "fc")) {
            note("drop (fc/ns join, unsatisfiable): " + r.to_text());
            return;
        }
        if (R == S && (is_fcns(R) || R == "child")) {
            // both atoms name the unique predecessor: merge the sources
            Rule nr = without(r, {a2});
            substitute_var(nr, y, x);
            note("merge " + y + ":=" + x + " (shared " + R + " target): " + r.to_text());
            queue.push_back(std::move(nr));
            return;
        }
        if (R == S && R == "desc") {
            Rule r1 = without(r, {a1, a2});
            r1.body.push_back({"desc", {x, y}});
            r1.body.push_back({"desc", {y, std::string(g.vars[z])}});
            Rule r2 = without(r, {a1, a2});
            r2.body.push_back({"desc", {y, x}});
            r2.body.push_back({"desc", {x, std::string(g.vars[z])}});
            Rule r3 = without(r, {a2});
            substitute_var(r3, y, x);
            note("split shared desc target into three orderings: " + r.to_text());
            queue.push_back(std::move(r1));
            queue.push_back(std::move(r2));
            queue.push_back(std::move(r3));
            return;
        }
        if ((R == "fc" && S == "child") || (R == "child" && S == "fc")) {
            // fc implies child; keep fc and merge the sources
            int keep_fc_src = (R == "fc") ? E1.from : E2.from;
            int drop_idx = (R == "fc") ? a2 : a1;
            std::string other = (R == "fc") ? y : x;
            Rule nr = without(r, {drop_idx});
            substitute_var(nr, other, g.vars[keep_fc_src]);
            note("merge parents (fc subsumes child): " + r.to_text());
            queue.push_back(std::move(nr));
            return;
        }
        if ((R == "ns" && (S == "child" || S == "desc")) ||
            (S == "ns" && (R == "child" || R == "desc"))) {
            // siblings share ancestors: retarget the vertical atom
            bool r_is_ns = (R == "ns");
            int vert_idx = r_is_ns ? a2 : a1;
            std::string ns_src = r_is_ns ? x : y;
            Rule nr = r;
            nr.body[vert_idx].vars[1] = ns_src;
            note("retarget vertical atom to the sibling source: " + r.to_text());
            queue.push_back(std::move(nr));
            return;
        }
        if (((R == "fc" || R == "child") && S == "desc") ||
            ((S == "fc" || S == "child") && R == "desc")) {
            bool r_is_step = (R == "fc" || R == "child");
            int step_src = r_is_step ? E1.from : E2.from;
            int desc_idx = r_is_step ? a2 : a1;
            std::string desc_src = r_is_step ? y : x;
            Rule r1 = r;
            r1.body[desc_idx].vars[1] = g.vars[step_src];
            Rule r2 = without(r, {desc_idx});
            substitute_var(r2, desc_src, g.vars[step_src]);
            note("split desc above a step edge: " + r.to_text());
            queue.push_back(std::move(r1));
            queue.push_back(std::move(r2));
            return;
        }
        throw internal_error("no case applies to " + R + "/" + S + " in " + r.to_text());
    }
};

}  // namespace

RewriteResult make_acyclic(const DatalogQuery& q) {
    RewriteResult res;
    res.query = q;
    res.query.program.rules.clear();
    AcyclicCore core;
    core.log = &res.log;
    for (const auto& r : q.program.rules) core.run(r, res.query.program.rules);
    ensure_query_pred(res.query);
    validate_query(res.query);
    return res;
}

// ---------------------------------------------------------------------------
// Decomposition of acyclic rules.

namespace {

bool is_three_form(const Rule& r) {
    if (tmnf_form(r) != TmnfForm::NotTmnf) return true;
    // the relaxed unary-unary shape X(x) <- Y(x), Z(z)
    if (r.body.size() == 2 && r.body[0].vars.size() == 1 && r.body[1].vars.size() == 1 &&
        r.head.vars.size() == 1)
        return r.body[0].vars[0] == r.head.vars[0] || r.body[1].vars[0] == r.head.vars[0];
    return false;
}

struct Decomposer {
    const Rule& rule;
    const Alphabet& alphabet;
    NameGen& names;
    std::vector<Rule> out;
    std::string any_pred;  // lazily created "holds everywhere" predicate
    std::string base;

    Decomposer(const Rule& r, const Alphabet& a, NameGen& n)
        : rule(r), alphabet(a), names(n), base(sanitize(r.head.pred)) {}

    std::string any_node() {
        if (!any_pred.empty()) return any_pred;
        any_pred = names.fresh(base + "_node");
        for (const auto& s : alphabet.symbols()) {
            Atom l{"label_" + s, {"x"}};
            out.push_back({{any_pred, {"x"}}, {l, l}});
        }
        return any_pred;
    }

    // Chains conjuncts into two-atom rules; the last rule gets `head`.
    void emit_conjunction(const Atom& head, std::vector<Atom> conjuncts) {
        if (conjuncts.empty()) {
            Atom a{any_node(), head.vars};
            out.push_back({head, {a, a}});
            return;
        }
        if (conjuncts.size() == 1) {
            out.push_back({head, {conjuncts[0], conjuncts[0]}});
            return;
        }
        Atom acc = conjuncts[0];
        for (size_t i = 1; i < conjuncts.size(); ++i) {
            bool last = (i + 1 == conjuncts.size());
            Atom h = last ? head : Atom{names.fresh(base + "_t"), head.vars};
            out.push_back({h, {acc, conjuncts[i]}});
            if (!last) acc = h;
        }
    }

    // Builds a predicate equivalent to the component subtree rooted at
    // var v, entered via edge `from_edge` (-1 at the root). Returns the
    // conjunct list at v rather than materializing when the caller can
    // chains them itself.
    std::vector<Atom> conjuncts_at(int v, int from_edge, const RuleGraph& g) {
        std::vector<Atom> cs;
        const std::string& var = g.vars[v];
        for (const auto& a : rule.body)
            if (a.vars.size() == 1 && a.vars[0] == var) cs.push_back(a);
        for (size_t e = 0; e < g.edges.size(); ++e) {
            if (static_cast<int>(e) == from_edge) continue;
            const auto& ed = g.edges[e];
            int u;
            bool forward;  // edge read from v's side
            if (ed.from == v) {
                u = ed.to;
                forward = true;
            } else if (ed.to == v) {
                u = ed.from;
                forward = false;
            } else {
                continue;
            }
            std::string child = materialize(u, static_cast<int>(e), g);
            std::string ep = names.fresh(base + "_e");
            const std::string& uv = g.vars[u];
            Atom bin{ed.pred, forward ? std::vector<std::string>{var, uv}
                                      : std::vector<std::string>{uv, var}};
            out.push_back({{ep, {var}}, {bin, {child, {uv}}}});
            cs.push_back({ep, {var}});
        }
        return cs;
    }

    std::string materialize(int v, int from_edge, const RuleGraph& g) {
        auto cs = conjuncts_at(v, from_edge, g);
        if (cs.size() == 1 && cs[0].vars.size() == 1) return cs[0].pred;
        if (cs.empty()) return any_node();
        std::string p = names.fresh(base + "_t");
        emit_conjunction({p, {g.vars[v]}}, cs);
        return p;
    }
};

}  // namespace

std::vector<Rule> decompose_acyclic_rule(const Rule& r, const Alphabet& alphabet, NameGen& names,
                                         std::vector<std::string>* log) {
    RuleGraph g = build_rule_graph(r);
    if (has_directed_cycle(g) || has_undirected_cycle(g))
        throw validation_error("cyclic rule cannot be decomposed: " + r.to_text());
    if (is_three_form(r)) return {r};

    Decomposer d(r, alphabet, names);
    // connected components of the shadow graph (plus isolated unary vars)
    int n = static_cast<int>(g.vars.size());
    UnionFind uf(n);
    for (const auto& e : g.edges) uf.join(e.from, e.to);
    int head_var = 0;  // head variable is first in the graph's var order
    std::vector<int> roots;
    std::vector<bool> seen(n, false);
    roots.push_back(head_var);
    seen[uf.find(head_var)] = true;
    for (int v = 0; v < n; ++v)
        if (!seen[uf.find(v)]) {
            seen[uf.find(v)] = true;
            roots.push_back(v);
        }

    std::vector<Atom> top;
    auto head_cs = d.conjuncts_at(head_var, -1, g);
    // other components attach through a single representative conjunct
    std::vector<Atom> extra;
    for (size_t i = 1; i < roots.size(); ++i) {
        std::string p = d.materialize(roots[i], -1, g);
        extra.push_back({p, {g.vars[roots[i]]}});
    }
    if (head_cs.empty()) head_cs.push_back({d.any_node(), {g.vars[head_var]}});
    // chain: all head-variable conjuncts first, then one other-component
    // conjunct per rule (the relaxed third shape)
    top = head_cs;
    top.insert(top.end(), extra.begin(), extra.end());
    if (top.size() == 1 && top[0].pred.rfind(d.base + "_e", 0) == 0) {
        // a single freshly made edge predicate: give its rule the real head
        int uses = 0;
        for (const auto& rule : d.out)
            if (rule.head.pred == top[0].pred) ++uses;
        if (uses == 1) {
            for (auto& rule : d.out)
                if (rule.head.pred == top[0].pred) rule.head.pred = r.head.pred;
            if (log) log->push_back("decompose: " + r.to_text() + " -> " +
                                    std::to_string(d.out.size()) + " rules");
            return d.out;
        }
    }
    d.emit_conjunction(r.head, top);
    if (log) log->push_back("decompose: " + r.to_text() + " -> " + std::to_string(d.out.size()) +
                            " rules");
    return d.out;
}

RewriteResult decompose_query(const DatalogQuery& q) {
    RewriteResult res;
    res.query = q;
    res.query.program.rules.clear();
    NameGen names(all_pred_names(q.program));
    for (const auto& r : q.program.rules) {
        auto rules = decompose_acyclic_rule(r, *q.alphabet, names, &res.log);
        res.query.program.rules.insert(res.query.program.rules.end(), rules.begin(), rules.end());
    }
    validate_query(res.query);
    return res;
}

// ---------------------------------------------------------------------------
// Desc elimination.

RewriteResult eliminate_desc(const DatalogQuery& q) {
    RewriteResult acyc = make_acyclic(q);
    RewriteResult dec = decompose_query(acyc.query);
    RewriteResult res;
    res.log = std::move(acyc.log);
    res.log.insert(res.log.end(), dec.log.begin(), dec.log.end());
    res.query = dec.query;
    res.query.program.rules.clear();

    std::map<std::string, int> head_count;
    for (const auto& r : dec.query.program.rules) head_count[r.head.pred]++;
    NameGen names(all_pred_names(dec.query.program));

    for (const auto& r : dec.query.program.rules) {
        TmnfForm f = tmnf_form(r);
        const Atom* bin = nullptr;
        for (const auto& a : r.body)
            if (a.vars.size() == 2 && a.pred == "desc") bin = &a;
        if (!bin) {
            res.query.program.rules.push_back(r);
            continue;
        }
        if (f != TmnfForm::BinaryForward && f != TmnfForm::BinaryBackward)
            throw internal_error("desc atom outside the two binary shapes: " + r.to_text());
        const Atom* un = &r.body[0] == bin ? &r.body[1] : &r.body[0];
        bool forward = (f == TmnfForm::BinaryForward);
        std::string x = r.head.vars[0];
        std::string y = un->vars[0];
        // desc unfolds into a child step plus recursion; when the head has
        // other rules the recursion runs through a fresh predicate
        std::string rec = r.head.pred;
        bool fresh_needed = head_count[r.head.pred] > 1;
        if (fresh_needed) rec = names.fresh(sanitize(r.head.pred) + "_anc");
        auto mk = [&](const std::string& unary_pred) {
            Rule nr;
            nr.head = {rec, {x}};
            nr.body = {{"child", forward ? std::vector<std::string>{x, y}
                                         : std::vector<std::string>{y, x}},
                       {unary_pred, {y}}};
            return nr;
        };
        res.query.program.rules.push_back(mk(un->pred));
        res.query.program.rules.push_back(mk(rec));
        if (fresh_needed) {
            Atom a{rec, {x}};
            res.query.program.rules.push_back({r.head, {a, a}});
        }
        res.log.push_back("desc -> child recursion for: " + r.to_text());
    }
    // schema drops desc
    switch (q.schema) {
        case SchemaKind::TauURootLeafDesc: res.query.schema = SchemaKind::TauURootLeaf; break;
        case SchemaKind::TauGKChildDesc: res.query.schema = SchemaKind::TauGKChild; break;
        default: res.query.schema = q.schema; break;
    }
    ensure_query_pred(res.query);
    validate_query(res.query);
    return res;
}

// ---------------------------------------------------------------------------
// Full normal form.

namespace {

/// Shared helper state for child elimination and the existential broadcast.
struct TmnfHelpers {
    NameGen& names;
    const Alphabet& alphabet;
    std::vector<Rule>& out;
    std::map<std::string, std::string> sib_cache, par_cache, any_cache;

    // "p holds at this node or at a later sibling"
    std::string sibling_chain(const std::string& p) {
        auto it = sib_cache.find(p);
        if (it != sib_cache.end()) return it->second;
        std::string h = names.fresh("sib_" + sanitize(p));
        Atom pa{p, {"x"}};
        out.push_back({{h, {"x"}}, {pa, pa}});
        out.push_back({{h, {"x"}}, {{"ns", {"x", "y"}}, {h, {"y"}}}});
        sib_cache.emplace(p, h);
        return h;
    }

    // "my parent satisfies p"
    std::string parent_has(const std::string& p) {
        auto it = par_cache.find(p);
        if (it != par_cache.end()) return it->second;
        std::string h = names.fresh("par_" + sanitize(p));
        out.push_back({{h, {"x"}}, {{"fc", {"y", "x"}}, {p, {"y"}}}});
        out.push_back({{h, {"x"}}, {{"ns", {"y", "x"}}, {h, {"y"}}}});
        par_cache.emplace(p, h);
        return h;
    }

    // "p holds somewhere in the tree": flooded along fc/ns in all four
    // directions, which reaches every node of a connected tree
    std::string anywhere(const std::string& p) {
        auto it = any_cache.find(p);
        if (it != any_cache.end()) return it->second;
        std::string h = names.fresh("any_" + sanitize(p));
        Atom pa{p, {"x"}};
        out.push_back({{h, {"x"}}, {pa, pa}});
        out.push_back({{h, {"x"}}, {{"fc", {"x", "y"}}, {h, {"y"}}}});
        out.push_back({{h, {"x"}}, {{"ns", {"x", "y"}}, {h, {"y"}}}});
        out.push_back({{h, {"x"}}, {{"fc", {"y", "x"}}, {h, {"y"}}}});
        out.push_back({{h, {"x"}}, {{"ns", {"y", "x"}}, {h, {"y"}}}});
        any_cache.emplace(p, h);
        return h;
    }
};

}  // namespace

RewriteResult to_tmnf(const DatalogQuery& q) {
    for (const auto& r : q.program.rules)
        for (const auto& a : r.body)
            if (a.pred == "desc")
                throw validation_error("eliminate desc before the normal form rewriting");

    RewriteResult res;
    res.query = q;
    res.query.program.rules.clear();

    // make every rule acyclic, then break it into the three shapes
    AcyclicCore core;
    core.log = &res.log;
    std::vector<Rule> acyclic;
    for (const auto& r : q.program.rules) core.run(r, acyclic);
    NameGen names(all_pred_names(q.program));
    std::vector<Rule> three_form;
    for (const auto& r : acyclic) {
        auto rules = decompose_acyclic_rule(r, *q.alphabet, names, &res.log);
        three_form.insert(three_form.end(), rules.begin(), rules.end());
    }

    std::vector<Rule>& out = res.query.program.rules;
    TmnfHelpers helpers{names, *q.alphabet, out, {}, {}, {}};

    for (const auto& r : three_form) {
        TmnfForm f = tmnf_form(r);
        if (f == TmnfForm::BinaryForward || f == TmnfForm::BinaryBackward) {
            const Atom& bin = r.body[0].vars.size() == 2 ? r.body[0] : r.body[1];
            const Atom& un = r.body[0].vars.size() == 2 ? r.body[1] : r.body[0];
            if (bin.pred == "child") {
                if (f == TmnfForm::BinaryForward) {
                    // X(x) <- child(x,y), Y(y): Y somewhere in the child chain
                    std::string chain = helpers.sibling_chain(un.pred);
                    std::string aux = r.head.vars[0] == "y" ? "y0" : "y";
                    out.push_back({r.head, {{"fc", {r.head.vars[0], aux}}, {chain, {aux}}}});
                    res.log.push_back("child step down -> fc/ns chain: " + r.to_text());
                } else {
                    std::string par = helpers.parent_has(un.pred);
                    Atom a{par, {r.head.vars[0]}};
                    out.push_back({r.head, {a, a}});
                    res.log.push_back("child step up -> fc/ns chain: " + r.to_text());
                }
            } else if (bin.pred == "fc" || bin.pred == "ns") {
                out.push_back(r);
            } else {
                throw validation_error("unsupported binary predicate '" + bin.pred +
                                       "' in normal form rewriting");
            }
            continue;
        }
        // unary/unary; the detached-variable shape broadcasts through the tree
        const Atom& at_x = r.body[0].vars[0] == r.head.vars[0] ? r.body[0] : r.body[1];
        const Atom& other = &at_x == &r.body[0] ? r.body[1] : r.body[0];
        if (other.vars[0] == r.head.vars[0]) {
            out.push_back(r);
        } else {
            std::string any = helpers.anywhere(other.pred);
            out.push_back({r.head, {at_x, {any, {r.head.vars[0]}}}});
            res.log.push_back("detached conjunct -> flooded witness: " + r.to_text());
        }
    }

    res.query.schema = SchemaKind::TauGK;
    ensure_query_pred(res.query);
    validate_query(res.query);
    tmnf_certificate(res.query.program);
    return res;
}

// ---------------------------------------------------------------------------

RewriteResult to_binary_query(const DatalogQuery& q) {
    if (q.mode != QueryMode::Boolean)
        throw validation_error("binary-tree rewriting expects a Boolean query");
    for (const auto& r : q.program.rules)
        for (const auto& a : r.body)
            if (a.pred == "child" || a.pred == "desc")
                throw validation_error("child/desc must be eliminated before the binary-tree "
                                       "rewriting: " + r.to_text());
    RewriteResult res;
    res.query = q;
    res.query.schema = SchemaKind::TauB;
    static const std::map<std::string, std::string> ren = {
        {"fc", "lc"}, {"ns", "rc"}, {"leaf", "hnlc"}, {"ls", "hnrc"}};
    for (auto& r : res.query.program.rules)
        for (auto& a : r.body) {
            auto it = ren.find(a.pred);
            if (it != ren.end()) a.pred = it->second;
        }
    NameGen names(all_pred_names(res.query.program));
    std::string qb = names.fresh(sanitize(q.query_pred) + "_enc");
    res.query.program.rules.push_back(
        {{qb, {"x"}}, {{q.query_pred, {"x"}}, {"hnrc", {"x"}}}});
    res.query.query_pred = qb;
    res.log.push_back("renamed fc,ns,leaf,ls to lc,rc,hnlc,hnrc; guard " + qb +
                      " restricts to encodings");
    validate_query(res.query);
    return res;
}

std::pair<RewriteResult, RewriteResult> eliminate_root_leaf(const DatalogQuery& q1,
                                                            const DatalogQuery& q2) {
    for (const DatalogQuery* q : {&q1, &q2}) {
        if (q->mode != QueryMode::Boolean)
            throw validation_error("root/leaf elimination expects Boolean queries");
        for (const auto& r : q->program.rules)
            for (const auto& a : r.body)
                if (a.pred == "desc" || a.pred == "fc" || a.pred == "ns" || a.pred == "ls")
                    throw validation_error("root/leaf elimination expects child-only queries");
    }
    AlphabetPtr ann = root_leaf_alphabet(q1.alphabet);

    auto rewrite_one = [&](const DatalogQuery& q, bool incons) {
        RewriteResult res;
        NameGen names(all_pred_names(q.program));
        std::string rt = names.fresh("root_lbl"), lf = names.fresh("leaf_lbl");
        std::map<std::string, std::string> lbl;
        for (const auto& s : q.alphabet->symbols())
            lbl["label_" + s] = names.fresh("lbl_" + sanitize(s));

        DatalogProgram p;
        for (const auto& s : q.alphabet->symbols())
            for (int i = 0; i < 4; ++i) {
                std::string la = "label_" + root_leaf_symbol(s, i & 1, i & 2);
                p.rules.push_back({{lbl["label_" + s], {"x"}}, {{la, {"x"}}}});
                if (i & 1) p.rules.push_back({{rt, {"x"}}, {{la, {"x"}}}});
                if (i & 2) p.rules.push_back({{lf, {"x"}}, {{la, {"x"}}}});
            }
        for (Rule r : q.program.rules) {
            for (auto& a : r.body) {
                if (a.pred == "root") a.pred = rt;
                else if (a.pred == "leaf") a.pred = lf;
                else {
                    auto it = lbl.find(a.pred);
                    if (it != lbl.end()) a.pred = it->second;
                }
            }
            p.rules.push_back(std::move(r));
        }
        res.query.program = std::move(p);
        res.query.query_pred = q.query_pred;
        if (incons) {
            std::string pin = names.fresh("inconsistent"), acc = names.fresh("accept_any");
            auto& rules = res.query.program.rules;
            rules.push_back({{pin, {"x"}}, {{rt, {"x"}}, {"child", {"y", "x"}}}});
            rules.push_back({{pin, {"x"}}, {{lf, {"x"}}, {"child", {"x", "y"}}}});
            rules.push_back({{pin, {"x"}}, {{"child", {"x", "y"}}, {pin, {"y"}}}});
            rules.push_back({{acc, {"x"}}, {{pin, {"x"}}}});
            // a missing root flag is visible where the Boolean answer is
            // read off: accept outright at any unflagged-root label
            for (const auto& s : q.alphabet->symbols())
                for (int i = 0; i < 4; ++i)
                    if (!(i & 1))
                        rules.push_back({{acc, {"x"}},
                                         {{"label_" + root_leaf_symbol(s, false, i & 2), {"x"}}}});
            rules.push_back({{acc, {"x"}}, {{q.query_pred, {"x"}}}});
            res.query.query_pred = acc;
        }
        res.query.mode = QueryMode::Boolean;
        res.query.schema = SchemaKind::TauU;
        res.query.alphabet = ann;
        res.log.push_back(std::string("root/leaf moved into the labels") +
                          (incons ? "; inconsistent trees accepted" : ""));
        validate_query(res.query);
        return res;
    };

    return {rewrite_one(q1, false), rewrite_one(q2, true)};
}

}  // namespace mdlc
