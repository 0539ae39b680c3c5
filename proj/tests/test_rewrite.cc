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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hh"

using namespace mdlc;
using namespace mdlc::testing;

namespace {

/// Answer-equivalence of two versions of a query on every tree up to
/// max_nodes (the rewriting oracle).
void check_equivalent(const DatalogQuery& before, const DatalogQuery& after, int max_nodes = 6,
                      AlphabetPtr alpha = ab()) {
    for (const auto& t : enumerate_trees(alpha, max_nodes, TreeFlavor::Ordered)) {
        if (before.mode == QueryMode::Unary) {
            CHECK(eval_unary(before, t) == eval_unary(after, t));
        } else {
            bool lhs = eval_boolean(before, t);
            bool rhs = eval_boolean(after, t);
            if (lhs != rhs) {
                CAPTURE(tree_to_text(t));
                CHECK(lhs == rhs);
                return;
            }
        }
    }
}

}  // namespace

TEST_CASE("normal-form classification") {
    auto form = [](const std::string& text) {
        return tmnf_form(query(text + "\nQUERY P").program.rules[0]);
    };
    CHECK(form("P(x) :- child(x,y), label_a(y).") == TmnfForm::BinaryForward);
    CHECK(form("P(x) :- child(y,x), label_a(y).") == TmnfForm::BinaryBackward);
    CHECK(form("P(x) :- label_a(x), root(x).") == TmnfForm::UnaryUnary);
    CHECK(form("P(x) :- label_a(x), root(y), child(x,y).") == TmnfForm::NotTmnf);
    CHECK(form("P(x) :- child(x,y), label_a(x).") == TmnfForm::NotTmnf);
}

TEST_CASE("rule graphs and cycles") {
    Rule r = query("P(x) :- child(x,y), child(y,z), desc(x,z).\nQUERY P").program.rules[0];
    RuleGraph g = build_rule_graph(r);
    CHECK(g.vars.size() == 3);
    CHECK(g.edges.size() == 3);
    CHECK(!has_directed_cycle(g));
    CHECK(has_undirected_cycle(g));

    r = query("P(x) :- child(x,y), desc(y,x).\nQUERY P").program.rules[0];
    CHECK(has_directed_cycle(build_rule_graph(r)));

    r = query("P(x) :- child(x,y), child(x,z), label_a(y), label_a(z).\nQUERY P")
            .program.rules[0];
    g = build_rule_graph(r);
    CHECK(!has_undirected_cycle(g));
}

TEST_CASE("unary_to_boolean examples") {
    DatalogQuery q = query("P(x) :- label_a(x).\nQUERY P UNARY", SchemaKind::TauGKChild);
    RewriteResult r = unary_to_boolean(q);
    CHECK(r.query.mode == QueryMode::Boolean);

    LabeledTree t = tree("a");
    CHECK(eval_boolean(r.query, mark_node(t, 0)));

    AlphabetPtr marked = marked_alphabet(ab());
    CHECK(!eval_boolean(r.query, parse_tree("(a,0)", marked)));
    CHECK(!eval_boolean(r.query, parse_tree("(a,1)((b,1))", marked)));
    // a mark on a non-answer node does not accept either
    CHECK(!eval_boolean(r.query, parse_tree("(b,1)", marked)));
}

TEST_CASE("unary_to_boolean agrees with membership on every tree and node") {
    std::vector<std::string> queries = {
        "P(x) :- label_a(x).\nQUERY P UNARY",
        "P(x) :- child(y,x), label_b(y).\nQUERY P UNARY",
        "X(x) :- leaf(x).\nX(x) :- child(x,y), X(y), label_a(x).\nP(x) :- X(x), ls(x).\n"
        "QUERY P UNARY",
    };
    for (const auto& text : queries) {
        DatalogQuery q = query(text, SchemaKind::TauGKChild);
        DatalogQuery qb = unary_to_boolean(q).query;
        for (const auto& t : enumerate_trees(ab(), 5, TreeFlavor::Ordered)) {
            auto answers = eval_unary(q, t);
            for (int v = 0; v < t.size(); ++v)
                CHECK(eval_boolean(qb, mark_node(t, v)) == (answers.count(v) != 0));
        }
    }
}

TEST_CASE("to_tmnf certifies and preserves answers") {
    std::vector<std::string> queries = {
        "P(x) :- root(x).\nQUERY P UNARY",
        "X(x) :- child(x,y), label_a(y), label_b(x).\nP(x) :- X(x), X(x).\nQUERY P UNARY",
        "X(x) :- child(x,y), X(y).\nX(x) :- leaf(x), label_b(x).\nP(x) :- root(x), X(x).\n"
        "QUERY P UNARY",
        "P(x) :- child(y,x), child(z,y), label_a(z).\nQUERY P UNARY",
        "P(x) :- label_a(x), label_b(z).\nQUERY P UNARY",
        "P(x) :- child(x,y), child(x,z), label_a(y), label_b(z), ls(x).\nQUERY P UNARY",
        "P(x) :- fc(x,y), ns(y,z), label_a(z).\nQUERY P UNARY",
        "P(x) :- child(x,y).\nQUERY P UNARY",
    };
    for (const auto& text : queries) {
        DatalogQuery q = query(text, SchemaKind::TauGKChild);
        RewriteResult r = to_tmnf(q);
        tmnf_certificate(r.query.program);  // throws unless every rule fits a shape
        for (const auto& rule : r.query.program.rules)
            for (const auto& a : rule.body) CHECK(a.pred != "child");
        check_equivalent(q, r.query);
    }
}

TEST_CASE("to_tmnf keeps normal-form programs semantically fixed") {
    DatalogQuery q = query(
        "X(x) :- child(x,y), X(y).\nX(x) :- leaf(x), label_a(x).\nP(x) :- X(x), root(x).\n"
        "QUERY P UNARY",
        SchemaKind::TauGKChild);
    DatalogQuery q2 = to_tmnf(q).query;
    DatalogQuery q3 = to_tmnf(q2).query;
    // already in normal form: the rewriting is a semantic fixpoint
    check_equivalent(q2, q3);
    CHECK(q3.program.rules.size() == q2.program.rules.size());
}

TEST_CASE("to_binary_query examples") {
    DatalogQuery q = query("P(x) :- root(x).\nQUERY P", SchemaKind::TauGK);
    RewriteResult r = to_binary_query(q);
    CHECK(r.query.schema == SchemaKind::TauB);
    bool has_guard = false;
    for (const auto& rule : r.query.program.rules)
        if (rule.head.pred == r.query.query_pred && rule.body.size() == 2 &&
            rule.body[1].pred == "hnrc" && rule.body[0].pred == "P")
            has_guard = true;
    CHECK(has_guard);
    for (const auto& t : enumerate_trees(ab(), 6, TreeFlavor::Ordered))
        CHECK(eval_boolean(r.query, to_binary(t)) == eval_boolean(q, t));

    // a binary tree whose root has a right child is no encoding: rejected
    BinaryTree bad;
    bad.alphabet = ab();
    bad.label = {0, 1};
    bad.left = {-1, -1};
    bad.right = {1, -1};
    bad.parent = {-1, 0};
    CHECK(!eval_boolean(r.query, bad));

    CHECK_THROWS_AS(
        to_binary_query(query("P(x) :- child(x,y), label_a(y).\nQUERY P", SchemaKind::TauGKChild)),
        validation_error);
}

TEST_CASE("to_binary_query on fc/ns queries, exhaustively") {
    DatalogQuery q = query(
        "S(x) :- label_a(x), label_a(x).\nS(x) :- ns(x,y), S(y).\nP(x) :- fc(x,y), S(y).\n"
        "QUERY P",
        SchemaKind::TauGK);
    DatalogQuery qb = to_binary_query(q).query;
    tmnf_certificate(qb.program);  // the rewriting preserves the normal form
    for (const auto& t : enumerate_trees(ab(), 6, TreeFlavor::Ordered))
        CHECK(eval_boolean(qb, to_binary(t)) == eval_boolean(q, t));
}

TEST_CASE("make_acyclic case rewrites") {
    // two child atoms into the same target merge their sources
    DatalogQuery q = query("P(x) :- child(x,z), child(y,z), label_a(y).\nQUERY P UNARY",
                           SchemaKind::TauGKChild);
    RewriteResult r = make_acyclic(q);
    for (const auto& rule : r.query.program.rules)
        CHECK(!has_undirected_cycle(build_rule_graph(rule)));
    CHECK(r.query.program.rules.size() == 1);
    CHECK(r.query.program.rules[0].body.size() == 2);
    check_equivalent(q, r.query);

    // two desc atoms split into the three orderings
    q = query("P(x) :- desc(x,z), desc(y,z), label_a(y), label_b(z).\nQUERY P UNARY");
    r = make_acyclic(q);
    CHECK(r.query.program.rules.size() == 3);
    check_equivalent(q, r.query);

    // an fc/ns join is unsatisfiable
    q = query("P(x) :- fc(x,z), ns(y,z), label_a(y).\nQUERY P UNARY", SchemaKind::TauGKChild);
    r = make_acyclic(q);
    for (const auto& t : enumerate_trees(ab(), 5, TreeFlavor::Ordered))
        CHECK(eval_unary(r.query, t).empty());

    // mixed cases stay equivalent
    for (const char* text : {
             "P(x) :- child(x,z), desc(y,z), label_b(y).\nQUERY P UNARY",
             "P(x) :- fc(x,z), desc(y,z), label_b(y).\nQUERY P UNARY",
             "P(x) :- ns(x,z), child(y,z), label_b(y).\nQUERY P UNARY",
             "P(x) :- ns(x,z), desc(y,z), label_b(y).\nQUERY P UNARY",
             "P(x) :- fc(x,z), child(y,z), label_a(y).\nQUERY P UNARY",
             "P(x) :- child(x,y), desc(x,y).\nQUERY P UNARY",
             "P(x) :- desc(x,z), desc(y,z), desc(w,y), label_a(w).\nQUERY P UNARY",
         }) {
        DatalogQuery qq = query(text);
        RewriteResult rr = make_acyclic(qq);
        for (const auto& rule : rr.query.program.rules)
            CHECK(!has_undirected_cycle(build_rule_graph(rule)));
        check_equivalent(qq, rr.query);
    }
}

TEST_CASE("decompose_acyclic_rule shapes and equivalence") {
    auto is_allowed_shape = [](const Rule& r) {
        if (tmnf_form(r) != TmnfForm::NotTmnf) return true;
        return r.body.size() == 2 && r.body[0].vars.size() == 1 && r.body[1].vars.size() == 1 &&
               (r.body[0].vars[0] == r.head.vars[0] || r.body[1].vars[0] == r.head.vars[0]);
    };

    // a rule already in shape stays a singleton
    DatalogQuery q = query("P(x) :- child(x,y), label_a(y).\nQUERY P UNARY",
                           SchemaKind::TauGKChild);
    NameGen names({"P"});
    auto rules = decompose_acyclic_rule(q.program.rules[0], *ab(), names);
    CHECK(rules.size() == 1);

    // the disconnected two-unary shape is also allowed as-is
    q = query("P(x) :- label_a(x), label_b(z).\nQUERY P UNARY");
    NameGen names2({"P"});
    rules = decompose_acyclic_rule(q.program.rules[0], *ab(), names2);
    CHECK(rules.size() == 1);

    // a child chain splits once per internal joint
    q = query("P(x) :- child(x,y), child(y,z), label_a(z).\nQUERY P UNARY",
              SchemaKind::TauGKChild);
    NameGen names3({"P"});
    rules = decompose_acyclic_rule(q.program.rules[0], *ab(), names3);
    CHECK(rules.size() == 2);
    for (const auto& r : rules) CHECK(is_allowed_shape(r));
    DatalogQuery qd = q;
    qd.program.rules = rules;
    check_equivalent(q, qd);

    // cyclic input is refused
    q = query("P(x) :- child(x,y), desc(x,y).\nQUERY P UNARY");
    NameGen names4({"P"});
    CHECK_THROWS_AS(decompose_acyclic_rule(q.program.rules[0], *ab(), names4),
                    validation_error);

    // larger bodies stay equivalent and in shape
    for (const char* text : {
             "P(x) :- child(x,y), child(x,z), label_a(y), label_b(z), root(x).\nQUERY P UNARY",
             "P(x) :- child(y,x), label_a(y), leaf(x), label_b(z).\nQUERY P UNARY",
             "P(x) :- desc(x,y), desc(y,z), label_a(y), label_b(z).\nQUERY P UNARY",
             "P(x) :- child(x,y).\nQUERY P UNARY",
         }) {
        DatalogQuery qq = query(text);
        RewriteResult rr = decompose_query(qq);
        for (const auto& r : rr.query.program.rules) CHECK(is_allowed_shape(r));
        check_equivalent(qq, rr.query);
    }
}

TEST_CASE("eliminate_desc examples") {
    // the single-rule case unfolds in place: exactly the two child rules
    DatalogQuery q = query("P(x) :- desc(x,y), label_b(y).\nQUERY P UNARY");
    RewriteResult r = eliminate_desc(q);
    CHECK(r.query.program.rules.size() == 2);
    std::set<std::string> texts;
    for (const auto& rule : r.query.program.rules) texts.insert(rule.to_text());
    CHECK(texts.count("P(x) :- child(x,y), label_b(y)."));
    CHECK(texts.count("P(x) :- child(x,y), P(y)."));
    check_equivalent(q, r.query);

    // the other direction
    q = query("P(x) :- desc(y,x), label_b(y).\nQUERY P UNARY");
    r = eliminate_desc(q);
    texts.clear();
    for (const auto& rule : r.query.program.rules) texts.insert(rule.to_text());
    CHECK(texts.count("P(x) :- child(y,x), label_b(y)."));
    CHECK(texts.count("P(x) :- child(y,x), P(y)."));
    check_equivalent(q, r.query);

    // a head with several rules keeps them independent
    q = query("P(x) :- desc(x,y), label_b(y).\nP(x) :- label_a(x).\nQUERY P UNARY");
    r = eliminate_desc(q);
    check_equivalent(q, r.query);
    for (const auto& rule : r.query.program.rules)
        for (const auto& a : rule.body) CHECK(a.pred != "desc");

    // deep-b: desc works through arbitrary rewriting layers
    q = query("P(x) :- desc(x,y), label_b(y).\nQUERY P UNARY");
    check_equivalent(q, eliminate_desc(q).query, 6);
}

TEST_CASE("eliminate_desc then to_tmnf on mixed queries") {
    for (const char* text : {
             "P(x) :- desc(x,y), child(y,z), label_b(z).\nQUERY P UNARY",
             "X(x) :- desc(x,y), label_a(y).\nP(x) :- X(x), leaf(x).\nQUERY P UNARY",
             "P(x) :- desc(x,z), desc(y,z), label_a(y).\nQUERY P UNARY",
         }) {
        DatalogQuery q = query(text);
        DatalogQuery nodesc = eliminate_desc(q).query;
        check_equivalent(q, nodesc, 5);
        DatalogQuery tm = to_tmnf(nodesc).query;
        tmnf_certificate(tm.program);
        check_equivalent(q, tm, 5);
    }
}

TEST_CASE("eliminate_root_leaf") {
    DatalogQuery q1 = query("P(x) :- root(x), label_a(x).\nQUERY P", SchemaKind::TauURootLeaf);
    DatalogQuery q2 = query(
        "X(x) :- leaf(x), label_a(x).\nX(x) :- child(x,y), X(y).\nP(x) :- root(x), X(x).\n"
        "QUERY P",
        SchemaKind::TauURootLeaf);
    auto [r1, r2] = eliminate_root_leaf(q1, q2);
    CHECK(r1.query.schema == SchemaKind::TauU);
    CHECK(r2.query.schema == SchemaKind::TauU);

    AlphabetPtr ann = r1.query.alphabet;
    // on consistent encodings both sides agree with the originals
    for (const auto& t : enumerate_trees(ab(), 5, TreeFlavor::Ordered)) {
        LabeledTree enc = t;
        enc.alphabet = ann;
        for (int v = 0; v < t.size(); ++v)
            enc.label[v] = ann->index_of(
                root_leaf_symbol(t.label_name(v), t.parent[v] == -1, t.is_leaf(v)));
        CHECK(eval_boolean(r1.query, enc) == eval_boolean(q1, t));
        CHECK(eval_boolean(r2.query, enc) == eval_boolean(q2, t));
    }

    // a leaf-flag on an internal node makes the tree inconsistent: the
    // second query accepts it outright
    LabeledTree bad = parse_tree("(a,Root|Leaf)((b,Leaf))", ann);
    CHECK(eval_boolean(r2.query, bad));
    LabeledTree bad2 = parse_tree("(a,-)((b,Leaf))", ann);  // root flag missing
    CHECK(eval_boolean(r2.query, bad2));
}
