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

TEST_CASE("parse_program basics") {
    DatalogQuery q = query("P(x) :- root(x).\nQUERY P");
    CHECK(q.program.rules.size() == 1);
    CHECK(q.program.idb() == std::set<std::string>{"P"});
    CHECK(q.mode == QueryMode::Boolean);

    CHECK_THROWS_AS(query("P(z) :- child(x,y).\nQUERY P"), validation_error);
    CHECK_THROWS_AS(query("P(x,y) :- child(x,y).\nQUERY P"), validation_error);
    CHECK_THROWS_AS(query("P(x) :- unknown(x).\nQUERY P"), validation_error);
    CHECK_THROWS_AS(query("root(x) :- leaf(x).\nQUERY root"), validation_error);
    CHECK_THROWS_AS(query("P(x) :- fc(x,y).\nQUERY P", SchemaKind::TauU), validation_error);
    // built-ins are case-insensitive keywords
    DatalogQuery q2 = query("P(x) :- Root(x), LABEL_a(x).\nQUERY P");
    CHECK(q2.program.rules[0].body[0].pred == "root");
    CHECK(q2.program.rules[0].body[1].pred == "label_a");
}

TEST_CASE("immediate consequence operator") {
    DatalogQuery q = query("P(x) :- root(x).\nQUERY P");
    FactSet base = facts_of(tree("a(b)"), SchemaKind::TauGKChild);
    FactSet once = immediate_consequence(q.program, base);
    CHECK(once.has_unary("P", 0));
    CHECK(!once.has_unary("P", 1));
    // non-recursive: a second application changes nothing
    CHECK(immediate_consequence(q.program, once) == once);

    // recursive depth-by-depth derivation
    DatalogQuery rec = query("X(x) :- child(x,y), X(y).\nX(x) :- leaf(x).\nQUERY X");
    AlphabetPtr abc = make_alphabet({"a", "b", "c"});
    FactSet f = facts_of(parse_tree("a(b(c))", abc), SchemaKind::TauGKChild);
    FactSet s1 = immediate_consequence(rec.program, f);
    CHECK(s1.unary["X"] == std::set<int>{2});
    FactSet s2 = immediate_consequence(rec.program, s1);
    CHECK(s2.unary["X"] == std::set<int>{1, 2});
    FactSet s3 = immediate_consequence(rec.program, s2);
    CHECK(s3.unary["X"] == std::set<int>{0, 1, 2});
    CHECK(fixpoint(rec.program, f).unary["X"] == std::set<int>{0, 1, 2});
}

TEST_CASE("fixpoint equals naive iteration, and is inflationary") {
    std::mt19937 rng(7);
    auto trees = enumerate_trees(ab(), 5, TreeFlavor::Ordered);
    for (int i = 0; i < 20; ++i) {
        DatalogQuery q = random_tmnf_query(rng);
        for (size_t j = i; j < trees.size(); j += 37) {
            FactSet base = facts_of(to_binary(trees[j]), SchemaKind::TauB);
            FactSet fast = fixpoint(q.program, base);
            FactSet slow = fixpoint_naive(q.program, base);
            CHECK(fast == slow);
            for (const auto& [p, s] : base.unary) {
                for (int v : s) CHECK(fast.has_unary(p, v));
            }
        }
    }
}

TEST_CASE("monotonicity of the one-step operator") {
    DatalogQuery q = query(
        "X(x) :- child(x,y), X(y).\nX(x) :- leaf(x), label_a(x).\nP(x) :- X(x), root(x).\n"
        "QUERY P");
    for (const auto& t : enumerate_trees(ab(), 4, TreeFlavor::Ordered)) {
        FactSet big = facts_of(t, SchemaKind::TauGKChild);
        FactSet small = big;
        // drop the leaf facts to get a strict subset
        small.unary.erase("leaf");
        FactSet tb = immediate_consequence(q.program, big);
        FactSet ts = immediate_consequence(q.program, small);
        for (const auto& [p, s] : ts.unary)
            for (int v : s) CHECK(tb.has_unary(p, v));
    }
}

TEST_CASE("eval examples") {
    DatalogQuery q = query("P(x) :- label_a(x).\nQUERY P UNARY");
    CHECK(eval_unary(q, tree("a(b,a)")) == std::set<int>{0, 2});
    CHECK(eval_unary(q, tree("b(b)")).empty());

    AlphabetPtr abc = make_alphabet({"a", "b", "c"});
    DatalogQuery qd = query("P(x) :- desc(x,y), label_b(y).\nQUERY P UNARY",
                            SchemaKind::TauGKChildDesc, abc);
    CHECK(eval_unary(qd, parse_tree("a(c(b))", abc)) == std::set<int>{0, 1});

    DatalogQuery qr = query("P(x) :- root(x).\nQUERY P");
    for (const auto& t : enumerate_trees(ab(), 4, TreeFlavor::Ordered))
        CHECK(eval_boolean(qr, t));
    DatalogQuery qb = query("P(x) :- label_b(x).\nQUERY P");
    CHECK(!eval_boolean(qb, tree("a(b)")));
    // Boolean is root membership of the unary result
    DatalogQuery qu = query("P(x) :- label_b(x).\nQUERY P UNARY");
    for (const auto& t : enumerate_trees(ab(), 4, TreeFlavor::Ordered)) {
        DatalogQuery qbo = qu;
        qbo.mode = QueryMode::Boolean;
        CHECK(eval_boolean(qbo, t) == (eval_unary(qu, t).count(t.root()) != 0));
    }
}

TEST_CASE("unordered schemas ignore sibling order") {
    DatalogQuery q = query(
        "X(x) :- child(x,y), label_a(y), leaf(y).\nP(x) :- X(x), root(x).\nQUERY P",
        SchemaKind::TauURootLeaf);
    LabeledTree t1 = tree("b(a,b(a))", ab(), TreeFlavor::Unordered);
    LabeledTree t2 = tree("b(b(a),a)", ab(), TreeFlavor::Unordered);
    CHECK(eval_boolean(q, t1) == eval_boolean(q, t2));
}

TEST_CASE("prune_query preserves answers") {
    DatalogQuery q = query(
        "Dead(x) :- Dead2(x), label_a(x).\nDead2(x) :- Dead(x), label_b(x).\n"
        "P(x) :- label_a(x).\nUnused(x) :- root(x).\nQUERY P UNARY");
    DatalogQuery pruned = prune_query(q);
    CHECK(pruned.program.rules.size() == 1);
    for (const auto& t : enumerate_trees(ab(), 4, TreeFlavor::Ordered))
        CHECK(eval_unary(q, t) == eval_unary(pruned, t));
}

TEST_CASE("query text round-trips") {
    DatalogQuery q = query("X(x) :- child(x,y), X(y).\nX(x) :- leaf(x).\nQUERY X UNARY");
    DatalogQuery q2 = parse_query(q.to_text(), q.schema, q.alphabet);
    CHECK(q2.program.rules.size() == q.program.rules.size());
    CHECK(q2.query_pred == q.query_pred);
    CHECK(q2.mode == q.mode);
}
