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

TEST_CASE("parse_tree basics") {
    LabeledTree t = tree("a");
    CHECK(t.size() == 1);
    CHECK(t.label_name(0) == "a");

    t = tree("a(b,c(d))", make_alphabet({"a", "b", "c", "d"}));
    CHECK(t.size() == 4);
    CHECK(t.label_name(0) == "a");
    REQUIRE(t.children[0].size() == 2);
    CHECK(t.label_name(t.children[0][0]) == "b");
    int c = t.children[0][1];
    CHECK(t.label_name(c) == "c");
    REQUIRE(t.children[c].size() == 1);
    CHECK(t.label_name(t.children[c][0]) == "d");
    // preorder ids
    CHECK(t.children[0][0] == 1);
    CHECK(c == 2);

    CHECK_THROWS_AS(tree("a("), parse_error);
    CHECK_THROWS_AS(tree("z"), parse_error);
    CHECK(tree_to_text(tree(" a ( b , a ) ")) == "a(b,a)");
}

TEST_CASE("composite labels parse unambiguously") {
    AlphabetPtr marked = marked_alphabet(ab());
    LabeledTree t = parse_tree("(a,0)((b,1))", marked);
    CHECK(t.size() == 2);
    CHECK(t.label_name(0) == "(a,0)");
    CHECK(t.label_name(1) == "(b,1)");
}

TEST_CASE("facts_of examples") {
    FactSet f = facts_of(tree("a(b)"), SchemaKind::TauURootLeaf);
    CHECK(f.has_unary("root", 0));
    CHECK(f.has_binary("child", 0, 1));
    CHECK(f.has_unary("leaf", 1));
    CHECK(f.has_unary("label_a", 0));
    CHECK(f.has_unary("label_b", 1));
    CHECK(f.unary["root"].size() == 1);
    CHECK(f.unary["leaf"].size() == 1);

    f = facts_of(tree("a(b,c)", make_alphabet({"a", "b", "c"})), SchemaKind::TauURootLeafDesc);
    CHECK(f.binary["desc"] == std::set<std::pair<int, int>>{{0, 1}, {0, 2}});

    f = facts_of(tree("a(b(c))", make_alphabet({"a", "b", "c"})), SchemaKind::TauURootLeafDesc);
    CHECK(f.binary["desc"] == std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("desc equals the independent closure of child") {
    for (const auto& t : enumerate_trees(ab(), 5, TreeFlavor::Ordered)) {
        FactSet f = facts_of(t, SchemaKind::TauGKChildDesc);
        auto want = closure_oracle(t);
        std::set<std::pair<int, int>> got;
        if (f.binary.count("desc")) got = f.binary["desc"];
        CHECK(got == want);
    }
}

TEST_CASE("ordered facts: fc, ns, ls") {
    FactSet f = facts_of(tree("a(b,a,b)"), SchemaKind::TauGK);
    CHECK(f.has_binary("fc", 0, 1));
    CHECK(f.has_binary("ns", 1, 2));
    CHECK(f.has_binary("ns", 2, 3));
    CHECK(!f.has_binary("ns", 0, 1));
    // last siblings: the last child, and the root itself
    CHECK(f.has_unary("ls", 3));
    CHECK(f.has_unary("ls", 0));
    CHECK(!f.has_unary("ls", 1));
    CHECK_THROWS_AS(
        facts_of(tree("a(b)", ab(), TreeFlavor::Unordered), SchemaKind::TauGK),
        validation_error);
}

TEST_CASE("binary encoding examples") {
    BinaryTree b = to_binary(tree("a"));
    CHECK(b.size() == 1);
    CHECK(b.left[0] == -1);
    CHECK(b.right[0] == -1);

    b = to_binary(tree("a(b,c)", make_alphabet({"a", "b", "c"})));
    CHECK(b.label_name(0) == "a");
    REQUIRE(b.left[0] != -1);
    CHECK(b.label_name(b.left[0]) == "b");
    CHECK(b.right[b.left[0]] != -1);
    CHECK(b.label_name(b.right[b.left[0]]) == "c");
    CHECK(b.right[0] == -1);

    FactSet f = facts_of(b, SchemaKind::TauB);
    CHECK(f.has_unary("hnrc", 0));  // the root is always in hnrc
}

TEST_CASE("binary encoding round-trips on every small tree") {
    for (const auto& t : enumerate_trees(ab(), 7, TreeFlavor::Ordered)) {
        BinaryTree b = to_binary(t);
        CHECK(b.right[0] == -1);
        LabeledTree back = from_binary(b);
        CHECK(tree_to_text(back) == tree_to_text(t));
    }
}

TEST_CASE("from_binary rejects a root with a right child") {
    BinaryTree b;
    b.alphabet = ab();
    b.label = {0, 1};
    b.left = {-1, -1};
    b.right = {1, -1};
    b.parent = {-1, 0};
    CHECK_THROWS_AS(from_binary(b), validation_error);
}

TEST_CASE("flag extension") {
    BinaryTree single = to_binary(tree("a"));
    BinaryTree h = extend_hat(single);
    CHECK(h.label_name(0) == hat_symbol("a", kHatRoot | kHatHnlc | kHatHnrc));

    BinaryTree ab2 = to_binary(tree("a(b)"));
    h = extend_hat(ab2);
    auto [name, flags] = split_hat_symbol(h.label_name(1));
    CHECK(name == "b");
    CHECK(flags == (kHatHnlc | kHatHnrc | kHatIslc));

    // flags agree with a structural recomputation on every enumerated tree
    for (const auto& b : enumerate_binary_trees(ab(), 6)) {
        BinaryTree hb = extend_hat(b);
        for (int v = 0; v < b.size(); ++v) {
            auto [base, fl] = split_hat_symbol(hb.label_name(v));
            CHECK(base == b.label_name(v));
            CHECK(((fl & kHatRoot) != 0) == (b.parent[v] == -1));
            CHECK(((fl & kHatHnlc) != 0) == (b.left[v] == -1));
            CHECK(((fl & kHatHnrc) != 0) == (b.right[v] == -1));
            CHECK(((fl & kHatIslc) != 0) == (b.parent[v] != -1 && b.left[b.parent[v]] == v));
            CHECK(((fl & kHatIsrc) != 0) == (b.parent[v] != -1 && b.right[b.parent[v]] == v));
        }
        CHECK(binary_tree_to_text(strip_hat(hb, ab())) == binary_tree_to_text(b));
    }
}

TEST_CASE("mark_node") {
    LabeledTree m = mark_node(tree("a"), 0);
    CHECK(tree_to_text(m) == "(a,1)");
    m = mark_node(tree("a(b)"), 1);
    CHECK(tree_to_text(m) == "(a,0)((b,1))");
    CHECK_THROWS_AS(mark_node(tree("a"), 3), validation_error);

    for (const auto& t : enumerate_trees(ab(), 5, TreeFlavor::Ordered)) {
        int total_marks = 0;
        for (int v = 0; v < t.size(); ++v) {
            LabeledTree mt = mark_node(t, v);
            int marks = 0;
            for (int u = 0; u < mt.size(); ++u)
                if (split_marked_symbol(mt.label_name(u)).second) ++marks;
            CHECK(marks == 1);
            total_marks += marks;
            auto [back, node] = unmark_tree(mt, ab());
            CHECK(node == v);
            CHECK(tree_to_text(back) == tree_to_text(t));
        }
        CHECK(total_marks == t.size());
    }
}

TEST_CASE("enumeration counts") {
    AlphabetPtr a1 = make_alphabet({"a"});
    CHECK(enumerate_trees(a1, 1, TreeFlavor::Ordered).size() == 1);
    CHECK(enumerate_trees(a1, 3, TreeFlavor::Ordered).size() == 4);  // 1 + 1 + 2
    CHECK(enumerate_trees(ab(), 2, TreeFlavor::Ordered).size() == 6);  // 2 + 4

    // every ordered tree appears exactly once
    auto all = enumerate_trees(ab(), 5, TreeFlavor::Ordered);
    std::set<std::string> texts;
    for (const auto& t : all) texts.insert(tree_to_text(t));
    CHECK(texts.size() == all.size());

    // the unordered enumeration matches deduplication of the ordered one
    auto unordered = enumerate_trees(ab(), 5, TreeFlavor::Unordered);
    std::set<std::string> canon;
    for (const auto& t : all) canon.insert(tree_to_text(canonicalize_unordered(t)));
    std::set<std::string> canon2;
    for (const auto& t : unordered) {
        CHECK(tree_to_text(canonicalize_unordered(t)) == tree_to_text(t));
        canon2.insert(tree_to_text(t));
    }
    CHECK(canon2.size() == unordered.size());
    CHECK(canon == canon2);

    // binary trees: 1, 2, 5, 14 shapes
    CHECK(enumerate_binary_trees(a1, 4).size() == 1 + 2 + 5 + 14);
}
