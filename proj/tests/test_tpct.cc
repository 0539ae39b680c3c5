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
#include "mdlc/tpct.hh"

using namespace mdlc;
using namespace mdlc::testing;

namespace {

TpctInstance trivial_win() {
    return parse_tpct("tiles: d\nH: d d\nV: d d\nn: 2\nf: d d\nl: d d\n");
}

TpctInstance trivial_loss() {
    return parse_tpct("tiles: d\nH: d d\nV:\nn: 2\nf: d d\nl: d d\n");
}

}  // namespace

TEST_CASE("instance parsing round-trips") {
    TpctInstance i = parse_tpct("tiles: d e\nH: d d, d e\nV: e e\nn: 2\nf: d e\nl: e e\n");
    CHECK(i.tiles == std::vector<std::string>{"d", "e"});
    CHECK(i.horizontal.size() == 2);
    CHECK(i.vertical == std::set<std::pair<int, int>>{{1, 1}});
    CHECK(i.first_row == std::vector<int>{0, 1});
    TpctInstance j = parse_tpct(tpct_to_text(i));
    CHECK(j.tiles == i.tiles);
    CHECK(j.horizontal == i.horizontal);
    CHECK(j.vertical == i.vertical);
    CHECK(j.first_row == i.first_row);
    CHECK(j.last_row == i.last_row);
    CHECK_THROWS_AS(parse_tpct("tiles: d\nn: 1\nf: d\nl: d\n"), validation_error);
}

TEST_CASE("game solver on hand-checked instances") {
    CHECK(solve_game(trivial_win()).winner == Player::One);
    // without vertical fits no tile can ever be placed
    CHECK(solve_game(trivial_loss()).winner == Player::Two);
    // horizontal break: the second column can never be filled
    TpctInstance h = parse_tpct("tiles: d\nH:\nV: d d\nn: 2\nf: d d\nl: d d\n");
    CHECK(solve_game(h).winner == Player::Two);
    // the goal row is unreachable when only d fits anywhere
    TpctInstance g =
        parse_tpct("tiles: d e\nH: d d\nV: d d\nn: 2\nf: d d\nl: e e\n");
    CHECK(solve_game(g).winner == Player::Two);
    // the saboteur escapes forever by never matching the goal row
    TpctInstance esc = parse_tpct(
        "tiles: d e\nH: d d, d e, e d, e e\nV: d d, d e, e d, e e\nn: 2\nf: d d\nl: e e\n");
    CHECK(solve_game(esc).winner == Player::Two);
    // a forced win via a single allowed horizontal pair
    TpctInstance forced = parse_tpct(
        "tiles: d e\nH: d e\nV: d d, d e, e d, e e\nn: 2\nf: d d\nl: d e\n");
    GameVerdict v = solve_game(forced);
    CHECK(v.winner == Player::One);
    CHECK(!v.strategy.empty());
}

TEST_CASE("query construction matches the displayed rule inventory") {
    TpctQueries qs = build_queries(parse_tpct(
        "tiles: d e\nH: d d\nV: d d, e e\nn: 2\nf: d d\nl: d d\n"));
    CHECK(qs.alphabet->size() == 8);
    CHECK(qs.q1.schema == SchemaKind::TauURootLeaf);
    CHECK(qs.q1.query_pred == "accept");
    CHECK(qs.q2.query_pred == "reject");

    // the winning-marker column rule, exactly as displayed
    bool found = false;
    for (const auto& r : qs.q2.program.rules) {
        if (r.head.pred != "reject7" || r.body.size() != 4) continue;
        if (r.body[0].pred == "turn_bang" && r.body[1].pred == "column_not_n" &&
            r.body[2].pred == "relevant" && r.body[3].pred == "root")
            found = true;
    }
    CHECK(found);

    // a bot-labeled leaf is a candidate
    DatalogQuery cand = qs.q1;
    cand.query_pred = "candidate";
    cand.mode = QueryMode::Unary;
    LabeledTree leaf = parse_tree("d|bot", qs.alphabet, TreeFlavor::Unordered);
    CHECK(eval_unary(cand, leaf) == std::set<int>{0});
}

TEST_CASE("hand-built strategy tree for the trivial win") {
    TpctQueries qs = build_queries(trivial_win());
    // the first player places d, the saboteur's only reply completes the
    // goal row, so the tree is a root with a single winning leaf
    LabeledTree strat = parse_tree("d|2(d|bang)", qs.alphabet, TreeFlavor::Unordered);
    CHECK(eval_boolean(qs.q1, strat));
    CHECK(!eval_boolean(qs.q2, strat));

    auto rel = relevant_nodes(strat, trivial_win());
    CHECK(rel == std::vector<bool>{true, true});
    auto conds = check_conditions(strat, trivial_win());
    for (int c = 0; c < 9; ++c) CHECK(conds[c]);
}

TEST_CASE("independent condition checks catch violations") {
    TpctInstance inst = trivial_win();
    TpctQueries qs = build_queries(inst);
    // two winning markers in a row violate alternation and depth rules
    LabeledTree bad = parse_tree("d|2(d|1(d|bang))", qs.alphabet, TreeFlavor::Unordered);
    auto rel = relevant_nodes(bad, inst);
    CHECK(rel[0]);
    auto conds = check_conditions(bad, inst);
    CHECK(!conds[6]);  // marker at depth 3; 3 is no multiple of 2
    CHECK(eval_boolean(qs.q2, bad));  // the reject query sees it too

    LabeledTree alt = parse_tree("d|2(d|2(d|bang))", qs.alphabet, TreeFlavor::Unordered);
    if (relevant_nodes(alt, inst)[1]) {
        auto c2 = check_conditions(alt, inst);
        CHECK(!c2[5]);  // two saboteur turns in a row
    }
    CHECK(eval_boolean(qs.q2, alt));
}

TEST_CASE("cross-check on the trivial instances") {
    CHECK(cross_check(trivial_win()));
    CHECK(cross_check(trivial_loss()));
}

TEST_CASE("cross-check with the pure child-only pair") {
    TpctQueries plain = build_queries(trivial_win());
    TpctQueries qs = eliminate_root_leaf_pair(trivial_win());
    CHECK(qs.q1.schema == SchemaKind::TauU);
    ContainmentVerdict v = decide_containment(qs.q1, qs.q2, SchemaKind::TauU);
    CHECK(!v.contained);

    TpctQueries qs2 = eliminate_root_leaf_pair(trivial_loss());
    ContainmentVerdict v2 = decide_containment(qs2.q1, qs2.q2, SchemaKind::TauU);
    CHECK(v2.contained);
    (void)plain;
}

TEST_CASE("witness trees satisfy the nine conditions on the relevant part") {
    TpctInstance inst = trivial_win();
    TpctQueries qs = build_queries(inst);
    ContainmentVerdict v = decide_containment(qs.q1, qs.q2, SchemaKind::TauURootLeaf);
    REQUIRE(!v.contained);
    REQUIRE(v.witness_tree.has_value());
    auto conds = check_conditions(*v.witness_tree, inst);
    for (int c = 0; c < 9; ++c) {
        CAPTURE(c);
        CHECK(conds[c]);
    }
}
