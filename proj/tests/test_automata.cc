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

const std::vector<std::string>& tmnf_corpus_texts() {
    static const std::vector<std::string> texts = {
        "P(x) :- label_a(x), label_a(x).\nQUERY P",
        "P(x) :- root(x), label_b(x).\nQUERY P",
        "P(x) :- lc(x,y), label_a(y).\nQUERY P",
        "P(x) :- rc(x,y), label_b(y).\nQUERY P",
        "P(x) :- lc(y,x), label_a(y).\nQUERY P",
        "P(x) :- rc(y,x), label_b(y).\nQUERY P",
        "B(x) :- label_b(x), label_b(x).\nB(x) :- lc(x,y), B(y).\nB(x) :- rc(x,y), B(y).\n"
        "P(x) :- B(x), root(x).\nQUERY P",
        "U(x) :- root(x), label_a(x).\nU(x) :- lc(y,x), U(y).\nU(x) :- rc(y,x), U(y).\n"
        "P(x) :- U(x), hnlc(x).\nQUERY P",
        "P(x) :- hnlc(x), hnrc(x).\nQUERY P",
        "A(x) :- label_a(x), hnrc(x).\nC(x) :- lc(x,y), A(y).\nP(x) :- C(x), root(x).\nQUERY P",
        "L(x) :- label_a(x), label_a(x).\nL(x) :- lc(x,y), L(y).\nR(x) :- label_b(x), L(x).\n"
        "P(x) :- rc(x,y), R(y).\nQUERY P",
        "D(x) :- lc(y,x), root(y).\nE(x) :- rc(y,x), D(y).\nP(x) :- E(x), label_a(x).\nQUERY P",
    };
    return texts;
}

std::vector<DatalogQuery> tmnf_corpus() {
    std::vector<DatalogQuery> out;
    for (const auto& t : tmnf_corpus_texts()) out.push_back(query(t, SchemaKind::TauB));
    return out;
}

}  // namespace

TEST_CASE("alternating automaton construction shape") {
    DatalogQuery q = query(
        "X(x) :- root(x), label_a(x).\nX(x) :- lc(x,y), X(y).\nP(x) :- X(x), hnrc(x).\nQUERY P",
        SchemaKind::TauB);
    TwoWayAta a = build_2ata(q);
    // exactly |idb| + |alphabet| + 7 states
    CHECK(a.num_states() == 2 + 2 + 7);
    CHECK(a.state_names[a.initial] == "P");
    CHECK(a.accepting.size() == 1);
    CHECK(a.state_names[a.accepting[0]] == "Accept");

    // the transition for a unary/unary rule conjoins two Stay moves
    int p_state = -1;
    for (int i = 0; i < a.num_states(); ++i)
        if (a.state_names[i] == "P") p_state = i;
    const AtaFormula* f = a.formula(p_state, 0);
    REQUIRE(f != nullptr);
    std::string text = f->to_text(a.state_names);
    CHECK(text == "(X,Stay) & (hnrc,Stay)");

    int x_state = -1;
    for (int i = 0; i < a.num_states(); ++i)
        if (a.state_names[i] == "X") x_state = i;
    text = a.formula(x_state, 0)->to_text(a.state_names);
    CHECK(text == "(root,Stay) & (label_a,Stay) | (islc,DownLeft) & (X,DownLeft)");
}

TEST_CASE("alternating acceptance matches evaluation") {
    auto corpus = tmnf_corpus();
    auto trees = enumerate_binary_trees(ab(), 6);
    for (const auto& q : corpus) {
        TwoWayAta a = build_2ata(q);
        for (const auto& t : trees)
            CHECK(ata_accepts(a, extend_hat(t)) == eval_boolean(q, t));
    }
}

TEST_CASE("alternating acceptance on random queries") {
    std::mt19937 rng(23);
    auto trees = enumerate_binary_trees(ab(), 5);
    for (int i = 0; i < 20; ++i) {
        DatalogQuery q = random_tmnf_query(rng);
        TwoWayAta a = build_2ata(q);
        for (const auto& t : trees)
            CHECK(ata_accepts(a, extend_hat(t)) == eval_boolean(q, t));
    }
}

TEST_CASE("alternating automaton text round-trip") {
    DatalogQuery q = query(
        "X(x) :- lc(y,x), label_a(y).\nP(x) :- X(x), hnrc(x).\nQUERY P", SchemaKind::TauB);
    TwoWayAta a = build_2ata(q);
    TwoWayAta b = parse_ata(a.to_text());
    CHECK(b.num_states() == a.num_states());
    for (const auto& t : enumerate_binary_trees(ab(), 4)) {
        BinaryTree h = extend_hat(t);
        CHECK(ata_accepts(a, h) == ata_accepts(b, h));
    }
}

TEST_CASE("conversion to bottom-up automata") {
    auto trees = enumerate_binary_trees(ab(), 5);
    AlphabetPtr hat = hat_alphabet(ab());

    // a two-way automaton that accepts everything
    TwoWayAta all;
    all.alphabet = hat;
    all.state_names = {"go"};
    all.initial = 0;
    all.accepting = {0};
    Nbta n = ata_to_nbta(all);
    for (const auto& t : enumerate_binary_trees(hat, 3)) CHECK(accepts(n, t));

    auto corpus = tmnf_corpus();
    corpus.resize(6);  // the acceptance suite runs the full corpus
    for (const auto& q : corpus) {
        TwoWayAta a = build_2ata(q);
        Nbta conv = ata_to_nbta(a);
        Nbta comp = flip_acceptance(conv);
        for (const auto& t : trees) {
            BinaryTree h = extend_hat(t);
            bool want = ata_accepts(a, h);
            CHECK(accepts(conv, h) == want);
            CHECK(accepts(comp, h) == !want);
        }
    }
    // language equality also on trees that are no valid flag extension
    {
        DatalogQuery q = query("P(x) :- lc(x,y), label_a(y).\nQUERY P", SchemaKind::TauB);
        TwoWayAta a = build_2ata(q);
        Nbta conv = ata_to_nbta(a);
        for (const auto& t : enumerate_binary_trees(hat, 3))
            CHECK(accepts(conv, t) == ata_accepts(a, t));
    }
}

TEST_CASE("hat checker accepts exactly the valid flag extensions") {
    Nbta hc = build_hat_checker(ab());
    CHECK(hc.num_states == 3);
    for (const auto& t : enumerate_binary_trees(ab(), 5)) CHECK(accepts(hc, extend_hat(t)));
    // flipping any flag set breaks acceptance
    std::mt19937 rng(29);
    AlphabetPtr hat = hat_alphabet(ab());
    for (const auto& t : enumerate_binary_trees(ab(), 4)) {
        BinaryTree h = extend_hat(t);
        int v = static_cast<int>(rng() % h.size());
        unsigned flags = hat_flags(h.label[v]);
        unsigned flipped = flags ^ (1u << (rng() % kHatFlagCount));
        h.label[v] = hat_index(hat_base_index(h.label[v]), flipped);
        CHECK(!accepts(hc, h));
    }
}

TEST_CASE("Yes-automata and No-automata from the alternating route") {
    auto corpus = tmnf_corpus();
    corpus.resize(6);
    auto trees = enumerate_binary_trees(ab(), 5);
    for (const auto& q : corpus) {
        Nbta yes = build_a_yes(q);
        Nbta no = build_a_no_via_ata(q);
        for (const auto& t : trees) {
            bool want = eval_boolean(q, t);
            CHECK(accepts(yes, t) == want);
            CHECK(accepts(no, t) == !want);
        }
    }
}

TEST_CASE("assignment automata") {
    // exactly one node carries the variable bit; two states
    for (int j : {1, 2}) {
        Nbta a = build_assignment_automaton(j, ab(), 1);
        CHECK(a.num_states == 2);
        AlphabetPtr sig = a.alphabet;
        for (const auto& t : enumerate_binary_trees(sig, 3)) {
            int count = 0;
            for (int v = 0; v < t.size(); ++v) {
                int z = t.label[v] % 4;
                count += j == 1 ? (z >> 1) : (z & 1);
            }
            CHECK(accepts(a, t) == (count == 1));
        }
    }
}

TEST_CASE("atom automata") {
    // Label test at the flagged node
    AtomSpec chi;
    chi.kind = AtomSpec::Kind::Unary;
    chi.pred = "label_a";
    chi.var = 1;
    Nbta a = build_atom_automaton(chi, ab(), 0);
    CHECK(a.num_states <= 3);
    for (const auto& t : enumerate_binary_trees(a.alphabet, 4)) {
        // the automaton's contract assumes exactly one flagged node
        std::vector<int> flagged;
        for (int v = 0; v < t.size(); ++v)
            if ((t.label[v] % 4) >> 1) flagged.push_back(v);
        if (flagged.size() != 1) continue;
        bool want = t.label[flagged[0]] / 4 == 0;  // base symbol 'a'
        CHECK(accepts(a, t) == want);
    }

    // left-child atom: the z1 node is the left child of the z2 node
    AtomSpec lc;
    lc.kind = AtomSpec::Kind::Binary;
    lc.rel = "lc";
    lc.from = 2;
    lc.to = 1;
    a = build_atom_automaton(lc, ab(), 0);
    CHECK(a.num_states == 3);
    for (const auto& t : enumerate_binary_trees(a.alphabet, 4)) {
        std::vector<int> z1, z2;
        for (int v = 0; v < t.size(); ++v) {
            if ((t.label[v] % 4) >> 1) z1.push_back(v);
            if (t.label[v] % 2) z2.push_back(v);
        }
        if (z1.size() != 1 || z2.size() != 1) continue;
        bool want = t.left[z2[0]] == z1[0];
        CHECK(accepts(a, t) == want);
    }

    // negated intensional bit at the flagged node
    AtomSpec neg;
    neg.kind = AtomSpec::Kind::Unary;
    neg.pred = "q0";
    neg.idb_bit = 0;
    neg.negated = true;
    neg.var = 2;
    a = build_atom_automaton(neg, ab(), 1);
    CHECK(a.num_states == 2);
    for (const auto& t : enumerate_binary_trees(a.alphabet, 3)) {
        std::vector<int> z2;
        for (int v = 0; v < t.size(); ++v)
            if (t.label[v] % 2) z2.push_back(v);
        if (z2.size() != 1) continue;
        bool bit = (t.label[z2[0]] / 4) % 2;
        CHECK(accepts(a, t) == !bit);
    }
}

TEST_CASE("No-automata via set variables match evaluation") {
    // an always-Yes query has an empty No-language
    DatalogQuery q = query("P(x) :- root(x), root(x).\nQUERY P", SchemaKind::TauB);
    CHECK(is_empty(build_a_no(q)));

    // root labeled b: the No-automaton accepts exactly the a-rooted trees
    q = query("P(x) :- root(x), label_b(x).\nQUERY P", SchemaKind::TauB);
    Nbta no = build_a_no(q);
    for (const auto& t : enumerate_binary_trees(ab(), 5))
        CHECK(accepts(no, t) == (t.label_name(0) == "a"));

    // the whole corpus, exhaustively
    auto trees = enumerate_binary_trees(ab(), 6);
    for (const auto& qq : tmnf_corpus()) {
        NoRouteStats stats;
        Nbta a = build_a_no(qq, 4096, 200000, &stats);
        CHECK(stats.per_rule_max_states <= 243);
        for (const auto& t : trees) CHECK(accepts(a, t) == !eval_boolean(qq, t));
    }

    // random queries too
    std::mt19937 rng(31);
    auto small = enumerate_binary_trees(ab(), 5);
    for (int i = 0; i < 15; ++i) {
        DatalogQuery rq = random_tmnf_query(rng);
        Nbta a = build_a_no(rq);
        for (const auto& t : small) CHECK(accepts(a, t) == !eval_boolean(rq, t));
    }
}

TEST_CASE("the two routes complement each other") {
    auto trees = enumerate_binary_trees(ab(), 5);
    auto corpus = tmnf_corpus();
    corpus.resize(6);
    for (const auto& q : corpus) {
        Nbta yes = build_a_yes(q);
        Nbta no = build_a_no(q);
        Nbta yes2 = build_a_yes_via_mso(q);
        for (const auto& t : trees) {
            CHECK(accepts(yes, t) != accepts(no, t));
            CHECK(accepts(yes2, t) == accepts(yes, t));
        }
        CHECK(is_empty(prune(intersect_nbta(yes, no))));
    }
}
