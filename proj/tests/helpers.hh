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

#ifndef MDLC_TESTS_HELPERS_HH
#define MDLC_TESTS_HELPERS_HH

#include <random>

#include "mdlc/containment.hh"
#include "mdlc/query_automata.hh"

namespace mdlc::testing {

inline AlphabetPtr ab() {
    static AlphabetPtr a = make_alphabet({"a", "b"});
    return a;
}

inline LabeledTree tree(const std::string& text, AlphabetPtr alpha = ab(),
                        TreeFlavor flavor = TreeFlavor::Ordered) {
    return parse_tree(text, std::move(alpha), flavor);
}

inline DatalogQuery query(const std::string& text, SchemaKind schema = SchemaKind::TauGKChildDesc,
                          AlphabetPtr alpha = ab()) {
    return parse_query(text, schema, std::move(alpha));
}

/// Independent transitive-closure oracle over the child facts.
inline std::set<std::pair<int, int>> closure_oracle(const LabeledTree& t) {
    std::set<std::pair<int, int>> desc;
    for (int v = 0; v < t.size(); ++v)
        for (int c : t.children[v]) desc.insert({v, c});
    bool changed = true;
    while (changed) {
        changed = false;
        auto snapshot = desc;
        for (auto [a, b] : snapshot)
            for (auto [c, d] : snapshot)
                if (b == c && desc.insert({a, d}).second) changed = true;
    }
    return desc;
}

/// Random normal-form Boolean queries over the binary-tree schema.
inline DatalogQuery random_tmnf_query(std::mt19937& rng, AlphabetPtr alpha = ab(),
                                      int max_idb = 3, int max_rules = 5) {
    std::uniform_int_distribution<int> coin(0, 1);
    int nidb = 1 + static_cast<int>(rng() % max_idb);
    int nrules = 1 + static_cast<int>(rng() % max_rules);
    std::vector<std::string> preds;
    for (int i = 0; i < nidb; ++i) preds.push_back("q" + std::to_string(i));
    std::vector<std::string> unary_pool = {"root", "hnlc", "hnrc"};
    for (const auto& s : alpha->symbols()) unary_pool.push_back("label_" + s);
    auto unary = [&]() {
        if (coin(rng)) return preds[rng() % preds.size()];
        return unary_pool[rng() % unary_pool.size()];
    };
    DatalogQuery q;
    q.alphabet = alpha;
    q.schema = SchemaKind::TauB;
    q.mode = QueryMode::Boolean;
    q.query_pred = preds[0];
    for (int i = 0; i < nrules; ++i) {
        Rule r;
        r.head = {preds[rng() % preds.size()], {"x"}};
        switch (rng() % 3) {
            case 0:
                r.body = {{unary(), {"x"}}, {unary(), {"x"}}};
                break;
            case 1:
                r.body = {{coin(rng) ? "lc" : "rc", {"x", "y"}}, {unary(), {"y"}}};
                break;
            default:
                r.body = {{coin(rng) ? "lc" : "rc", {"y", "x"}}, {unary(), {"y"}}};
                break;
        }
        q.program.rules.push_back(std::move(r));
    }
    // every predicate needs at least one rule to be intensional
    for (int i = 0; i < nidb; ++i) {
        bool has = false;
        for (const auto& r : q.program.rules) has = has || r.head.pred == preds[i];
        if (!has)
            q.program.rules.push_back({{preds[i], {"x"}}, {{"root", {"x"}}, {"root", {"x"}}}});
    }
    validate_query(q);
    return q;
}

/// Random small automata for language-algebra tests.
inline Nbta random_nbta(std::mt19937& rng, AlphabetPtr alpha = ab(), int max_states = 3) {
    Nbta a;
    a.alphabet = alpha;
    a.num_states = 1 + static_cast<int>(rng() % max_states);
    int ntrans = 3 + static_cast<int>(rng() % 12);
    for (int i = 0; i < ntrans; ++i) {
        auto pick = [&]() {
            int v = static_cast<int>(rng() % (a.num_states + 1));
            return v == a.num_states ? Nbta::kPad : v;
        };
        a.add_transition(pick(), pick(), static_cast<int>(rng() % alpha->size()),
                         static_cast<int>(rng() % a.num_states));
    }
    for (int s = 0; s < a.num_states; ++s)
        if (rng() % 2) a.accepting.push_back(s);
    return a;
}

}  // namespace mdlc::testing

#endif
