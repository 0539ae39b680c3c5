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

#ifndef MDLC_NBTA_HH
#define MDLC_NBTA_HH

#include <optional>
#include <unordered_map>
#include <vector>

#include "mdlc/tree.hh"

namespace mdlc {

/// Nondeterministic bottom-up tree automaton on binary trees. Transitions
/// read (left state, right state, symbol) with -1 standing in for an absent
/// child ('#') and yield a set of target states.
class Nbta {
public:
    static constexpr int kPad = -1;

    struct Key {
        int l, r, sym;
        bool operator==(const Key& o) const { return l == o.l && r == o.r && sym == o.sym; }
    };
    struct KeyHash {
        size_t operator()(const Key& k) const {
            size_t h = 0;
            hash_mix(h, static_cast<size_t>(k.l + 1));
            hash_mix(h, static_cast<size_t>(k.r + 1));
            hash_mix(h, static_cast<size_t>(k.sym));
            return h;
        }
    };

    AlphabetPtr alphabet;
    int num_states = 0;
    std::vector<int> accepting;  // sorted, unique
    std::unordered_map<Key, std::vector<int>, KeyHash> transitions;  // targets sorted

    void add_transition(int l, int r, int sym, int target);
    bool is_accepting(int s) const;
    size_t transition_count() const;

    std::string to_text() const;
};

Nbta parse_nbta(const std::string& text);

/// An accepting run exists; decided by bottom-up propagation of reachable
/// state sets.
bool accepts(const Nbta& a, const BinaryTree& t);

/// All states reachable at the root over some run (used by tests).
std::vector<int> root_states(const Nbta& a, const BinaryTree& t);

// State counts are pinned: k1+k2, k1*k2, 2^k, and unchanged, respectively.
Nbta union_nbta(const Nbta& a1, const Nbta& a2);
Nbta intersect_nbta(const Nbta& a1, const Nbta& a2);
/// Subset construction over the full powerset, then flipped acceptance.
/// Only sensible for small automata; `max_states_exp` caps the exponent.
Nbta complement_nbta(const Nbta& a, int max_states_exp = 10);
/// Language-equal complement that only materializes reachable subsets.
Nbta complement_reachable(const Nbta& a, size_t max_states);
/// Re-labels symbols through `map` (new symbol index per old one).
Nbta project_nbta(const Nbta& a, const AlphabetPtr& target, const std::vector<int>& map);

bool is_empty(const Nbta& a);
/// A minimum-node-count accepted tree, ties broken by the textual canonical
/// order; absent iff the language is empty.
std::optional<BinaryTree> witness(const Nbta& a);

/// Removes states that are not both productive and useful; language-preserving.
Nbta prune(const Nbta& a);

/// Complements a complete deterministic automaton by flipping acceptance.
Nbta flip_acceptance(const Nbta& a);

}  // namespace mdlc

#endif
