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

#ifndef MDLC_QUERY_AUTOMATA_HH
#define MDLC_QUERY_AUTOMATA_HH

#include <array>
#include <memory>

#include <boost/container/small_vector.hpp>

#include "mdlc/ata.hh"
#include "mdlc/datalog.hh"
#include "mdlc/nbta.hh"
#include "mdlc/rewrite.hh"

namespace mdlc {

// -- Query -> two-way alternating automaton ---------------------------------

/// Builds the alternating automaton whose runs mirror derivation trees of a
/// Boolean normal-form query on binary trees. It runs on flag-extended
/// trees; states are the intensional predicates, one test state per label,
/// the five structural flags, and Accept/Reject. Accepts extend_hat(T) iff
/// the query answers Yes on T.
TwoWayAta build_2ata(const DatalogQuery& q);

// -- Two-way alternating -> bottom-up nondeterministic ------------------------

/// Converts by summarizing, per subtree, which states can complete inside
/// it as a monotone function of which states would win when handed upward
/// at the subtree root (least fixpoint through the boundary, so circular
/// justifications never count). The resulting automaton is deterministic
/// and complete over the summaries it reaches; flipping its accepting set
/// therefore complements the language.
class AtaSummaryMachine {
public:
    AtaSummaryMachine(TwoWayAta ata, size_t max_summaries);

    int leaf(int sym) { return combine(-1, -1, sym); }
    /// l/r are summary ids or -1 for an absent child.
    int combine(int l, int r, int sym);
    bool accepts_root(int id) const;
    size_t size() const { return summaries_.size(); }
    const TwoWayAta& ata() const { return ata_; }

private:
    // antichain of minimal assumption sets (bitsets over the Up-states)
    using Cube = std::array<uint64_t, 2>;
    using Dnf = boost::container::small_vector<Cube, 4>;
    struct Summary {
        std::vector<Dnf> wins;  // per automaton state
    };

    Dnf eval_formula(const AtaFormula& f, const std::vector<Dnf>& x, int lsum, int rsum) const;
    Dnf substitute(const Dnf& d, const std::vector<Dnf>& x) const;
    int intern(Summary s);

    TwoWayAta ata_;
    size_t max_summaries_;
    std::vector<int> up_states_;       // states with Up-atoms, in order
    std::vector<int> up_index_;        // state -> index in up_states_ or -1
    // parents only read these states of a child summary (downward-moved
    // states plus the initial one); summaries identical there are merged
    std::vector<int> read_states_;
    std::vector<Summary> summaries_;
    std::unordered_map<std::string, int> intern_;
    std::unordered_map<uint64_t, int> step_memo_;
};

/// Materializes the conversion as an automaton over the same alphabet.
/// `complement` flips acceptance (sound because the result is deterministic
/// and complete).
Nbta ata_to_nbta(const TwoWayAta& a, size_t max_states = 200000, bool complement = false);

/// Accepts exactly the valid flag-extensions extend_hat(T).
Nbta build_hat_checker(const AlphabetPtr& sigma);

/// Accepts exactly the binary trees T with q(T)=Yes, via the alternating
/// route: convert, restrict to valid flag-extensions, project the flags away.
Nbta build_a_yes(const DatalogQuery& q, size_t max_states = 200000);

/// Same pipeline with flipped acceptance: exactly the trees with q(T)=No.
Nbta build_a_no_via_ata(const DatalogQuery& q, size_t max_states = 200000);

// -- Query -> automaton for the No-language via set variables ----------------

/// An atom over the two node variables, interpreted on trees whose labels
/// carry one bit per intensional predicate plus two variable bits.
struct AtomSpec {
    enum class Kind { Unary, Binary } kind = Kind::Unary;
    // Unary: a test at the flagged node of variable `var` (1 or 2):
    //   pred is "label_<sym>", "root", "hnlc", "hnrc", or an intensional
    //   bit (idb_bit >= 0); `negated` flips intensional bits only.
    std::string pred;
    int idb_bit = -1;
    bool negated = false;
    int var = 1;
    // Binary: rel in {lc, rc}; the var `to`'s node is the rel-child of
    // var `from`'s node.
    std::string rel;
    int from = 1, to = 2;
};

/// Checks that exactly one node carries the z_j bit (j in {1,2});
/// two states.
Nbta build_assignment_automaton(int j, const AlphabetPtr& base, int n_bits,
                                long long max_symbols = 4096);

/// Accepts iff the flagged node(s) satisfy the atom; at most three states.
Nbta build_atom_automaton(const AtomSpec& chi, const AlphabetPtr& base, int n_bits,
                          long long max_symbols = 4096);

struct NoRouteStats {
    int idb_count = 0;
    long long sigma_n_size = 0;
    size_t det_states = 0;
    size_t per_rule_max_states = 0;
};

/// Accepts exactly the binary trees T with q(T)=No (q Boolean, normal form,
/// binary-tree schema). Implements the set-variable construction: per-rule
/// violation automata and an accepted-at-root automaton are unioned, the
/// node variables are projected away, the result is determinized and
/// complemented, and the predicate bits are projected away. The stages are
/// fused so only the final automaton over the base alphabet materializes.
Nbta build_a_no(const DatalogQuery& q, long long max_sigma_n = 4096,
                size_t max_states = 200000, NoRouteStats* stats = nullptr);

/// Complement of the No-automaton; for differential testing.
Nbta build_a_yes_via_mso(const DatalogQuery& q, long long max_sigma_n = 4096,
                         size_t max_states = 200000);

}  // namespace mdlc

#endif
