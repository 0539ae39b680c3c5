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

#ifndef MDLC_ATA_HH
#define MDLC_ATA_HH

#include <map>
#include <string>
#include <vector>

#include "mdlc/tree.hh"

namespace mdlc {

enum class Move { Up, Stay, DownLeft, DownRight };

std::string move_name(Move m);

/// Positive Boolean formula over (state, move) pairs: atoms closed under
/// conjunction and disjunction, no constants and no negation.
struct AtaFormula {
    enum class Kind { Atom, And, Or } kind = Kind::Atom;
    int state = -1;
    Move move = Move::Stay;
    std::vector<AtaFormula> parts;

    static AtaFormula atom(int state, Move move) {
        AtaFormula f;
        f.kind = Kind::Atom;
        f.state = state;
        f.move = move;
        return f;
    }
    static AtaFormula conj(std::vector<AtaFormula> parts);
    static AtaFormula disj(std::vector<AtaFormula> parts);

    /// Evaluates under a truth assignment for the atoms.
    template <typename F>
    bool eval(const F& atom_true) const {
        switch (kind) {
            case Kind::Atom: return atom_true(state, move);
            case Kind::And:
                for (const auto& p : parts)
                    if (!p.eval(atom_true)) return false;
                return true;
            case Kind::Or:
                for (const auto& p : parts)
                    if (p.eval(atom_true)) return true;
                return false;
        }
        return false;
    }

    void collect_atoms(std::vector<std::pair<int, Move>>& out) const;
    std::string to_text(const std::vector<std::string>& state_names) const;
};

/// Two-way alternating tree automaton on binary trees. A missing transition
/// entry means the automaton can only stop in that situation (which is
/// accepting exactly when the state is).
struct TwoWayAta {
    AlphabetPtr alphabet;
    std::vector<std::string> state_names;
    int initial = 0;
    std::vector<int> accepting;                   // sorted
    std::map<std::pair<int, int>, AtaFormula> delta;  // (state, symbol) -> formula

    int num_states() const { return static_cast<int>(state_names.size()); }
    bool is_accepting(int s) const;
    const AtaFormula* formula(int state, int symbol) const;
    /// States that occur in some atom with an Up move.
    std::vector<int> up_states() const;

    std::string to_text() const;
};

TwoWayAta parse_ata(const std::string& text);

/// Decides acceptance directly: a configuration (state, node) wins when the
/// state is accepting (the automaton may stop) or some satisfying set of
/// its transition formula leads to winning configurations only; moves off
/// the tree win exactly from accepting states. Least fixpoint, so every
/// winning configuration unfolds into a finite run.
bool ata_accepts(const TwoWayAta& a, const BinaryTree& t);

}  // namespace mdlc

#endif
