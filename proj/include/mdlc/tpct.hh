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

#ifndef MDLC_TPCT_HH
#define MDLC_TPCT_HH

#include "mdlc/containment.hh"

namespace mdlc {

/// Two-person corridor tiling instance: tile set, horizontal/vertical
/// constraints, corridor width, and the given first and designated last row.
struct TpctInstance {
    std::vector<std::string> tiles;
    std::set<std::pair<int, int>> horizontal;  // (left, right) tile indexes
    std::set<std::pair<int, int>> vertical;    // (above, below)
    int width = 2;
    std::vector<int> first_row, last_row;

    int tile_index(const std::string& name) const;
};

TpctInstance parse_tpct(const std::string& text);
std::string tpct_to_text(const TpctInstance& inst);

enum class Player { One, Two };

struct GameVerdict {
    Player winner = Player::Two;
    /// For Player 1 wins: a winning move per reachable position where
    /// Player 1 is to move (position rendered as text).
    std::map<std::string, std::string> strategy;
    size_t positions = 0;
};

/// Exact solver: builds the reachable arena whose positions hold the last
/// `width` placed tiles, the next column, and the player to move, then
/// computes the forced-win set backwards. Unbounded play and stuck players
/// favor Player 2.
GameVerdict solve_game(const TpctInstance& inst, size_t max_positions = 1000000);

struct TpctQueries {
    AlphabetPtr alphabet;  // tiles x {1,2,bot,bang}, rendered "d|1" etc.
    DatalogQuery q1, q2;   // Boolean, over child/root/leaf
};

/// The pair of queries whose non-containment encodes a Player 1 win:
/// q1 accepts trees whose root starts a well-formed strategy skeleton,
/// q2 accepts trees whose skeleton violates alternation, the winning-row
/// condition, or a tile constraint.
TpctQueries build_queries(const TpctInstance& inst);

/// Same pair pushed through the root/leaf elimination (child-only schema).
TpctQueries eliminate_root_leaf_pair(const TpctInstance& inst);

/// True when the game solver and the containment pipeline agree
/// (Player 1 wins iff q1 is not contained in q2).
bool cross_check(const TpctInstance& inst, const ContainmentOptions& opts = {});

// -- independent structural checks (test support) ----------------------------

/// Recomputes the candidate/relevant marking by direct recursion.
std::vector<bool> relevant_nodes(const LabeledTree& t, const TpctInstance& inst);

/// Evaluates the nine structural conditions of an encoded strategy on the
/// relevant subtree; index c-1 holds condition (c).
std::array<bool, 9> check_conditions(const LabeledTree& t, const TpctInstance& inst);

}  // namespace mdlc

#endif
