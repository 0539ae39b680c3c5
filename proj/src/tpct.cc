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

#include "mdlc/tpct.hh"

#include <algorithm>
#include <deque>
#include <sstream>

namespace mdlc {

int TpctInstance::tile_index(const std::string& name) const {
    for (size_t i = 0; i < tiles.size(); ++i)
        if (tiles[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {
const char* kTurnNames[] = {"1", "2", "bot", "bang"};

std::string tile_label(const TpctInstance& inst, int tile, int turn) {
    return inst.tiles[tile] + "|" + kTurnNames[turn];
}
}  // namespace

TpctInstance parse_tpct(const std::string& text) {
    TpctInstance inst;
    std::istringstream in(text);
    std::string line;
    auto tile_of = [&](const std::string& name) {
        int t = inst.tile_index(name);
        if (t < 0) throw validation_error("unknown tile '" + name + "'");
        return t;
    };
    auto parse_pairs = [&](const std::string& rest, std::set<std::pair<int, int>>& out) {
        std::istringstream rs(rest);
        std::string chunk;
        while (std::getline(rs, chunk, ',')) {
            auto toks = split_ws(chunk);
            if (toks.empty()) continue;
            if (toks.size() != 2) throw validation_error("expected a tile pair, got '" + chunk + "'");
            out.insert({tile_of(toks[0]), tile_of(toks[1])});
        }
    };
    auto parse_row = [&](const std::string& rest) {
        std::vector<int> row;
        for (const auto& tok : split_ws(rest)) row.push_back(tile_of(tok));
        return row;
    };
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = line.substr(0, colon);
        std::string rest = line.substr(colon + 1);
        key.erase(std::remove_if(key.begin(), key.end(), [](char c) { return c == ' '; }),
                  key.end());
        if (key == "tiles") {
            for (const auto& tok : split_ws(rest)) {
                if (inst.tile_index(tok) >= 0) throw validation_error("duplicate tile " + tok);
                if (tok.find('|') != std::string::npos)
                    throw validation_error("tile names may not contain '|'");
                inst.tiles.push_back(tok);
            }
        } else if (key == "H") {
            parse_pairs(rest, inst.horizontal);
        } else if (key == "V") {
            parse_pairs(rest, inst.vertical);
        } else if (key == "n") {
            inst.width = std::stoi(rest);
        } else if (key == "f") {
            inst.first_row = parse_row(rest);
        } else if (key == "l") {
            inst.last_row = parse_row(rest);
        } else {
            throw validation_error("unknown key '" + key + "' in instance");
        }
    }
    if (inst.tiles.empty()) throw validation_error("instance needs tiles");
    if (inst.width < 2) throw validation_error("width must be at least 2");
    if (static_cast<int>(inst.first_row.size()) != inst.width ||
        static_cast<int>(inst.last_row.size()) != inst.width)
        throw validation_error("first/last row must have exactly `n` tiles");
    return inst;
}

std::string tpct_to_text(const TpctInstance& inst) {
    std::ostringstream out;
    out << "tiles:";
    for (const auto& t : inst.tiles) out << " " << t;
    out << "\nH:";
    bool first = true;
    for (auto [a, b] : inst.horizontal) {
        out << (first ? " " : ", ") << inst.tiles[a] << " " << inst.tiles[b];
        first = false;
    }
    out << "\nV:";
    first = true;
    for (auto [a, b] : inst.vertical) {
        out << (first ? " " : ", ") << inst.tiles[a] << " " << inst.tiles[b];
        first = false;
    }
    out << "\nn: " << inst.width << "\nf:";
    for (int t : inst.first_row) out << " " << inst.tiles[t];
    out << "\nl:";
    for (int t : inst.last_row) out << " " << inst.tiles[t];
    out << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Exact game solving.

namespace {
struct Position {
    std::vector<int> window;  // last n tiles, window[0] directly above the next cell
    int col;                  // 0-based column of the next tile
    int player;               // 0 = Player 1, 1 = Player 2

    bool operator<(const Position& o) const {
        return std::tie(window, col, player) < std::tie(o.window, o.col, o.player);
    }
    std::string text(const TpctInstance& inst) const {
        std::string s;
        for (int t : window) s += inst.tiles[t] + " ";
        s += "| col " + std::to_string(col + 1) + " | P" + std::to_string(player + 1);
        return s;
    }
};
}  // namespace

GameVerdict solve_game(const TpctInstance& inst, size_t max_positions) {
    int n = inst.width;
    int m = static_cast<int>(inst.tiles.size());
    Position init{inst.first_row, 0, 0};
    std::map<Position, int> ids;
    std::vector<Position> pos;
    std::deque<int> work;
    auto intern = [&](const Position& p) {
        auto it = ids.find(p);
        if (it != ids.end()) return it->second;
        if (pos.size() >= max_positions)
            throw cap_error("game arena exceeded " + std::to_string(max_positions) +
                            " positions");
        int id = static_cast<int>(pos.size());
        ids.emplace(p, id);
        pos.push_back(p);
        work.push_back(id);
        return id;
    };
    intern(init);
    // moves[p] = (tile, successor id or -1 for an immediate win)
    std::vector<std::vector<std::pair<int, int>>> moves;
    while (!work.empty()) {
        int id = work.front();
        work.pop_front();
        if (static_cast<int>(moves.size()) <= id) moves.resize(id + 1);
        const Position p = pos[id];
        for (int d = 0; d < m; ++d) {
            if (!inst.vertical.count({p.window[0], d})) continue;
            if (p.col > 0 && !inst.horizontal.count({p.window[n - 1], d})) continue;
            std::vector<int> w(p.window.begin() + 1, p.window.end());
            w.push_back(d);
            if (p.col == n - 1 && w == inst.last_row) {
                moves[id].push_back({d, -1});
                continue;
            }
            Position nxt{std::move(w), (p.col + 1) % n, 1 - p.player};
            moves[id].push_back({d, intern(nxt)});
        }
        if (static_cast<int>(moves.size()) <= id) moves.resize(id + 1);
    }
    moves.resize(pos.size());

    // forced-win set for Player 1; infinite play and stuck players favor
    // Player 2, which the least fixpoint gives for free
    std::vector<char> win(pos.size(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < pos.size(); ++i) {
            if (win[i]) continue;
            bool w;
            if (pos[i].player == 0) {
                w = false;
                for (auto [d, nxt] : moves[i])
                    if (nxt == -1 || win[nxt]) w = true;
            } else {
                w = !moves[i].empty();
                for (auto [d, nxt] : moves[i])
                    if (nxt != -1 && !win[nxt]) w = false;
            }
            if (w) {
                win[i] = 1;
                changed = true;
            }
        }
    }

    GameVerdict v;
    v.positions = pos.size();
    v.winner = win[0] ? Player::One : Player::Two;
    if (v.winner == Player::One) {
        for (size_t i = 0; i < pos.size(); ++i) {
            if (pos[i].player != 0 || !win[i]) continue;
            for (auto [d, nxt] : moves[i])
                if (nxt == -1 || win[nxt]) {
                    v.strategy[pos[i].text(inst)] = inst.tiles[d];
                    break;
                }
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Queries encoding strategies for Player 1.

namespace {

Atom at(const std::string& pred, std::initializer_list<std::string> vars) {
    return Atom{pred, std::vector<std::string>(vars)};
}

/// Drops rules whose bodies mention predicates that have no rules at all
/// (and are not built-ins); such predicates never hold, so the rule never
/// fires. Iterates to a fixpoint.
void drop_ruleless(DatalogProgram& p) {
    bool changed = true;
    while (changed) {
        changed = false;
        auto heads = p.idb();
        std::vector<Rule> keep;
        for (const auto& r : p.rules) {
            bool ok = true;
            for (const auto& a : r.body)
                if (!is_builtin_predicate(a.pred) && !heads.count(a.pred)) ok = false;
            if (ok) keep.push_back(r);
            else changed = true;
        }
        p.rules = std::move(keep);
    }
}

/// Shared rule base: label projections and the candidate/relevant marking.
DatalogProgram strategy_base(const TpctInstance& inst) {
    DatalogProgram p;
    int m = static_cast<int>(inst.tiles.size());
    for (int d = 0; d < m; ++d)
        for (int i = 0; i < 4; ++i) {
            std::string lab = "label_" + tile_label(inst, d, i);
            p.rules.push_back({at("tile_" + inst.tiles[d], {"x"}), {at(lab, {"x"})}});
            p.rules.push_back({at(std::string("turn_") + kTurnNames[i], {"x"}), {at(lab, {"x"})}});
        }
    for (int d = 0; d < m; ++d)
        for (int d2 = 0; d2 < m; ++d2)
            if (d2 != d)
                p.rules.push_back({at("tile_not_" + inst.tiles[d], {"x"}),
                                   {at("tile_" + inst.tiles[d2], {"x"})}});
    for (int i = 0; i < 4; ++i)
        for (int i2 = 0; i2 < 4; ++i2)
            if (i2 != i)
                p.rules.push_back({at(std::string("turn_not_") + kTurnNames[i], {"x"}),
                                   {at(std::string("turn_") + kTurnNames[i2], {"x"})}});
    p.rules.push_back({at("candidate", {"x"}), {at("leaf", {"x"}), at("turn_bot", {"x"})}});
    p.rules.push_back({at("candidate", {"x"}), {at("leaf", {"x"}), at("turn_bang", {"x"})}});
    p.rules.push_back({at("candidate", {"x"}),
                       {at("turn_1", {"x"}), at("child", {"x", "y"}), at("candidate", {"y"}),
                        at("turn_not_bot", {"y"})}});
    {
        // a node where Player 2 moves needs a candidate child per tile type
        // plus some candidate child the game continues from
        Rule r;
        r.head = at("candidate", {"x"});
        r.body.push_back(at("turn_2", {"x"}));
        for (int d = 0; d < m; ++d) {
            std::string y = "y" + std::to_string(d);
            r.body.push_back(at("child", {"x", y}));
            r.body.push_back(at("candidate", {y}));
            r.body.push_back(at("tile_" + inst.tiles[d], {y}));
        }
        r.body.push_back(at("child", {"x", "y"}));
        r.body.push_back(at("candidate", {"y"}));
        r.body.push_back(at("turn_not_bot", {"y"}));
        p.rules.push_back(std::move(r));
    }
    p.rules.push_back({at("relevant", {"x"}),
                       {at("root", {"x"}), at("candidate", {"x"}), at("turn_2", {"x"})}});
    p.rules.push_back({at("relevant", {"x"}),
                       {at("candidate", {"x"}), at("child", {"y", "x"}), at("relevant", {"y"})}});
    return p;
}

std::vector<std::string> child_chain(Rule& r, const std::string& from, int steps,
                                     const std::string& prefix) {
    // appends child(x_i, x_{i+1}) atoms and returns the chain variables
    std::vector<std::string> vars = {from};
    for (int i = 1; i <= steps; ++i) {
        vars.push_back(prefix + std::to_string(i + 1));
        r.body.push_back(at("child", {vars[i - 1], vars[i]}));
    }
    return vars;
}

}  // namespace

TpctQueries build_queries(const TpctInstance& inst) {
    int n = inst.width;
    int m = static_cast<int>(inst.tiles.size());
    std::vector<std::string> symbols;
    for (int d = 0; d < m; ++d)
        for (int i = 0; i < 4; ++i) symbols.push_back(tile_label(inst, d, i));
    AlphabetPtr sigma = make_alphabet(symbols);

    TpctQueries out;
    out.alphabet = sigma;

    out.q1.program = strategy_base(inst);
    out.q1.program.rules.push_back(
        {at("accept", {"x"}), {at("root", {"x"}), at("relevant", {"x"})}});
    out.q1.query_pred = "accept";
    out.q1.mode = QueryMode::Boolean;
    out.q1.schema = SchemaKind::TauURootLeaf;
    out.q1.alphabet = sigma;

    DatalogProgram p2 = strategy_base(inst);
    // alternation violations
    for (const char* turn : {"1", "2"})
        p2.rules.push_back({at("reject6", {"z"}),
                            {at("relevant", {"x"}), at("relevant", {"y"}),
                             at("child", {"x", "y"}), at(std::string("turn_") + turn, {"x"}),
                             at(std::string("turn_") + turn, {"y"}), at("root", {"z"})}});
    // column bookkeeping along relevant paths
    p2.rules.push_back({at("column_1", {"x"}), {at("root", {"x"}), at("relevant", {"x"})}});
    p2.rules.push_back({at("column_1", {"x"}),
                        {at("child", {"y", "x"}), at("column_" + std::to_string(n), {"y"}),
                         at("relevant", {"y"}), at("relevant", {"x"})}});
    for (int j = 2; j <= n; ++j)
        p2.rules.push_back({at("column_" + std::to_string(j), {"x"}),
                            {at("child", {"y", "x"}), at("column_" + std::to_string(j - 1), {"y"}),
                             at("relevant", {"y"}), at("relevant", {"x"})}});
    for (int j = 1; j <= n - 1; ++j)
        p2.rules.push_back(
            {at("column_not_n", {"x"}), {at("column_" + std::to_string(j), {"x"})}});
    for (int j = 2; j <= n; ++j)
        p2.rules.push_back(
            {at("column_not_1", {"x"}), {at("column_" + std::to_string(j), {"x"})}});
    // a winning marker must close a full row spelled like the last row
    p2.rules.push_back({at("reject7", {"z"}),
                        {at("turn_bang", {"x"}), at("column_not_n", {"x"}),
                         at("relevant", {"x"}), at("root", {"z"})}});
    for (int j = 1; j <= n; ++j) {
        if (m < 2) break;  // with one tile type no label can differ
        Rule r;
        r.head = at("reject7", {"z"});
        auto vars = child_chain(r, "x1", n - 1, "x");
        r.body.push_back(at("turn_bang", {vars[n - 1]}));
        r.body.push_back(at("tile_not_" + inst.tiles[inst.last_row[j - 1]], {vars[j - 1]}));
        for (const auto& v : vars) r.body.push_back(at("relevant", {v}));
        r.body.push_back(at("root", {"z"}));
        p2.rules.push_back(std::move(r));
    }
    // horizontal/vertical violations
    for (int dh = 0; dh < m; ++dh)
        for (int d = 0; d < m; ++d) {
            if (inst.horizontal.count({dh, d})) continue;
            p2.rules.push_back({at("buggy_h", {"x"}),
                                {at("column_not_1", {"x"}), at("child", {"y", "x"}),
                                 at("tile_" + inst.tiles[dh], {"y"}),
                                 at("tile_" + inst.tiles[d], {"x"}), at("relevant", {"y"}),
                                 at("relevant", {"x"})}});
        }
    for (int dv = 0; dv < m; ++dv)
        for (int d = 0; d < m; ++d) {
            if (inst.vertical.count({dv, d})) continue;
            Rule r;
            r.head = at("buggy_v", {"x"});
            auto vars = child_chain(r, "y1", n - 1, "y");
            r.body.push_back(at("child", {vars[n - 1], "x"}));
            r.body.push_back(at("tile_" + inst.tiles[dv], {vars[0]}));
            r.body.push_back(at("tile_" + inst.tiles[d], {"x"}));
            for (const auto& v : vars) r.body.push_back(at("relevant", {v}));
            r.body.push_back(at("relevant", {"x"}));
            p2.rules.push_back(std::move(r));
        }
    for (int j = 1; j <= n; ++j)
        for (int d = 0; d < m; ++d) {
            if (inst.vertical.count({inst.first_row[j - 1], d})) continue;
            Rule r;
            r.head = at("buggy_v", {"x" + std::to_string(j)});
            Rule tmp;
            auto vars = child_chain(tmp, "x1", n - 1, "x");
            r.body.push_back(at("root", {"x1"}));
            for (const auto& a : tmp.body) r.body.push_back(a);
            r.body.push_back(at("tile_" + inst.tiles[d], {vars[j - 1]}));
            for (const auto& v : vars) r.body.push_back(at("relevant", {v}));
            p2.rules.push_back(std::move(r));
        }
    for (const char* buggy : {"buggy_h", "buggy_v"})
        p2.rules.push_back({at("reject8", {"z"}),
                            {at("turn_not_bot", {"x"}), at(buggy, {"x"}), at("relevant", {"x"}),
                             at("root", {"z"})}});
    // a given-up marker whose tile actually fits
    for (int dh = 0; dh < m; ++dh)
        for (int d = 0; d < m; ++d) {
            if (!inst.horizontal.count({dh, d})) continue;
            p2.rules.push_back({at("okay_h", {"x"}),
                                {at("column_not_1", {"x"}), at("child", {"y", "x"}),
                                 at("tile_" + inst.tiles[dh], {"y"}),
                                 at("tile_" + inst.tiles[d], {"x"})}});
        }
    p2.rules.push_back({at("okay_h", {"x"}), {at("column_1", {"x"})}});
    for (int dv = 0; dv < m; ++dv)
        for (int d = 0; d < m; ++d) {
            if (!inst.vertical.count({dv, d})) continue;
            Rule r;
            r.head = at("okay_v", {"x"});
            auto vars = child_chain(r, "y1", n - 1, "y");
            r.body.push_back(at("child", {vars[n - 1], "x"}));
            r.body.push_back(at("tile_" + inst.tiles[dv], {vars[0]}));
            r.body.push_back(at("tile_" + inst.tiles[d], {"x"}));
            p2.rules.push_back(std::move(r));
        }
    for (int j = 1; j <= n; ++j)
        for (int d = 0; d < m; ++d) {
            if (!inst.vertical.count({inst.first_row[j - 1], d})) continue;
            Rule r;
            r.head = at("okay_v", {"x" + std::to_string(j)});
            Rule tmp;
            auto vars = child_chain(tmp, "x1", n - 1, "x");
            r.body.push_back(at("root", {"x1"}));
            for (const auto& a : tmp.body) r.body.push_back(a);
            r.body.push_back(at("tile_" + inst.tiles[d], {vars[j - 1]}));
            p2.rules.push_back(std::move(r));
        }
    p2.rules.push_back({at("reject9", {"z"}),
                        {at("turn_bot", {"x"}), at("okay_h", {"x"}), at("okay_v", {"x"}),
                         at("relevant", {"x"}), at("root", {"z"})}});
    for (int c = 6; c <= 9; ++c)
        p2.rules.push_back(
            {at("reject", {"z"}), {at("reject" + std::to_string(c), {"z"})}});
    drop_ruleless(p2);
    if (!p2.idb().count("reject")) {
        Atom self = at("reject", {"x"});
        p2.rules.push_back({self, {self, self}});
    }

    out.q2.program = std::move(p2);
    out.q2.query_pred = "reject";
    out.q2.mode = QueryMode::Boolean;
    out.q2.schema = SchemaKind::TauURootLeaf;
    out.q2.alphabet = sigma;
    validate_query(out.q1);
    validate_query(out.q2);
    return out;
}

TpctQueries eliminate_root_leaf_pair(const TpctInstance& inst) {
    TpctQueries base = build_queries(inst);
    auto [r1, r2] = eliminate_root_leaf(base.q1, base.q2);
    TpctQueries out;
    out.alphabet = r1.query.alphabet;
    out.q1 = std::move(r1.query);
    out.q2 = std::move(r2.query);
    return out;
}

bool cross_check(const TpctInstance& inst, const ContainmentOptions& opts) {
    GameVerdict game = solve_game(inst);
    TpctQueries qs = build_queries(inst);
    ContainmentVerdict cv = decide_containment(qs.q1, qs.q2, SchemaKind::TauURootLeaf, opts);
    bool player1_wins = game.winner == Player::One;
    return player1_wins == !cv.contained;
}

// ---------------------------------------------------------------------------
// Independent structural checks.

namespace {
struct NodeView {
    int tile;
    int turn;  // 0..3 per kTurnNames
};

std::vector<NodeView> decode_labels(const LabeledTree& t, const TpctInstance& inst) {
    std::vector<NodeView> out(t.size());
    for (int v = 0; v < t.size(); ++v) {
        const std::string& name = t.label_name(v);
        auto bar = name.rfind('|');
        if (bar == std::string::npos) throw validation_error("not a strategy label: " + name);
        int tile = inst.tile_index(name.substr(0, bar));
        std::string turn = name.substr(bar + 1);
        int ti = -1;
        for (int i = 0; i < 4; ++i)
            if (turn == kTurnNames[i]) ti = i;
        if (tile < 0 || ti < 0) throw validation_error("not a strategy label: " + name);
        out[v] = {tile, ti};
    }
    return out;
}
}  // namespace

std::vector<bool> relevant_nodes(const LabeledTree& t, const TpctInstance& inst) {
    auto view = decode_labels(t, inst);
    int m = static_cast<int>(inst.tiles.size());
    std::vector<bool> candidate(t.size(), false);
    for (int v = t.size() - 1; v >= 0; --v) {  // children have larger preorder ids
        if (t.is_leaf(v)) {
            candidate[v] = view[v].turn == 2 || view[v].turn == 3;
            continue;
        }
        if (view[v].turn == 0) {
            for (int c : t.children[v])
                if (candidate[c] && view[c].turn != 2) candidate[v] = true;
        } else if (view[v].turn == 1) {
            bool all_tiles = true;
            for (int d = 0; d < m; ++d) {
                bool found = false;
                for (int c : t.children[v])
                    if (candidate[c] && view[c].tile == d) found = true;
                all_tiles = all_tiles && found;
            }
            bool continuing = false;
            for (int c : t.children[v])
                if (candidate[c] && view[c].turn != 2) continuing = true;
            candidate[v] = all_tiles && continuing;
        }
    }
    std::vector<bool> relevant(t.size(), false);
    relevant[0] = candidate[0] && view[0].turn == 1;  // Player 2 to move next
    for (int v = 1; v < t.size(); ++v)
        relevant[v] = candidate[v] && relevant[t.parent[v]];
    return relevant;
}

std::array<bool, 9> check_conditions(const LabeledTree& t, const TpctInstance& inst) {
    auto view = decode_labels(t, inst);
    auto rel = relevant_nodes(t, inst);
    int n = inst.width;
    int m = static_cast<int>(inst.tiles.size());
    std::array<bool, 9> ok;
    ok.fill(true);
    auto rel_children = [&](int v) {
        std::vector<int> out;
        for (int c : t.children[v])
            if (rel[c]) out.push_back(c);
        return out;
    };
    if (!rel[0]) {
        ok.fill(false);
        return ok;
    }
    ok[0] = view[0].turn == 1;  // root: Player 2 moves next
    for (int v = 0; v < t.size(); ++v) {
        if (!rel[v]) continue;
        auto kids = rel_children(v);
        int turn = view[v].turn;
        if ((turn == 2 || turn == 3) && !kids.empty()) ok[1] = false;
        if (turn == 0 && kids.empty()) ok[2] = false;
        if (turn == 1) {
            for (int d = 0; d < m; ++d) {
                bool found = false;
                for (int c : kids)
                    if (view[c].tile == d) found = true;
                if (!found) ok[3] = false;
            }
        }
        if (turn == 0 || turn == 1) {
            bool all_bot = !kids.empty();
            for (int c : kids)
                if (view[c].turn != 2) all_bot = false;
            if (all_bot) ok[4] = false;
        }
        for (int c : kids) {
            int ct = view[c].turn;
            if ((turn == 0 && ct == 0) || (turn == 1 && ct == 1)) ok[5] = false;
        }
        int depth = t.depth(v);
        if (turn == 3) {
            if (depth % n != 0) ok[6] = false;
            else {
                int u = v;
                for (int j = n; j >= 1 && ok[6]; --j) {
                    if (view[u].tile != inst.last_row[j - 1]) ok[6] = false;
                    u = t.parent[u];
                }
            }
        }
        // constraint checks
        bool h_ok = true, v_ok = true;
        int col = ((depth - 1) % n) + 1;
        if (col >= 2) h_ok = inst.horizontal.count({view[t.parent[v]].tile, view[v].tile}) != 0;
        if (depth <= n) {
            v_ok = inst.vertical.count({inst.first_row[depth - 1], view[v].tile}) != 0;
        } else {
            int u = v;
            for (int j = 0; j < n; ++j) u = t.parent[u];
            v_ok = inst.vertical.count({view[u].tile, view[v].tile}) != 0;
        }
        if (turn != 2 && !(h_ok && v_ok)) ok[7] = false;
        if (turn == 2 && h_ok && v_ok) ok[8] = false;
    }
    return ok;
}

}  // namespace mdlc
