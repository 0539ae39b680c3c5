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

#include "mdlc/ata.hh"

#include <algorithm>
#include <set>
#include <sstream>

namespace mdlc {

std::string move_name(Move m) {
    switch (m) {
        case Move::Up: return "Up";
        case Move::Stay: return "Stay";
        case Move::DownLeft: return "DownLeft";
        case Move::DownRight: return "DownRight";
    }
    return "?";
}

AtaFormula AtaFormula::conj(std::vector<AtaFormula> parts) {
    if (parts.size() == 1) return parts[0];
    AtaFormula f;
    f.kind = Kind::And;
    f.parts = std::move(parts);
    return f;
}

AtaFormula AtaFormula::disj(std::vector<AtaFormula> parts) {
    if (parts.size() == 1) return parts[0];
    AtaFormula f;
    f.kind = Kind::Or;
    f.parts = std::move(parts);
    return f;
}

void AtaFormula::collect_atoms(std::vector<std::pair<int, Move>>& out) const {
    if (kind == Kind::Atom) {
        out.emplace_back(state, move);
        return;
    }
    for (const auto& p : parts) p.collect_atoms(out);
}

std::string AtaFormula::to_text(const std::vector<std::string>& names) const {
    switch (kind) {
        case Kind::Atom: return "(" + names[state] + "," + move_name(move) + ")";
        case Kind::And: {
            std::string out;
            for (size_t i = 0; i < parts.size(); ++i) {
                if (i) out += " & ";
                bool paren = parts[i].kind == Kind::Or;
                out += paren ? "(" + parts[i].to_text(names) + ")" : parts[i].to_text(names);
            }
            return out;
        }
        case Kind::Or: {
            std::string out;
            for (size_t i = 0; i < parts.size(); ++i) {
                if (i) out += " | ";
                out += parts[i].to_text(names);
            }
            return out;
        }
    }
    return "?";
}

bool TwoWayAta::is_accepting(int s) const {
    return std::binary_search(accepting.begin(), accepting.end(), s);
}

const AtaFormula* TwoWayAta::formula(int state, int symbol) const {
    auto it = delta.find({state, symbol});
    return it == delta.end() ? nullptr : &it->second;
}

std::vector<int> TwoWayAta::up_states() const {
    std::set<int> ups;
    std::vector<std::pair<int, Move>> atoms;
    for (const auto& [key, f] : delta) {
        atoms.clear();
        f.collect_atoms(atoms);
        for (const auto& [s, m] : atoms)
            if (m == Move::Up) ups.insert(s);
    }
    return {ups.begin(), ups.end()};
}

std::string TwoWayAta::to_text() const {
    std::ostringstream out;
    out << "alphabet:";
    for (const auto& s : alphabet->symbols()) out << " " << s;
    out << "\nstates:";
    for (const auto& s : state_names) out << " " << s;
    out << "\ninitial: " << state_names[initial] << "\naccepting:";
    for (int s : accepting) out << " " << state_names[s];
    out << "\n";
    for (const auto& [key, f] : delta)
        out << state_names[key.first] << " " << alphabet->symbol(key.second) << " : "
            << f.to_text(state_names) << "\n";
    return out.str();
}

namespace {

struct FormulaParser {
    const std::string& s;
    size_t pos = 0;
    const std::map<std::string, int>& state_ids;

    FormulaParser(const std::string& text, const std::map<std::string, int>& ids)
        : s(text), state_ids(ids) {}

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }

    AtaFormula parse_or() {
        AtaFormula left = parse_and();
        skip_ws();
        std::vector<AtaFormula> parts = {left};
        while (pos < s.size() && s[pos] == '|') {
            ++pos;
            parts.push_back(parse_and());
            skip_ws();
        }
        return AtaFormula::disj(std::move(parts));
    }

    AtaFormula parse_and() {
        AtaFormula left = parse_primary();
        skip_ws();
        std::vector<AtaFormula> parts = {left};
        while (pos < s.size() && s[pos] == '&') {
            ++pos;
            parts.push_back(parse_primary());
            skip_ws();
        }
        return AtaFormula::conj(std::move(parts));
    }

    AtaFormula parse_primary() {
        skip_ws();
        if (pos >= s.size() || s[pos] != '(') throw parse_error("expected '('", pos);
        // try an atom "(name,Move)"; fall back to a parenthesized formula
        size_t save = pos;
        ++pos;
        size_t comma = std::string::npos;
        int depth = 1;
        for (size_t i = pos; i < s.size() && depth > 0; ++i) {
            if (s[i] == '(') ++depth;
            if (s[i] == ')') --depth;
            if (s[i] == ',' && depth == 1) {
                comma = i;
                break;
            }
        }
        if (comma != std::string::npos) {
            std::string name = s.substr(pos, comma - pos);
            size_t close = s.find(')', comma);
            if (close != std::string::npos) {
                std::string mv = s.substr(comma + 1, close - comma - 1);
                auto trim = [](std::string x) {
                    while (!x.empty() && x.front() == ' ') x.erase(x.begin());
                    while (!x.empty() && x.back() == ' ') x.pop_back();
                    return x;
                };
                name = trim(name);
                mv = trim(mv);
                Move move;
                bool is_move = true;
                if (mv == "Up") move = Move::Up;
                else if (mv == "Stay") move = Move::Stay;
                else if (mv == "DownLeft") move = Move::DownLeft;
                else if (mv == "DownRight") move = Move::DownRight;
                else is_move = false;
                if (is_move && state_ids.count(name)) {
                    pos = close + 1;
                    return AtaFormula::atom(state_ids.at(name), move);
                }
            }
        }
        pos = save + 1;
        AtaFormula f = parse_or();
        skip_ws();
        if (pos >= s.size() || s[pos] != ')') throw parse_error("expected ')'", pos);
        ++pos;
        return f;
    }
};

}  // namespace

TwoWayAta parse_ata(const std::string& text) {
    TwoWayAta a;
    std::map<std::string, int> state_ids;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "alphabet:") {
            std::vector<std::string> symbols;
            std::string tok;
            while (ls >> tok) symbols.push_back(tok);
            a.alphabet = make_alphabet(symbols);
        } else if (first == "states:") {
            std::string tok;
            while (ls >> tok) {
                state_ids.emplace(tok, static_cast<int>(a.state_names.size()));
                a.state_names.push_back(tok);
            }
        } else if (first == "initial:") {
            std::string tok;
            ls >> tok;
            if (!state_ids.count(tok)) throw validation_error("unknown initial state " + tok);
            a.initial = state_ids[tok];
        } else if (first == "accepting:") {
            std::string tok;
            while (ls >> tok) {
                if (!state_ids.count(tok)) throw validation_error("unknown accepting state " + tok);
                a.accepting.push_back(state_ids[tok]);
            }
            std::sort(a.accepting.begin(), a.accepting.end());
        } else {
            std::string sym, colon;
            if (!(ls >> sym >> colon) || colon != ":")
                throw validation_error("bad transition line: " + line);
            if (!a.alphabet) throw validation_error("alphabet line must come first");
            if (!state_ids.count(first)) throw validation_error("unknown state " + first);
            int si = a.alphabet->index_of(sym);
            if (si < 0) throw validation_error("unknown symbol '" + sym + "'");
            std::string rest;
            std::getline(ls, rest);
            FormulaParser fp(rest, state_ids);
            AtaFormula f = fp.parse_or();
            a.delta.emplace(std::make_pair(state_ids[first], si), std::move(f));
        }
    }
    return a;
}

bool ata_accepts(const TwoWayAta& a, const BinaryTree& t) {
    if (!(*a.alphabet == *t.alphabet))
        throw validation_error("automaton and tree alphabets differ");
    int n = t.size();
    int k = a.num_states();
    // win[s * n + v]; off-tree targets resolve to acceptance directly
    std::vector<char> win(static_cast<size_t>(n) * k, 0);
    auto resolve = [&](int v, Move m) {
        switch (m) {
            case Move::Stay: return v;
            case Move::Up: return t.parent[v];
            case Move::DownLeft: return t.left[v];
            case Move::DownRight: return t.right[v];
        }
        return -1;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < k; ++s) {
            if (a.is_accepting(s)) {
                for (int v = 0; v < n; ++v) win[static_cast<size_t>(s) * n + v] = 1;
                continue;
            }
            for (int v = 0; v < n; ++v) {
                if (win[static_cast<size_t>(s) * n + v]) continue;
                const AtaFormula* f = a.formula(s, t.label[v]);
                if (!f) continue;
                bool ok = f->eval([&](int s2, Move m) {
                    int u = resolve(v, m);
                    if (u < 0) return a.is_accepting(s2);
                    return win[static_cast<size_t>(s2) * n + u] != 0;
                });
                if (ok) {
                    win[static_cast<size_t>(s) * n + v] = 1;
                    changed = true;
                }
            }
        }
    }
    return win[static_cast<size_t>(a.initial) * n + t.root()] != 0;
}

}  // namespace mdlc
