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

#include "mdlc/nbta.hh"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace mdlc {

void Nbta::add_transition(int l, int r, int sym, int target) {
    auto& v = transitions[{l, r, sym}];
    auto it = std::lower_bound(v.begin(), v.end(), target);
    if (it == v.end() || *it != target) v.insert(it, target);
}

bool Nbta::is_accepting(int s) const {
    return std::binary_search(accepting.begin(), accepting.end(), s);
}

size_t Nbta::transition_count() const {
    size_t n = 0;
    for (const auto& [k, v] : transitions) n += v.size();
    return n;
}

std::string Nbta::to_text() const {
    std::ostringstream out;
    out << "alphabet:";
    for (const auto& s : alphabet->symbols()) out << " " << s;
    out << "\nstates: " << num_states << "\naccepting:";
    for (int s : accepting) out << " s" << s;
    out << "\n";
    std::map<std::tuple<int, int, int>, std::vector<int>> sorted;
    for (const auto& [k, v] : transitions) sorted[{k.sym, k.l, k.r}] = v;
    auto name = [](int s) { return s == Nbta::kPad ? std::string("#") : "s" + std::to_string(s); };
    for (const auto& [k, targets] : sorted) {
        auto [sym, l, r] = k;
        for (int t : targets)
            out << name(l) << " " << name(r) << " " << alphabet->symbol(sym) << " -> s" << t
                << "\n";
    }
    return out.str();
}

Nbta parse_nbta(const std::string& text) {
    Nbta a;
    std::istringstream in(text);
    std::string line;
    auto state_of = [&](const std::string& tok) {
        if (tok == "#") return Nbta::kPad;
        if (tok.size() < 2 || tok[0] != 's') throw validation_error("bad state token '" + tok + "'");
        return std::stoi(tok.substr(1));
    };
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        // '#' is also the padding token; only strip comments at line start
        if (line.rfind("##", 0) == 0 || line.empty()) continue;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "alphabet:") {
            std::vector<std::string> symbols;
            std::string tok;
            while (ls >> tok) symbols.push_back(tok);
            a.alphabet = make_alphabet(symbols);
        } else if (first == "states:") {
            ls >> a.num_states;
        } else if (first == "accepting:") {
            std::string tok;
            while (ls >> tok) a.accepting.push_back(state_of(tok));
            std::sort(a.accepting.begin(), a.accepting.end());
        } else {
            std::string rtok, sym, arrow, ttok;
            if (!(ls >> rtok >> sym >> arrow >> ttok) || arrow != "->")
                throw validation_error("bad transition line: " + line);
            if (!a.alphabet) throw validation_error("alphabet line must come first");
            int si = a.alphabet->index_of(sym);
            if (si < 0) throw validation_error("unknown symbol '" + sym + "'");
            a.add_transition(state_of(first), state_of(rtok), si, state_of(ttok));
        }
        (void)hash;
    }
    for (int s : a.accepting)
        if (s < 0 || s >= a.num_states) throw validation_error("accepting state out of range");
    for (const auto& [k, v] : a.transitions) {
        auto ok = [&](int s) { return s == Nbta::kPad || (s >= 0 && s < a.num_states); };
        if (!ok(k.l) || !ok(k.r)) throw validation_error("transition state out of range");
        for (int t : v)
            if (t < 0 || t >= a.num_states) throw validation_error("target state out of range");
    }
    return a;
}

namespace {
std::vector<char> run_sets(const Nbta& a, const BinaryTree& t, std::vector<char>& node_states) {
    // node_states is a size() x num_states bitmap filled bottom-up
    node_states.assign(static_cast<size_t>(t.size()) * a.num_states, 0);
    // preorder ids: children have larger ids, so iterate backwards
    for (int v = t.size() - 1; v >= 0; --v) {
        auto consider = [&](int l, int r) {
            auto it = a.transitions.find({l, r, t.label[v]});
            if (it == a.transitions.end()) return;
            for (int s : it->second) node_states[static_cast<size_t>(v) * a.num_states + s] = 1;
        };
        int lc = t.left[v], rc = t.right[v];
        if (lc == -1 && rc == -1) {
            consider(Nbta::kPad, Nbta::kPad);
        } else if (lc != -1 && rc == -1) {
            for (int s = 0; s < a.num_states; ++s)
                if (node_states[static_cast<size_t>(lc) * a.num_states + s]) consider(s, Nbta::kPad);
        } else if (lc == -1 && rc != -1) {
            for (int s = 0; s < a.num_states; ++s)
                if (node_states[static_cast<size_t>(rc) * a.num_states + s]) consider(Nbta::kPad, s);
        } else {
            for (int s1 = 0; s1 < a.num_states; ++s1) {
                if (!node_states[static_cast<size_t>(lc) * a.num_states + s1]) continue;
                for (int s2 = 0; s2 < a.num_states; ++s2)
                    if (node_states[static_cast<size_t>(rc) * a.num_states + s2]) consider(s1, s2);
            }
        }
    }
    std::vector<char> root(node_states.begin(), node_states.begin() + a.num_states);
    return root;
}
}  // namespace

bool accepts(const Nbta& a, const BinaryTree& t) {
    if (!(*a.alphabet == *t.alphabet))
        throw validation_error("automaton and tree alphabets differ");
    std::vector<char> tmp;
    auto root = run_sets(a, t, tmp);
    for (int s : a.accepting)
        if (root[s]) return true;
    return false;
}

std::vector<int> root_states(const Nbta& a, const BinaryTree& t) {
    std::vector<char> tmp;
    auto root = run_sets(a, t, tmp);
    std::vector<int> out;
    for (int s = 0; s < a.num_states; ++s)
        if (root[s]) out.push_back(s);
    return out;
}

Nbta union_nbta(const Nbta& a1, const Nbta& a2) {
    if (!(*a1.alphabet == *a2.alphabet)) throw validation_error("alphabet mismatch in union");
    Nbta out;
    out.alphabet = a1.alphabet;
    out.num_states = a1.num_states + a2.num_states;
    out.transitions = a1.transitions;
    int off = a1.num_states;
    auto shift = [&](int s) { return s == Nbta::kPad ? s : s + off; };
    for (const auto& [k, v] : a2.transitions)
        for (int t : v) out.add_transition(shift(k.l), shift(k.r), k.sym, t + off);
    out.accepting = a1.accepting;
    for (int s : a2.accepting) out.accepting.push_back(s + off);
    std::sort(out.accepting.begin(), out.accepting.end());
    return out;
}

Nbta intersect_nbta(const Nbta& a1, const Nbta& a2) {
    if (!(*a1.alphabet == *a2.alphabet)) throw validation_error("alphabet mismatch in intersection");
    Nbta out;
    out.alphabet = a1.alphabet;
    out.num_states = a1.num_states * a2.num_states;
    auto pair_id = [&](int s1, int s2) { return s1 * a2.num_states + s2; };
    // group a2 transitions by (sym, #-pattern) for the join
    std::unordered_map<Nbta::Key, std::vector<std::pair<Nbta::Key, int>>, Nbta::KeyHash> by_shape;
    for (const auto& [k, v] : a2.transitions) {
        Nbta::Key shape{k.l == Nbta::kPad ? Nbta::kPad : 0, k.r == Nbta::kPad ? Nbta::kPad : 0,
                        k.sym};
        for (int t : v) by_shape[shape].push_back({k, t});
    }
    for (const auto& [k1, v1] : a1.transitions) {
        Nbta::Key shape{k1.l == Nbta::kPad ? Nbta::kPad : 0, k1.r == Nbta::kPad ? Nbta::kPad : 0,
                        k1.sym};
        auto it = by_shape.find(shape);
        if (it == by_shape.end()) continue;
        for (const auto& [k2, t2] : it->second)
            for (int t1 : v1) {
                int l = k1.l == Nbta::kPad ? Nbta::kPad : pair_id(k1.l, k2.l);
                int r = k1.r == Nbta::kPad ? Nbta::kPad : pair_id(k1.r, k2.r);
                out.add_transition(l, r, k1.sym, pair_id(t1, t2));
            }
    }
    for (int s1 : a1.accepting)
        for (int s2 : a2.accepting) out.accepting.push_back(pair_id(s1, s2));
    std::sort(out.accepting.begin(), out.accepting.end());
    return out;
}

namespace {
// Deterministic successor of subset states (bitmask encoding).
uint64_t det_step(const Nbta& a, uint64_t lmask, uint64_t rmask, int sym, bool lpad, bool rpad) {
    uint64_t out = 0;
    auto consider = [&](int l, int r) {
        auto it = a.transitions.find({l, r, sym});
        if (it == a.transitions.end()) return;
        for (int t : it->second) out |= 1ULL << t;
    };
    if (lpad && rpad) {
        consider(Nbta::kPad, Nbta::kPad);
    } else if (!lpad && rpad) {
        for (int s = 0; s < a.num_states; ++s)
            if (lmask & (1ULL << s)) consider(s, Nbta::kPad);
    } else if (lpad && !rpad) {
        for (int s = 0; s < a.num_states; ++s)
            if (rmask & (1ULL << s)) consider(Nbta::kPad, s);
    } else {
        for (int s1 = 0; s1 < a.num_states; ++s1) {
            if (!(lmask & (1ULL << s1))) continue;
            for (int s2 = 0; s2 < a.num_states; ++s2)
                if (rmask & (1ULL << s2)) consider(s1, s2);
        }
    }
    return out;
}
}  // namespace

Nbta complement_nbta(const Nbta& a, int max_states_exp) {
    if (a.num_states > max_states_exp)
        throw cap_error("complement of a " + std::to_string(a.num_states) +
                        "-state automaton exceeds the exact-mode cap (2^" +
                        std::to_string(max_states_exp) + " states); use the reachable variant");
    int k = a.num_states;
    uint64_t n = 1ULL << k;
    Nbta out;
    out.alphabet = a.alphabet;
    out.num_states = static_cast<int>(n);
    for (int sym = 0; sym < a.alphabet->size(); ++sym) {
        for (uint64_t lm = 0; lm < n; ++lm) {
            for (uint64_t rm = 0; rm < n; ++rm)
                out.add_transition(static_cast<int>(lm), static_cast<int>(rm), sym,
                                   static_cast<int>(det_step(a, lm, rm, sym, false, false)));
            out.add_transition(static_cast<int>(lm), Nbta::kPad, sym,
                               static_cast<int>(det_step(a, lm, 0, sym, false, true)));
            out.add_transition(Nbta::kPad, static_cast<int>(lm), sym,
                               static_cast<int>(det_step(a, 0, lm, sym, true, false)));
        }
        out.add_transition(Nbta::kPad, Nbta::kPad, sym,
                           static_cast<int>(det_step(a, 0, 0, sym, true, true)));
    }
    uint64_t fmask = 0;
    for (int s : a.accepting) fmask |= 1ULL << s;
    for (uint64_t m = 0; m < n; ++m)
        if ((m & fmask) == 0) out.accepting.push_back(static_cast<int>(m));
    return out;
}

Nbta complement_reachable(const Nbta& a, size_t max_states) {
    if (a.num_states > 63) throw cap_error("reachable-subset complement limited to 63 states");
    Nbta out;
    out.alphabet = a.alphabet;
    std::unordered_map<uint64_t, int> ids;
    std::vector<uint64_t> masks;
    auto intern = [&](uint64_t m) {
        auto it = ids.find(m);
        if (it != ids.end()) return it->second;
        if (masks.size() >= max_states)
            throw cap_error("determinization exceeded " + std::to_string(max_states) + " states");
        int id = static_cast<int>(masks.size());
        ids.emplace(m, id);
        masks.push_back(m);
        return id;
    };
    int nsym = a.alphabet->size();
    for (int sym = 0; sym < nsym; ++sym) {
        uint64_t m = det_step(a, 0, 0, sym, true, true);
        out.add_transition(Nbta::kPad, Nbta::kPad, sym, intern(m));
    }
    // close under combinations with known states
    size_t done = 0;
    while (done < masks.size()) {
        int q = static_cast<int>(done++);
        for (int sym = 0; sym < nsym; ++sym) {
            auto emit = [&](int l, int r, uint64_t lm, uint64_t rm, bool lp, bool rp) {
                uint64_t m = det_step(a, lm, rm, sym, lp, rp);
                int id = intern(m);
                out.add_transition(l, r, sym, id);
            };
            emit(q, Nbta::kPad, masks[q], 0, false, true);
            emit(Nbta::kPad, q, 0, masks[q], true, false);
            for (int o = 0; o <= q; ++o) {
                emit(q, o, masks[q], masks[o], false, false);
                if (o != q) emit(o, q, masks[o], masks[q], false, false);
            }
        }
    }
    out.num_states = static_cast<int>(masks.size());
    uint64_t fmask = 0;
    for (int s : a.accepting) fmask |= 1ULL << s;
    for (size_t i = 0; i < masks.size(); ++i)
        if ((masks[i] & fmask) == 0) out.accepting.push_back(static_cast<int>(i));
    return out;
}

Nbta project_nbta(const Nbta& a, const AlphabetPtr& target, const std::vector<int>& map) {
    if (map.size() != static_cast<size_t>(a.alphabet->size()))
        throw validation_error("projection map size differs from the alphabet");
    Nbta out;
    out.alphabet = target;
    out.num_states = a.num_states;
    out.accepting = a.accepting;
    for (const auto& [k, v] : a.transitions)
        for (int t : v) out.add_transition(k.l, k.r, map[k.sym], t);
    return out;
}

namespace {
std::vector<char> productive_states(const Nbta& a) {
    std::vector<char> prod(a.num_states, 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [k, v] : a.transitions) {
            auto ok = [&](int s) { return s == Nbta::kPad || prod[s]; };
            if (!ok(k.l) || !ok(k.r)) continue;
            for (int t : v)
                if (!prod[t]) {
                    prod[t] = 1;
                    changed = true;
                }
        }
    }
    return prod;
}
}  // namespace

bool is_empty(const Nbta& a) {
    auto prod = productive_states(a);
    for (int s : a.accepting)
        if (prod[s]) return false;
    return true;
}

namespace {
struct Best {
    int size = -1;         // -1 = unreachable
    std::string text;      // canonical tie-break
    int l = -2, r = -2;    // building blocks (-2 unset, kPad = absent)
    int sym = -1;
};

BinaryTree build_witness(const Nbta& a, const std::vector<Best>& best, int s) {
    BinaryTree t;
    t.alphabet = a.alphabet;
    std::function<int(int, int)> emit = [&](int state, int parent) {
        int id = t.size();
        t.label.push_back(best[state].sym);
        t.left.push_back(-1);
        t.right.push_back(-1);
        t.parent.push_back(parent);
        if (best[state].l != Nbta::kPad) t.left[id] = emit(best[state].l, id);
        if (best[state].r != Nbta::kPad) t.right[id] = emit(best[state].r, id);
        return id;
    };
    emit(s, -1);
    return t;
}
}  // namespace

std::optional<BinaryTree> witness(const Nbta& a) {
    std::vector<Best> best(a.num_states);
    // relax until stable: minimal size first, then lexicographic text
    bool changed = true;
    auto text_of = [&](int sym, const Best* l, const Best* r) {
        std::string s = a.alphabet->symbol(sym);
        s += "[";
        s += l ? l->text : ".";
        s += ";";
        s += r ? r->text : ".";
        s += "]";
        return s;
    };
    while (changed) {
        changed = false;
        for (const auto& [k, targets] : a.transitions) {
            const Best* lb = nullptr;
            const Best* rb = nullptr;
            int size = 1;
            if (k.l != Nbta::kPad) {
                if (best[k.l].size < 0) continue;
                lb = &best[k.l];
                size += lb->size;
            }
            if (k.r != Nbta::kPad) {
                if (best[k.r].size < 0) continue;
                rb = &best[k.r];
                size += rb->size;
            }
            std::string text = text_of(k.sym, lb, rb);
            for (int t : targets) {
                Best& b = best[t];
                if (b.size < 0 || size < b.size || (size == b.size && text < b.text)) {
                    b.size = size;
                    b.text = text;
                    b.l = k.l;
                    b.r = k.r;
                    b.sym = k.sym;
                    changed = true;
                }
            }
        }
    }
    int pick = -1;
    for (int s : a.accepting) {
        if (best[s].size < 0) continue;
        if (pick < 0 || best[s].size < best[pick].size ||
            (best[s].size == best[pick].size && best[s].text < best[pick].text))
            pick = s;
    }
    if (pick < 0) return std::nullopt;
    return build_witness(a, best, pick);
}

Nbta flip_acceptance(const Nbta& a) {
    Nbta out = a;
    out.accepting.clear();
    for (int s = 0; s < a.num_states; ++s)
        if (!a.is_accepting(s)) out.accepting.push_back(s);
    return out;
}

Nbta prune(const Nbta& a) {
    auto prod = productive_states(a);
    // useful: reachable downward from accepting productive states
    std::vector<char> useful(a.num_states, 0);
    std::deque<int> work;
    for (int s : a.accepting)
        if (prod[s]) {
            useful[s] = 1;
            work.push_back(s);
        }
    // index transitions by target
    std::unordered_map<int, std::vector<const Nbta::Key*>> by_target;
    for (const auto& [k, v] : a.transitions)
        for (int t : v)
            by_target[t].push_back(&k);
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        auto it = by_target.find(s);
        if (it == by_target.end()) continue;
        for (const Nbta::Key* k : it->second) {
            auto mark = [&](int q) {
                if (q != Nbta::kPad && prod[q] && !useful[q]) {
                    useful[q] = 1;
                    work.push_back(q);
                }
            };
            if ((k->l == Nbta::kPad || prod[k->l]) && (k->r == Nbta::kPad || prod[k->r])) {
                mark(k->l);
                mark(k->r);
            }
        }
    }
    std::vector<int> remap(a.num_states, -1);
    int next = 0;
    for (int s = 0; s < a.num_states; ++s)
        if (useful[s]) remap[s] = next++;
    Nbta out;
    out.alphabet = a.alphabet;
    out.num_states = next;
    for (const auto& [k, v] : a.transitions) {
        auto ok = [&](int s) { return s == Nbta::kPad || remap[s] >= 0; };
        if (!ok(k.l) || !ok(k.r)) continue;
        auto m = [&](int s) { return s == Nbta::kPad ? s : remap[s]; };
        for (int t : v)
            if (remap[t] >= 0) out.add_transition(m(k.l), m(k.r), k.sym, remap[t]);
    }
    for (int s : a.accepting)
        if (remap[s] >= 0) out.accepting.push_back(remap[s]);
    std::sort(out.accepting.begin(), out.accepting.end());
    return out;
}

}  // namespace mdlc
