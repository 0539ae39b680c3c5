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

#include "mdlc/query_automata.hh"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

namespace mdlc {

// ---------------------------------------------------------------------------
// Query -> two-way alternating automaton.

TwoWayAta build_2ata(const DatalogQuery& q) {
    if (q.mode != QueryMode::Boolean || q.schema != SchemaKind::TauB)
        throw validation_error("the alternating construction expects a Boolean tau_b query");
    tmnf_certificate(q.program);

    TwoWayAta a;
    a.alphabet = hat_alphabet(q.alphabet);
    std::map<std::string, int> id;
    auto add_state = [&](const std::string& name) {
        id.emplace(name, static_cast<int>(a.state_names.size()));
        a.state_names.push_back(name);
    };
    add_state("Accept");
    add_state("Reject");
    for (const auto& p : q.program.idb()) add_state(p);
    for (const auto& s : q.alphabet->symbols()) add_state("label_" + s);
    for (const char* f : {"root", "hnlc", "hnrc", "islc", "isrc"}) add_state(f);
    a.initial = id.at(q.query_pred);
    a.accepting = {id.at("Accept")};

    auto unary_state = [&](const std::string& pred) {
        auto it = id.find(pred);
        if (it == id.end())
            throw validation_error("unary predicate '" + pred + "' has no automaton state");
        return it->second;
    };

    // per-head disjunctions of rule conjunctions; independent of the symbol
    std::map<int, std::vector<AtaFormula>> head_parts;
    for (const auto& r : q.program.rules) {
        TmnfForm f = tmnf_form(r);
        int head = id.at(r.head.pred);
        AtaFormula part;
        if (f == TmnfForm::UnaryUnary) {
            part = AtaFormula::conj({AtaFormula::atom(unary_state(r.body[0].pred), Move::Stay),
                                     AtaFormula::atom(unary_state(r.body[1].pred), Move::Stay)});
        } else {
            const Atom& bin = r.body[0].vars.size() == 2 ? r.body[0] : r.body[1];
            const Atom& un = r.body[0].vars.size() == 2 ? r.body[1] : r.body[0];
            int y = unary_state(un.pred);
            bool left = bin.pred == "lc";
            if (!left && bin.pred != "rc")
                throw validation_error("binary predicate '" + bin.pred +
                                       "' is not part of the binary-tree schema");
            if (f == TmnfForm::BinaryForward) {
                Move down = left ? Move::DownLeft : Move::DownRight;
                part = AtaFormula::conj(
                    {AtaFormula::atom(id.at(left ? "islc" : "isrc"), down),
                     AtaFormula::atom(y, down)});
            } else {
                part = AtaFormula::conj(
                    {AtaFormula::atom(id.at(left ? "islc" : "isrc"), Move::Stay),
                     AtaFormula::atom(y, Move::Up)});
            }
        }
        head_parts[head].push_back(std::move(part));
    }

    AtaFormula accept_stay = AtaFormula::atom(id.at("Accept"), Move::Stay);
    AtaFormula reject_stay = AtaFormula::atom(id.at("Reject"), Move::Stay);
    int nsym = a.alphabet->size();
    for (int h = 0; h < nsym; ++h) {
        int base = hat_base_index(h);
        unsigned flags = hat_flags(h);
        a.delta.emplace(std::make_pair(id.at("Accept"), h), accept_stay);
        a.delta.emplace(std::make_pair(id.at("Reject"), h), reject_stay);
        for (int s = 0; s < q.alphabet->size(); ++s)
            a.delta.emplace(std::make_pair(id.at("label_" + q.alphabet->symbol(s)), h),
                            s == base ? accept_stay : reject_stay);
        const std::pair<const char*, unsigned> flag_states[] = {{"root", kHatRoot},
                                                                {"hnlc", kHatHnlc},
                                                                {"hnrc", kHatHnrc},
                                                                {"islc", kHatIslc},
                                                                {"isrc", kHatIsrc}};
        for (const auto& [name, bit] : flag_states)
            a.delta.emplace(std::make_pair(id.at(name), h),
                            (flags & bit) ? accept_stay : reject_stay);
        for (const auto& [head, parts] : head_parts)
            a.delta.emplace(std::make_pair(head, h), AtaFormula::disj(parts));
    }
    return a;
}

// ---------------------------------------------------------------------------
// Two-way alternating -> bottom-up via monotone subtree summaries.

namespace {

using Cube = std::array<uint64_t, 2>;
using Dnf = boost::container::small_vector<Cube, 4>;

bool cube_subset(const Cube& a, const Cube& b) {
    return (a[0] & ~b[0]) == 0 && (a[1] & ~b[1]) == 0;
}

constexpr size_t kDnfCap = 8192;

void dnf_insert(Dnf& d, const Cube& c) {
    for (const auto& e : d)
        if (cube_subset(e, c)) return;
    d.erase(std::remove_if(d.begin(), d.end(), [&](const Cube& e) { return cube_subset(c, e); }),
            d.end());
    d.push_back(c);
    if (d.size() > kDnfCap)
        throw cap_error("assumption antichain exceeded " + std::to_string(kDnfCap) + " terms");
}

void dnf_normalize(Dnf& d) {
    std::sort(d.begin(), d.end());
}

Dnf dnf_or(const Dnf& a, const Dnf& b) {
    Dnf out = a;
    for (const auto& c : b) dnf_insert(out, c);
    return out;
}

Dnf dnf_and(const Dnf& a, const Dnf& b) {
    Dnf out;
    for (const auto& x : a)
        for (const auto& y : b) dnf_insert(out, {x[0] | y[0], x[1] | y[1]});
    return out;
}

Dnf dnf_true() { return {Cube{0, 0}}; }

}  // namespace

AtaSummaryMachine::AtaSummaryMachine(TwoWayAta ata, size_t max_summaries)
    : ata_(std::move(ata)), max_summaries_(max_summaries) {
    up_states_ = ata_.up_states();
    if (up_states_.size() > 128)
        throw cap_error("more than 128 upward-moving states; instance too large for this scale");
    up_index_.assign(ata_.num_states(), -1);
    for (size_t i = 0; i < up_states_.size(); ++i) up_index_[up_states_[i]] = static_cast<int>(i);
    std::set<int> reads = {ata_.initial};
    std::vector<std::pair<int, Move>> atoms;
    for (const auto& [key, f] : ata_.delta) {
        atoms.clear();
        f.collect_atoms(atoms);
        for (const auto& [s, m] : atoms)
            if (m == Move::DownLeft || m == Move::DownRight) reads.insert(s);
    }
    read_states_.assign(reads.begin(), reads.end());
}

AtaSummaryMachine::Dnf AtaSummaryMachine::substitute(const Dnf& d,
                                                     const std::vector<Dnf>& x) const {
    Dnf out;
    for (const auto& cube : d) {
        Dnf term = dnf_true();
        for (int w = 0; w < 2 && !term.empty(); ++w) {
            uint64_t bits = cube[w];
            while (bits) {
                int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                term = dnf_and(term, x[up_states_[w * 64 + b]]);
                if (term.empty()) break;
            }
        }
        out = dnf_or(out, term);
    }
    return out;
}

AtaSummaryMachine::Dnf AtaSummaryMachine::eval_formula(const AtaFormula& f,
                                                       const std::vector<Dnf>& x, int lsum,
                                                       int rsum) const {
    switch (f.kind) {
        case AtaFormula::Kind::Atom: {
            int t = f.state;
            switch (f.move) {
                case Move::Stay: return x[t];
                case Move::Up: {
                    int u = up_index_[t];
                    Cube c{0, 0};
                    c[u / 64] |= 1ULL << (u % 64);
                    return {c};
                }
                case Move::DownLeft:
                    if (lsum < 0) return ata_.is_accepting(t) ? dnf_true() : Dnf{};
                    return substitute(summaries_[lsum].wins[t], x);
                case Move::DownRight:
                    if (rsum < 0) return ata_.is_accepting(t) ? dnf_true() : Dnf{};
                    return substitute(summaries_[rsum].wins[t], x);
            }
            return {};
        }
        case AtaFormula::Kind::And: {
            Dnf out = dnf_true();
            for (const auto& p : f.parts) {
                out = dnf_and(out, eval_formula(p, x, lsum, rsum));
                if (out.empty()) return out;
            }
            return out;
        }
        case AtaFormula::Kind::Or: {
            Dnf out;
            for (const auto& p : f.parts) out = dnf_or(out, eval_formula(p, x, lsum, rsum));
            return out;
        }
    }
    return {};
}

int AtaSummaryMachine::intern(Summary s) {
    std::string key;
    for (auto& d : s.wins) dnf_normalize(d);
    for (int rs : read_states_) {
        const Dnf& d = s.wins[rs];
        key.append(reinterpret_cast<const char*>(d.data()), d.size() * sizeof(Cube));
        key.push_back('\x01');
    }
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;
    if (summaries_.size() >= max_summaries_)
        throw cap_error("conversion exceeded " + std::to_string(max_summaries_) +
                        " subtree summaries");
    int id = static_cast<int>(summaries_.size());
    summaries_.push_back(std::move(s));
    intern_.emplace(std::move(key), id);
    return id;
}

int AtaSummaryMachine::combine(int l, int r, int sym) {
    uint64_t key = ((static_cast<uint64_t>(l + 1) & 0x1FFFFF) << 42) |
                   ((static_cast<uint64_t>(r + 1) & 0x1FFFFF) << 21) |
                   (static_cast<uint64_t>(sym) & 0x1FFFFF);
    auto mit = step_memo_.find(key);
    if (mit != step_memo_.end()) return mit->second;

    int k = ata_.num_states();
    std::vector<Dnf> x(k);
    for (int s : ata_.accepting) x[s] = dnf_true();
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < k; ++s) {
            if (ata_.is_accepting(s)) continue;
            const AtaFormula* f = ata_.formula(s, sym);
            if (!f) continue;
            Dnf nv = eval_formula(*f, x, l, r);
            dnf_normalize(nv);
            Dnf old = x[s];
            dnf_normalize(old);
            if (nv != old) {
                x[s] = std::move(nv);
                changed = true;
            }
        }
    }
    Summary out;
    out.wins = std::move(x);
    int id = intern(std::move(out));
    step_memo_.emplace(key, id);
    return id;
}

bool AtaSummaryMachine::accepts_root(int id) const {
    Cube fmask{0, 0};
    for (size_t i = 0; i < up_states_.size(); ++i)
        if (ata_.is_accepting(up_states_[i])) fmask[i / 64] |= 1ULL << (i % 64);
    for (const auto& cube : summaries_[id].wins[ata_.initial])
        if (cube_subset(cube, fmask)) return true;
    return false;
}

Nbta ata_to_nbta(const TwoWayAta& a, size_t max_states, bool complement) {
    AtaSummaryMachine m(a, max_states);
    Nbta out;
    out.alphabet = a.alphabet;
    int nsym = a.alphabet->size();
    for (int sym = 0; sym < nsym; ++sym) out.add_transition(Nbta::kPad, Nbta::kPad, sym, m.leaf(sym));
    for (size_t done = 0; done < m.size(); ++done) {
        int q = static_cast<int>(done);
        for (int sym = 0; sym < nsym; ++sym) {
            out.add_transition(q, Nbta::kPad, sym, m.combine(q, -1, sym));
            out.add_transition(Nbta::kPad, q, sym, m.combine(-1, q, sym));
            for (int o = 0; o <= q; ++o) {
                out.add_transition(q, o, sym, m.combine(q, o, sym));
                if (o != q) out.add_transition(o, q, sym, m.combine(o, q, sym));
            }
        }
    }
    out.num_states = static_cast<int>(m.size());
    for (int s = 0; s < out.num_states; ++s)
        if (m.accepts_root(s) != complement) out.accepting.push_back(s);
    return out;
}

// ---------------------------------------------------------------------------

Nbta build_hat_checker(const AlphabetPtr& sigma) {
    Nbta a;
    a.alphabet = hat_alphabet(sigma);
    a.num_states = 3;  // 0 = left child, 1 = right child, 2 = root
    a.accepting = {2};
    for (int base = 0; base < sigma->size(); ++base) {
        for (unsigned flags = 0; flags < 32; ++flags) {
            int role;
            bool r = flags & kHatRoot, il = flags & kHatIslc, ir = flags & kHatIsrc;
            if (r && !il && !ir) role = 2;
            else if (il && !ir && !r) role = 0;
            else if (ir && !il && !r) role = 1;
            else continue;
            int l = (flags & kHatHnlc) ? Nbta::kPad : 0;
            int rr = (flags & kHatHnrc) ? Nbta::kPad : 1;
            a.add_transition(l, rr, hat_index(base, flags), role);
        }
    }
    return a;
}

namespace {
Nbta restrict_and_project(const Nbta& over_hat, const AlphabetPtr& sigma, size_t) {
    Nbta inter = prune(intersect_nbta(over_hat, build_hat_checker(sigma)));
    std::vector<int> map(inter.alphabet->size());
    for (int i = 0; i < inter.alphabet->size(); ++i) map[i] = hat_base_index(i);
    return prune(project_nbta(inter, sigma, map));
}
}  // namespace

Nbta build_a_yes(const DatalogQuery& q, size_t max_states) {
    Nbta conv = prune(ata_to_nbta(build_2ata(q), max_states, false));
    return restrict_and_project(conv, q.alphabet, max_states);
}

Nbta build_a_no_via_ata(const DatalogQuery& q, size_t max_states) {
    // the conversion is deterministic and complete, so flipping acceptance
    // complements before the restriction to valid flag-extensions
    Nbta conv = prune(flip_acceptance(ata_to_nbta(build_2ata(q), max_states)));
    return restrict_and_project(conv, q.alphabet, max_states);
}

// ---------------------------------------------------------------------------
// Set-variable route.

namespace {

// The small building blocks running over labels (base, gamma, z1, z2).
// States are tiny integers; step returns a bitmask of successor states.
struct Tiny {
    enum class Kind { ZAssign, Unary, Binary, RootBit } kind;
    int var = 1;          // ZAssign/Unary: which node variable
    int test_label = -1;  // Unary: base symbol to match, or
    int test_flag = 0;    // 1 root, 2 hnlc, 3 hnrc, or
    int bit = -1;         // intensional bit (Unary/RootBit)
    bool negated = false;
    bool rel_lc = true;  // Binary: left vs right child
    int from = 1, to = 2;

    int num_states() const {
        switch (kind) {
            case Kind::Binary: return 3;
            default: return 2;
        }
    }
    int accepting_state() const { return kind == Kind::Binary ? 2 : 1; }

    unsigned step(int l, int r, int base, uint64_t gamma, int z1, int z2) const {
        auto zbit = [&](int v) { return v == 1 ? z1 : z2; };
        int lv = l < 0 ? 0 : l, rv = r < 0 ? 0 : r;
        switch (kind) {
            case Kind::ZAssign: {
                int total = (l == 1) + (r == 1) + zbit(var);
                return total <= 1 ? (1u << total) : 0u;
            }
            case Kind::Unary: {
                int cnt = (l == 1) + (r == 1);
                if (zbit(var)) {
                    if (cnt) return 0;
                    bool ok;
                    if (test_label >= 0) ok = (base == test_label);
                    else if (test_flag == 1) ok = true;  // rootness = never propagate
                    else if (test_flag == 2) ok = (l < 0);
                    else if (test_flag == 3) ok = (r < 0);
                    else ok = (((gamma >> bit) & 1) != 0) != negated;
                    return ok ? (1u << 1) : 0u;
                }
                if (cnt == 0) return 1u << 0;
                if (cnt == 1) return test_flag == 1 ? 0u : (1u << 1);
                return 0;
            }
            case Kind::Binary: {
                int ab = zbit(from), bb = zbit(to);
                if (ab && bb) return 0;
                if (bb) return (lv == 0 && rv == 0) ? (1u << 1) : 0u;
                if (ab) {
                    bool ok = rel_lc ? (lv == 1 && rv == 0) : (rv == 1 && lv == 0);
                    return ok ? (1u << 2) : 0u;
                }
                if (lv == 1 || rv == 1) return 0;  // pending child not consumed here
                if (lv == 2 && rv == 2) return 0;
                if (lv == 2 || rv == 2) return 1u << 2;
                return 1u << 0;
            }
            case Kind::RootBit: {
                if (lv || rv) return 0;  // an accepted guess below never reaches the root
                unsigned m = 1u << 0;
                if ((gamma >> bit) & 1) m |= 1u << 1;
                return m;
            }
        }
        return 0;
    }
};

struct SetVarDecode {
    int n_bits;
    int base_of(int idx) const { return idx / (4 << n_bits); }
    uint64_t gamma_of(int idx) const { return static_cast<uint64_t>((idx / 4) % (1 << n_bits)); }
    int z1_of(int idx) const { return (idx % 4) >> 1; }
    int z2_of(int idx) const { return idx % 2; }
};

Nbta materialize_tiny(const Tiny& t, const AlphabetPtr& base, int n_bits, long long max_symbols) {
    AlphabetPtr sig = setvar_alphabet(base, n_bits, max_symbols);
    SetVarDecode dec{n_bits};
    Nbta a;
    a.alphabet = sig;
    a.num_states = t.num_states();
    a.accepting = {t.accepting_state()};
    int k = a.num_states;
    for (int sym = 0; sym < sig->size(); ++sym) {
        int b = dec.base_of(sym);
        uint64_t g = dec.gamma_of(sym);
        int z1 = dec.z1_of(sym), z2 = dec.z2_of(sym);
        for (int l = -1; l < k; ++l)
            for (int r = -1; r < k; ++r) {
                unsigned m = t.step(l, r, b, g, z1, z2);
                while (m) {
                    int s = __builtin_ctz(m);
                    m &= m - 1;
                    a.add_transition(l < 0 ? Nbta::kPad : l, r < 0 ? Nbta::kPad : r, sym, s);
                }
            }
    }
    return a;
}

Tiny tiny_from_atom(const AtomSpec& chi) {
    Tiny t;
    if (chi.kind == AtomSpec::Kind::Binary) {
        t.kind = Tiny::Kind::Binary;
        if (chi.rel != "lc" && chi.rel != "rc")
            throw validation_error("binary atoms range over lc/rc only");
        t.rel_lc = chi.rel == "lc";
        t.from = chi.from;
        t.to = chi.to;
        return t;
    }
    t.kind = Tiny::Kind::Unary;
    t.var = chi.var;
    t.negated = chi.negated;
    if (chi.idb_bit >= 0) {
        t.bit = chi.idb_bit;
    } else if (chi.pred == "root") {
        t.test_flag = 1;
    } else if (chi.pred == "hnlc") {
        t.test_flag = 2;
    } else if (chi.pred == "hnrc") {
        t.test_flag = 3;
    } else if (chi.pred.rfind("label_", 0) == 0) {
        t.test_label = -2;  // resolved against the base alphabet at build time
    } else {
        throw validation_error("unsupported atom '" + chi.pred + "'");
    }
    return t;
}

}  // namespace

Nbta build_assignment_automaton(int j, const AlphabetPtr& base, int n_bits,
                                long long max_symbols) {
    if (j != 1 && j != 2) throw validation_error("node variable index must be 1 or 2");
    Tiny t;
    t.kind = Tiny::Kind::ZAssign;
    t.var = j;
    return materialize_tiny(t, base, n_bits, max_symbols);
}

Nbta build_atom_automaton(const AtomSpec& chi, const AlphabetPtr& base, int n_bits,
                          long long max_symbols) {
    Tiny t = tiny_from_atom(chi);
    if (t.test_label == -2) {
        std::string sym = chi.pred.substr(6);
        t.test_label = base->index_of(sym);
        if (t.test_label < 0) throw validation_error("unknown label '" + sym + "'");
    }
    if (t.kind == Tiny::Kind::Unary && t.bit >= 0 && t.bit >= n_bits)
        throw validation_error("intensional bit out of range");
    return materialize_tiny(t, base, n_bits, max_symbols);
}

// ---------------------------------------------------------------------------
// The fused pipeline for the No-automaton.

namespace {

// Product of up to five tiny automata, synchronized on the label; subset
// states are interned per component.
struct Component {
    std::vector<Tiny> factors;
    std::vector<int> radix;          // factor state counts
    int nstates = 1;                 // product states
    std::vector<int> relevant_bits;  // gamma bits this component reads
    std::vector<uint64_t> accept_mask;  // bitset over product states

    // interned subsets (bitsets over product states)
    std::vector<std::vector<uint64_t>> subsets;
    std::unordered_map<std::string, int> subset_ids;
    std::vector<char> subset_accepts;
    std::unordered_map<uint64_t, int> step_memo;

    void finalize() {
        nstates = 1;
        for (const auto& f : factors) {
            radix.push_back(f.num_states());
            nstates *= f.num_states();
        }
        if (nstates > 243) throw internal_error("per-rule product exceeds 243 states");
        accept_mask.assign((nstates + 63) / 64, 0);
        for (int s = 0; s < nstates; ++s) {
            int rem = s;
            bool acc = true;
            for (size_t i = 0; i < factors.size(); ++i) {
                int st = rem % radix[i];
                rem /= radix[i];
                if (st != factors[i].accepting_state()) acc = false;
            }
            if (acc) accept_mask[s / 64] |= 1ULL << (s % 64);
        }
        std::set<int> bits;
        for (const auto& f : factors) {
            if (f.kind == Tiny::Kind::Unary && f.bit >= 0) bits.insert(f.bit);
            if (f.kind == Tiny::Kind::RootBit) bits.insert(f.bit);
        }
        relevant_bits.assign(bits.begin(), bits.end());
    }

    uint64_t pattern_of(uint64_t gamma) const {
        uint64_t p = 0;
        for (size_t i = 0; i < relevant_bits.size(); ++i)
            if ((gamma >> relevant_bits[i]) & 1) p |= 1ULL << i;
        return p;
    }

    int intern_subset(const std::vector<uint64_t>& bits) {
        std::string key(reinterpret_cast<const char*>(bits.data()), bits.size() * 8);
        auto it = subset_ids.find(key);
        if (it != subset_ids.end()) return it->second;
        int id = static_cast<int>(subsets.size());
        subsets.push_back(bits);
        bool acc = false;
        for (size_t w = 0; w < bits.size(); ++w)
            if (bits[w] & accept_mask[w]) acc = true;
        subset_accepts.push_back(acc);
        subset_ids.emplace(std::move(key), id);
        return id;
    }

    // product step for one (state-or-pad pair, label); returns a state mask
    void product_step(int sl, int sr, int base, uint64_t gamma, int z1, int z2,
                      std::vector<uint64_t>& out) const {
        // decode factor states; -1 stands for pad on that side
        std::vector<unsigned> masks(factors.size());
        int reml = sl, remr = sr;
        for (size_t i = 0; i < factors.size(); ++i) {
            int li = sl < 0 ? -1 : reml % radix[i];
            int ri = sr < 0 ? -1 : remr % radix[i];
            if (sl >= 0) reml /= radix[i];
            if (sr >= 0) remr /= radix[i];
            masks[i] = factors[i].step(li, ri, base, gamma, z1, z2);
            if (!masks[i]) return;
        }
        // cartesian product of factor successor sets
        std::vector<int> result = {0};
        int weight = 1;
        for (size_t i = 0; i < factors.size(); ++i) {
            std::vector<int> next;
            unsigned m = masks[i];
            while (m) {
                int s = __builtin_ctz(m);
                m &= m - 1;
                for (int basev : result) next.push_back(basev + weight * s);
            }
            result = std::move(next);
            weight *= radix[i];
        }
        for (int s : result) out[s / 64] |= 1ULL << (s % 64);
    }

    // determinized step over interned subsets (-1 = pad side), with the two
    // node-variable bits projected away
    int subset_step(int lsub, int rsub, int base, uint64_t gamma) {
        uint64_t key = ((static_cast<uint64_t>(lsub + 1) & 0xFFFF) << 40) |
                       ((static_cast<uint64_t>(rsub + 1) & 0xFFFF) << 24) |
                       ((static_cast<uint64_t>(base) & 0xFF) << 16) | (pattern_of(gamma) & 0xFFFF);
        auto it = step_memo.find(key);
        if (it != step_memo.end()) return it->second;
        std::vector<uint64_t> out((nstates + 63) / 64, 0);
        std::vector<int> lstates, rstates;
        auto unpack = [&](int sub, std::vector<int>& v) {
            if (sub < 0) {
                v.push_back(-1);
                return;
            }
            const auto& bits = subsets[sub];
            for (size_t w = 0; w < bits.size(); ++w) {
                uint64_t m = bits[w];
                while (m) {
                    int b = __builtin_ctzll(m);
                    m &= m - 1;
                    v.push_back(static_cast<int>(w * 64 + b));
                }
            }
        };
        unpack(lsub, lstates);
        unpack(rsub, rstates);
        for (int sl : lstates)
            for (int sr : rstates)
                for (int z = 0; z < 4; ++z)
                    product_step(sl, sr, base, gamma, z >> 1, z & 1, out);
        int id = intern_subset(out);
        step_memo.emplace(key, id);
        return id;
    }
};

}  // namespace

Nbta build_a_no(const DatalogQuery& q, long long max_sigma_n, size_t max_states,
                NoRouteStats* stats) {
    if (q.mode != QueryMode::Boolean || q.schema != SchemaKind::TauB)
        throw validation_error("the set-variable construction expects a Boolean tau_b query");
    tmnf_certificate(q.program);

    std::vector<std::string> idbs;
    for (const auto& p : q.program.idb()) idbs.push_back(p);
    int n = static_cast<int>(idbs.size());
    if (n >= 62) throw cap_error("too many intensional predicates for the set-variable route");
    long long sigma_n = static_cast<long long>(q.alphabet->size()) * (1LL << n) * 4;
    if (sigma_n > max_sigma_n)
        throw cap_error("set-variable alphabet would have " + std::to_string(sigma_n) +
                        " symbols, above the configured cap of " + std::to_string(max_sigma_n) +
                        "; shrink the query or raise the cap");
    auto bit_of = [&](const std::string& p) {
        return static_cast<int>(std::find(idbs.begin(), idbs.end(), p) - idbs.begin());
    };

    auto unary_tiny = [&](const std::string& pred, int var, bool negated) {
        AtomSpec spec;
        spec.kind = AtomSpec::Kind::Unary;
        spec.pred = pred;
        spec.var = var;
        spec.negated = negated;
        if (!is_builtin_predicate(pred)) spec.idb_bit = bit_of(pred);
        Tiny t = tiny_from_atom(spec);
        if (t.test_label == -2) {
            t.test_label = q.alphabet->index_of(pred.substr(6));
            if (t.test_label < 0) throw validation_error("unknown label in " + pred);
        }
        return t;
    };

    std::vector<Component> comps;
    size_t per_rule_max = 0;
    for (const auto& r : q.program.rules) {
        TmnfForm f = tmnf_form(r);
        Component c;
        Tiny z1;
        z1.kind = Tiny::Kind::ZAssign;
        z1.var = 1;
        Tiny z2 = z1;
        z2.var = 2;
        c.factors.push_back(z1);
        c.factors.push_back(z2);
        if (f == TmnfForm::UnaryUnary) {
            c.factors.push_back(unary_tiny(r.body[0].pred, 1, false));
            c.factors.push_back(unary_tiny(r.body[1].pred, 1, false));
        } else {
            const Atom& bin = r.body[0].vars.size() == 2 ? r.body[0] : r.body[1];
            const Atom& un = r.body[0].vars.size() == 2 ? r.body[1] : r.body[0];
            AtomSpec bs;
            bs.kind = AtomSpec::Kind::Binary;
            bs.rel = bin.pred;
            if (f == TmnfForm::BinaryForward) {
                bs.from = 1;
                bs.to = 2;
            } else {
                bs.from = 2;
                bs.to = 1;
            }
            c.factors.push_back(tiny_from_atom(bs));
            c.factors.push_back(unary_tiny(un.pred, 2, false));
        }
        c.factors.push_back(unary_tiny(r.head.pred, 1, true));  // negated head
        c.finalize();
        per_rule_max = std::max(per_rule_max, static_cast<size_t>(c.nstates));
        comps.push_back(std::move(c));
    }
    {
        Component root;
        Tiny rb;
        rb.kind = Tiny::Kind::RootBit;
        rb.bit = bit_of(q.query_pred);
        root.factors.push_back(rb);
        root.finalize();
        comps.push_back(std::move(root));
    }

    int m = static_cast<int>(comps.size());
    uint64_t gmax = 1ULL << n;

    // determinized tuples of per-component subsets
    std::vector<std::vector<int>> tuples;
    std::unordered_map<std::string, int> tuple_ids;
    auto intern_tuple = [&](const std::vector<int>& t) {
        std::string key(reinterpret_cast<const char*>(t.data()), t.size() * sizeof(int));
        auto it = tuple_ids.find(key);
        if (it != tuple_ids.end()) return it->second;
        if (tuples.size() >= max_states)
            throw cap_error("set-variable determinization exceeded " +
                            std::to_string(max_states) + " states");
        int id = static_cast<int>(tuples.size());
        tuples.push_back(t);
        tuple_ids.emplace(std::move(key), id);
        return id;
    };

    Nbta out;
    out.alphabet = q.alphabet;
    int nsym = q.alphabet->size();
    std::vector<int> tup(m);
    auto step_tuple = [&](int lt, int rt, int base, uint64_t gamma) {
        for (int c = 0; c < m; ++c)
            tup[c] = comps[c].subset_step(lt < 0 ? -1 : tuples[lt][c],
                                          rt < 0 ? -1 : tuples[rt][c], base, gamma);
        return intern_tuple(tup);
    };
    for (int sym = 0; sym < nsym; ++sym)
        for (uint64_t g = 0; g < gmax; ++g)
            out.add_transition(Nbta::kPad, Nbta::kPad, sym, step_tuple(-1, -1, sym, g));
    for (size_t done = 0; done < tuples.size(); ++done) {
        int t = static_cast<int>(done);
        for (int sym = 0; sym < nsym; ++sym)
            for (uint64_t g = 0; g < gmax; ++g) {
                out.add_transition(t, Nbta::kPad, sym, step_tuple(t, -1, sym, g));
                out.add_transition(Nbta::kPad, t, sym, step_tuple(-1, t, sym, g));
                for (int o = 0; o <= t; ++o) {
                    out.add_transition(t, o, sym, step_tuple(t, o, sym, g));
                    if (o != t) out.add_transition(o, t, sym, step_tuple(o, t, sym, g));
                }
            }
    }
    out.num_states = static_cast<int>(tuples.size());
    // complemented acceptance: no component may have reached a violation
    for (int t = 0; t < out.num_states; ++t) {
        bool any = false;
        for (int c = 0; c < m; ++c)
            if (comps[c].subset_accepts[tuples[t][c]]) any = true;
        if (!any) out.accepting.push_back(t);
    }
    if (stats) {
        stats->idb_count = n;
        stats->sigma_n_size = sigma_n;
        stats->det_states = tuples.size();
        stats->per_rule_max_states = per_rule_max;
    }
    return prune(out);
}

Nbta build_a_yes_via_mso(const DatalogQuery& q, long long max_sigma_n, size_t max_states) {
    Nbta no = build_a_no(q, max_sigma_n, max_states);
    return prune(complement_reachable(no, max_states));
}

}  // namespace mdlc
