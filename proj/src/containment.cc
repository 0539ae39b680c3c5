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

#include "mdlc/containment.hh"

#include <algorithm>
#include <chrono>
#include <functional>
#include <memory>
#include <queue>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mdlc {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

/// One factor of the lazy product. Child ids are >= 0, or kAbsent for a
/// missing child; a result of kDead prunes the whole tuple.
struct LazyPart {
    static constexpr int kAbsent = -1;
    static constexpr int kDead = -1;
    virtual ~LazyPart() = default;
    virtual int combine(int l, int r, int sym) = 0;
    virtual bool accepting(int id) = 0;
};

struct MachinePart : LazyPart {
    AtaSummaryMachine machine;
    bool flip;
    MachinePart(TwoWayAta ata, size_t cap, bool flip_)
        : machine(std::move(ata), cap), flip(flip_) {}
    int combine(int l, int r, int sym) override { return machine.combine(l, r, sym); }
    bool accepting(int id) override { return machine.accepts_root(id) != flip; }
};

/// On-the-fly subset construction over a materialized automaton, with an
/// optional symbol translation applied first.
struct NbtaPart : LazyPart {
    Nbta a;
    std::vector<int> sym_map;  // product symbol -> automaton symbol
    std::vector<std::vector<uint64_t>> masks;
    std::unordered_map<std::string, int> ids;
    std::unordered_map<int, std::vector<std::pair<Nbta::Key, const std::vector<int>*>>> by_sym;
    size_t words;

    NbtaPart(Nbta aut, std::vector<int> map) : a(std::move(aut)), sym_map(std::move(map)) {
        words = (a.num_states + 63) / 64;
        if (words == 0) words = 1;
        for (const auto& [k, v] : a.transitions) by_sym[k.sym].push_back({k, &v});
    }

    int intern(const std::vector<uint64_t>& m) {
        bool empty = true;
        for (uint64_t w : m)
            if (w) empty = false;
        if (empty) return kDead;
        std::string key(reinterpret_cast<const char*>(m.data()), m.size() * 8);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(masks.size());
        masks.push_back(m);
        ids.emplace(std::move(key), id);
        return id;
    }

    int combine(int l, int r, int sym) override {
        int asym = sym_map[sym];
        auto it = by_sym.find(asym);
        if (it == by_sym.end()) return kDead;
        std::vector<uint64_t> out(words, 0);
        auto inset = [&](int id, int s) {
            return (masks[id][s / 64] >> (s % 64)) & 1;
        };
        for (const auto& [k, targets] : it->second) {
            bool lok = (k.l == Nbta::kPad) ? (l == kAbsent) : (l != kAbsent && inset(l, k.l));
            if (!lok) continue;
            bool rok = (k.r == Nbta::kPad) ? (r == kAbsent) : (r != kAbsent && inset(r, k.r));
            if (!rok) continue;
            for (int t : *targets) out[t / 64] |= 1ULL << (t % 64);
        }
        return intern(out);
    }

    bool accepting(int id) override {
        for (int s : a.accepting)
            if ((masks[id][s / 64] >> (s % 64)) & 1) return true;
        return false;
    }
};

struct ProductResult {
    std::optional<BinaryTree> witness;
    size_t tuples = 0;
};

/// Saturates one lazy part standalone over valid flag extensions and
/// returns which (role, state) pairs can sit below an accepting root.
/// Pruning joint tuples against this set is sound: the standalone closure
/// only over-approximates the contexts available in a product.
std::set<std::pair<int, int>> useful_states(const AlphabetPtr& base, LazyPart& part,
                                            size_t max_states) {
    struct Node {
        int role, state;
        bool operator<(const Node& o) const {
            return std::tie(role, state) < std::tie(o.role, o.state);
        }
    };
    std::map<Node, int> ids;
    std::vector<Node> nodes;
    std::deque<int> work;
    auto intern = [&](int role, int state) {
        Node n{role, state};
        auto it = ids.find(n);
        if (it != ids.end()) return it->second;
        if (nodes.size() >= max_states)
            throw cap_error("single-side closure exceeded " + std::to_string(max_states) +
                            " states");
        int id = static_cast<int>(nodes.size());
        ids.emplace(n, id);
        nodes.push_back(n);
        work.push_back(id);
        return id;
    };
    struct Combo {
        int l, r, result;  // node ids; -1 for absent child
    };
    std::vector<Combo> combos;
    int nbase = base->size();
    auto flags_for = [](int role, bool has_l, bool has_r) {
        unsigned f = 0;
        if (role == 2) f |= kHatRoot;
        if (role == 0) f |= kHatIslc;
        if (role == 1) f |= kHatIsrc;
        if (!has_l) f |= kHatHnlc;
        if (!has_r) f |= kHatHnrc;
        return f;
    };
    auto combine = [&](int l, int r, int role) {
        unsigned flags = flags_for(role, l != -1, r != -1);
        for (int b = 0; b < nbase; ++b) {
            int s = part.combine(l == -1 ? LazyPart::kAbsent : nodes[l].state,
                                 r == -1 ? LazyPart::kAbsent : nodes[r].state,
                                 hat_index(b, flags));
            if (s == LazyPart::kDead) continue;
            combos.push_back({l, r, intern(role, s)});
        }
    };
    for (int role = 0; role < 3; ++role) combine(-1, -1, role);
    std::vector<int> lefts, rights;
    size_t done = 0;
    while (done < nodes.size()) {
        int id = static_cast<int>(done++);
        int role = nodes[id].role;
        if (role == 2) continue;
        if (role == 0) {
            for (int nr = 0; nr < 3; ++nr) {
                combine(id, -1, nr);
                for (int o : rights) combine(id, o, nr);
            }
            lefts.push_back(id);
        } else {
            for (int nr = 0; nr < 3; ++nr) {
                combine(-1, id, nr);
                for (int o : lefts) combine(o, id, nr);
            }
            rights.push_back(id);
        }
    }
    // backwards closure from accepting roots
    std::vector<char> useful(nodes.size(), 0);
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].role == 2 && part.accepting(nodes[i].state)) useful[i] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& c : combos) {
            if (!useful[c.result]) continue;
            if (c.l >= 0 && !useful[c.l]) {
                useful[c.l] = 1;
                changed = true;
            }
            if (c.r >= 0 && !useful[c.r]) {
                useful[c.r] = 1;
                changed = true;
            }
        }
    }
    std::set<std::pair<int, int>> out;
    for (size_t i = 0; i < nodes.size(); ++i)
        if (useful[i]) out.insert({nodes[i].role, nodes[i].state});
    return out;
}

/// Joint emptiness/witness search over lazy parts running on valid flag
/// extensions. The flag bookkeeping is woven into the search: every tuple
/// carries the role its node will play (left child, right child, or root),
/// only role-compatible pairs ever combine, and each combination admits
/// exactly one flag set per base symbol. Tuples are explored in
/// nondecreasing witness-size order, so the first accepting tuple yields a
/// minimum-size tree over the extended alphabet.
ProductResult product_witness(const AlphabetPtr& base, std::vector<LazyPart*> parts,
                              size_t max_tuples,
                              const std::set<std::pair<int, int>>* keep0 = nullptr) {
    struct Info {
        int size = -1;
        int sym = -1, l = -1, r = -1;  // derivation of the best tree
        bool final_ = false;
    };
    std::vector<std::vector<int>> tuples;  // [role, part states...]
    std::vector<Info> info;
    std::unordered_map<std::string, int> ids;
    auto intern = [&](const std::vector<int>& t) {
        std::string key(reinterpret_cast<const char*>(t.data()), t.size() * sizeof(int));
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        if (tuples.size() >= max_tuples)
            throw cap_error("containment product exceeded " + std::to_string(max_tuples) +
                            " states; instance too large for this scale");
        int id = static_cast<int>(tuples.size());
        tuples.push_back(t);
        info.emplace_back();
        ids.emplace(std::move(key), id);
        return id;
    };

    using Entry = std::pair<int, int>;  // (size, tuple id)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    int nbase = base->size();
    int nparts = static_cast<int>(parts.size());
    std::vector<int> tmp(nparts + 1);

    // the flag set is a function of the node's role and which children exist
    auto flags_for = [](int role, bool has_l, bool has_r) {
        unsigned f = 0;
        if (role == 2) f |= kHatRoot;
        if (role == 0) f |= kHatIslc;
        if (role == 1) f |= kHatIsrc;
        if (!has_l) f |= kHatHnlc;
        if (!has_r) f |= kHatHnrc;
        return f;
    };

    auto try_combine = [&](int l, int r, int role, int size) {
        unsigned flags = flags_for(role, l != -1, r != -1);
        for (int b = 0; b < nbase; ++b) {
            int sym = hat_index(b, flags);
            tmp[0] = role;
            bool dead = false;
            for (int p = 0; p < nparts; ++p) {
                tmp[p + 1] = parts[p]->combine(l == -1 ? LazyPart::kAbsent : tuples[l][p + 1],
                                               r == -1 ? LazyPart::kAbsent : tuples[r][p + 1],
                                               sym);
                if (tmp[p + 1] == LazyPart::kDead) {
                    dead = true;
                    break;
                }
            }
            if (dead) continue;
            if (keep0 && !keep0->count({role, tmp[1]})) continue;
            int id = intern(tmp);
            if (info[id].size < 0 || size < info[id].size) {
                info[id].size = size;
                info[id].sym = sym;
                info[id].l = l;
                info[id].r = r;
                pq.push({size, id});
            }
        }
    };

    for (int role = 0; role < 3; ++role) try_combine(-1, -1, role, 1);

    std::vector<int> lefts, rights;  // finalized ids by role
    while (!pq.empty()) {
        auto [size, id] = pq.top();
        pq.pop();
        if (info[id].final_) continue;
        info[id].final_ = true;
        int role = tuples[id][0];
        if (role == 2) {
            bool acc = true;
            for (int p = 0; p < nparts && acc; ++p) acc = parts[p]->accepting(tuples[id][p + 1]);
            if (acc) {
                // rebuild the witness from the stored derivations
                BinaryTree t;
                t.alphabet = hat_alphabet(base);
                std::function<int(int, int)> emit = [&](int tid, int parent) {
                    int v = t.size();
                    t.label.push_back(info[tid].sym);
                    t.left.push_back(-1);
                    t.right.push_back(-1);
                    t.parent.push_back(parent);
                    if (info[tid].l != -1) t.left[v] = emit(info[tid].l, v);
                    if (info[tid].r != -1) t.right[v] = emit(info[tid].r, v);
                    return v;
                };
                emit(id, -1);
                return {t, tuples.size()};
            }
            continue;  // the root role never feeds another combination
        }
        // combine as the left or right child of every future node
        if (role == 0) {
            for (int nr = 0; nr < 3; ++nr) {
                try_combine(id, -1, nr, 1 + size);
                for (int o : rights) try_combine(id, o, nr, 1 + size + info[o].size);
            }
            lefts.push_back(id);
        } else {
            for (int nr = 0; nr < 3; ++nr) {
                try_combine(-1, id, nr, 1 + size);
                for (int o : lefts) try_combine(o, id, nr, 1 + info[o].size + size);
            }
            rights.push_back(id);
        }
    }
    return {std::nullopt, tuples.size()};
}

}  // namespace

ContainmentVerdict decide_containment(const DatalogQuery& q1_in, const DatalogQuery& q2_in,
                                      SchemaKind mode, const ContainmentOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    ContainmentVerdict v;
    auto log = [&](const std::string& s) { v.stage_log.push_back(s); };

    if (q1_in.mode != q2_in.mode)
        throw validation_error("queries must both be unary or both Boolean");
    if (!(*q1_in.alphabet == *q2_in.alphabet))
        throw validation_error("queries must share an alphabet");
    for (const DatalogQuery* q : {&q1_in, &q2_in})
        validate_program(q->program, mode, *q->alphabet);
    bool unordered = mode == SchemaKind::TauU || mode == SchemaKind::TauURootLeaf ||
                     mode == SchemaKind::TauURootLeafDesc;
    bool has_desc = mode == SchemaKind::TauURootLeafDesc || mode == SchemaKind::TauGKChildDesc;
    bool unary = q1_in.mode == QueryMode::Unary;

    DatalogQuery q1 = q1_in, q2 = q2_in;
    q1.schema = q2.schema = mode;
    if (has_desc) {
        q1 = eliminate_desc(q1).query;
        q2 = eliminate_desc(q2).query;
        log("stage=desc_elimination rules1=" + std::to_string(q1.program.rules.size()) +
            " rules2=" + std::to_string(q2.program.rules.size()));
    }
    if (unary) {
        q1 = unary_to_boolean(q1).query;
        q2 = unary_to_boolean(q2).query;
        log("stage=unary_to_boolean alphabet=" + std::to_string(q1.alphabet->size()));
    }
    q1 = prune_query(q1);
    q2 = prune_query(q2);
    q1 = to_tmnf(q1).query;
    q2 = to_tmnf(q2).query;
    log("stage=normal_form rules1=" + std::to_string(q1.program.rules.size()) +
        " rules2=" + std::to_string(q2.program.rules.size()));
    q1 = prune_query(to_binary_query(q1).query);
    q2 = prune_query(to_binary_query(q2).query);
    log("stage=binary_encoding idb1=" + std::to_string(q1.program.idb().size()) +
        " idb2=" + std::to_string(q2.program.idb().size()));

    AlphabetPtr base = q1.alphabet;  // the (possibly marked) label alphabet
    AlphabetPtr hat = hat_alphabet(base);

    // route selection for the No-side
    int n2 = static_cast<int>(q2.program.idb().size());
    long long sigma_n = n2 < 62 ? static_cast<long long>(base->size()) * (1LL << n2) * 4 : -1;
    NoRoute route = opts.route;
    if (route == NoRoute::Auto)
        route = (sigma_n > 0 && sigma_n <= opts.max_sigma_n) ? NoRoute::SetVariables
                                                             : NoRoute::Alternating;

    auto run_product = [&](NoRoute r) {
        MachinePart yes1(build_2ata(q1), opts.max_states, false);
        std::unique_ptr<LazyPart> no2;
        if (r == NoRoute::SetVariables) {
            NoRouteStats ns;
            Nbta a2no = build_a_no(q2, opts.max_sigma_n, opts.max_states, &ns);
            log("stage=a_no route=setvar sigma_n=" + std::to_string(ns.sigma_n_size) +
                " det_states=" + std::to_string(ns.det_states) +
                " states=" + std::to_string(a2no.num_states));
            v.stats["a_no_states"] = std::to_string(a2no.num_states);
            std::vector<int> map(hat->size());
            for (int i = 0; i < hat->size(); ++i) map[i] = hat_base_index(i);
            no2 = std::make_unique<NbtaPart>(std::move(a2no), std::move(map));
        } else {
            log("stage=a_no route=alternating");
            auto part = std::make_unique<MachinePart>(build_2ata(q2), opts.max_states, true);
            no2 = std::move(part);
        }
        auto keep = useful_states(base, yes1, opts.max_states);
        v.stats["yes_useful"] = std::to_string(keep.size());
        auto res = product_witness(base, {&yes1, no2.get()}, opts.max_states, &keep);
        v.stats["product_tuples"] = std::to_string(res.tuples);
        v.stats["yes_summaries"] = std::to_string(yes1.machine.size());
        return res.witness;
    };

    std::optional<BinaryTree> wit_hat = run_product(route);
    v.stats["a_no_route"] = route == NoRoute::SetVariables ? "setvar" : "alternating";
    if (opts.both_routes) {
        NoRoute other =
            route == NoRoute::SetVariables ? NoRoute::Alternating : NoRoute::SetVariables;
        std::optional<BinaryTree> wit2 = run_product(other);
        if (wit_hat.has_value() != wit2.has_value())
            throw internal_error("the two No-automaton routes disagree");
        log("stage=both_routes agreement=yes");
    }

    if (!wit_hat) {
        v.contained = true;
        v.stats["verdict"] = "contained";
        v.stats["elapsed_ms"] = std::to_string(ms_since(t0));
        return v;
    }

    // decode: strip flags, undo the first-child/next-sibling encoding,
    // undo the mark for unary inputs, and canonicalize unordered witnesses
    BinaryTree wb = strip_hat(*wit_hat, base);
    LabeledTree decoded = from_binary(wb);
    int node = -1;
    if (unary) {
        auto [plain, marked_node] = unmark_tree(decoded, q1_in.alphabet);
        decoded = plain;
        node = marked_node;
    }
    if (unordered) {
        decoded.flavor = TreeFlavor::Unordered;
        if (node >= 0) {
            // keep track of the distinguished node through canonicalization
            LabeledTree remarked = mark_node(decoded, node);
            remarked.flavor = TreeFlavor::Unordered;
            LabeledTree canon = canonicalize_unordered(remarked);
            auto [plain, marked_node] = unmark_tree(canon, q1_in.alphabet);
            plain.flavor = TreeFlavor::Unordered;
            decoded = plain;
            node = marked_node;
        } else {
            decoded = canonicalize_unordered(decoded);
        }
    }

    // a NotContained verdict must survive direct evaluation
    if (unary) {
        auto r1 = eval_unary(q1_in, decoded);
        auto r2 = eval_unary(q2_in, decoded);
        if (!r1.count(node) || r2.count(node))
            throw internal_error("witness failed re-evaluation; pipeline bug");
    } else {
        if (!eval_boolean(q1_in, decoded) || eval_boolean(q2_in, decoded))
            throw internal_error("witness failed re-evaluation; pipeline bug");
    }

    v.contained = false;
    v.witness_tree = decoded;
    if (node >= 0) v.witness_node = node;
    v.stats["verdict"] = "not_contained";
    v.stats["witness_nodes"] = std::to_string(decoded.size());
    v.stats["elapsed_ms"] = std::to_string(ms_since(t0));
    return v;
}

OracleOutcome bounded_oracle(const DatalogQuery& q1, const DatalogQuery& q2, int max_nodes,
                             SchemaKind mode, bool parallel) {
    if (q1.mode != q2.mode) throw validation_error("query modes differ");
    bool unordered = mode == SchemaKind::TauU || mode == SchemaKind::TauURootLeaf ||
                     mode == SchemaKind::TauURootLeafDesc;
    TreeFlavor flavor = unordered ? TreeFlavor::Unordered : TreeFlavor::Ordered;
    DatalogQuery a = q1, b = q2;
    a.schema = b.schema = mode;
    OracleOutcome out;
    out.checked_up_to = max_nodes;
    for (int n = 1; n <= max_nodes; ++n) {
        // enumerate size n only (drop the smaller sizes already checked)
        auto trees = enumerate_trees(q1.alphabet, n, flavor);
        trees.erase(std::remove_if(trees.begin(), trees.end(),
                                   [&](const LabeledTree& t) { return t.size() != n; }),
                    trees.end());
        int count = static_cast<int>(trees.size());
        std::vector<int> hit(count, -2);  // -2 = no counterexample, else node (-1 for Boolean)
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
        for (int i = 0; i < count; ++i) {
            if (a.mode == QueryMode::Boolean) {
                if (eval_boolean(a, trees[i]) && !eval_boolean(b, trees[i])) hit[i] = -1;
            } else {
                auto r1 = eval_unary(a, trees[i]);
                if (!r1.empty()) {
                    auto r2 = eval_unary(b, trees[i]);
                    for (int v : r1)
                        if (!r2.count(v)) {
                            hit[i] = v;
                            break;
                        }
                }
            }
        }
        for (int i = 0; i < count; ++i)
            if (hit[i] != -2) {
                out.counterexample_found = true;
                out.tree = trees[i];
                out.node = hit[i] == -1 ? -1 : hit[i];
                return out;
            }
    }
    return out;
}

}  // namespace mdlc
