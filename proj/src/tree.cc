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

#include "mdlc/tree.hh"

#include <algorithm>
#include <map>

namespace mdlc {

int LabeledTree::depth(int v) const {
    int d = 1;
    while (parent[v] != -1) {
        v = parent[v];
        ++d;
    }
    return d;
}

namespace {

struct TreeParser {
    const std::string& s;
    size_t pos = 0;

    explicit TreeParser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' || s[pos] == '\r'))
            ++pos;
    }

    bool label_char(char c) const {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '!' || c == '|' || c == '-';
    }

    // A label is either a balanced "(...)" group (composite symbols) or a
    // maximal run of plain label characters.
    std::string read_label() {
        skip_ws();
        if (pos >= s.size()) throw parse_error("expected label", pos);
        if (s[pos] == '(') {
            size_t start = pos;
            int depth = 0;
            while (pos < s.size()) {
                if (s[pos] == '(') ++depth;
                if (s[pos] == ')') {
                    --depth;
                    if (depth == 0) {
                        ++pos;
                        return s.substr(start, pos - start);
                    }
                }
                ++pos;
            }
            throw parse_error("unbalanced '(' in label", start);
        }
        size_t start = pos;
        while (pos < s.size() && label_char(s[pos])) ++pos;
        if (pos == start) throw parse_error("expected label", pos);
        return s.substr(start, pos - start);
    }

    int parse_node(LabeledTree& t, int parent) {
        std::string name = read_label();
        int sym = t.alphabet->index_of(name);
        if (sym < 0) throw parse_error("unknown label '" + name + "'", pos);
        int id = t.size();
        t.label.push_back(sym);
        t.children.emplace_back();
        t.parent.push_back(parent);
        skip_ws();
        if (pos < s.size() && s[pos] == '(') {
            ++pos;
            while (true) {
                int child = parse_node(t, id);
                t.children[id].push_back(child);
                skip_ws();
                if (pos < s.size() && s[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (pos < s.size() && s[pos] == ')') {
                    ++pos;
                    break;
                }
                throw parse_error("expected ',' or ')'", pos);
            }
        }
        return id;
    }
};

}  // namespace

LabeledTree parse_tree(const std::string& text, AlphabetPtr alphabet, TreeFlavor flavor) {
    LabeledTree t;
    t.alphabet = std::move(alphabet);
    t.flavor = flavor;
    TreeParser p(text);
    p.parse_node(t, -1);
    p.skip_ws();
    if (p.pos != text.size()) throw parse_error("trailing input after tree", p.pos);
    return t;
}

namespace {
void print_node(const LabeledTree& t, int v, std::string& out) {
    out += t.label_name(v);
    if (!t.children[v].empty()) {
        out += '(';
        for (size_t i = 0; i < t.children[v].size(); ++i) {
            if (i) out += ',';
            print_node(t, t.children[v][i], out);
        }
        out += ')';
    }
}
}  // namespace

std::string tree_to_text(const LabeledTree& t) {
    std::string out;
    print_node(t, t.root(), out);
    return out;
}

namespace {
// Encodes the sibling list sibs[i..] as a right-spine chain; returns the id
// of the chain head. Ids come out in preorder of the binary tree.
int encode_siblings(const LabeledTree& t, const std::vector<int>& sibs, size_t i, int bparent,
                    BinaryTree& b) {
    int v = sibs[i];
    int id = b.size();
    b.label.push_back(t.label[v]);
    b.left.push_back(-1);
    b.right.push_back(-1);
    b.parent.push_back(bparent);
    if (!t.children[v].empty()) b.left[id] = encode_siblings(t, t.children[v], 0, id, b);
    if (i + 1 < sibs.size()) b.right[id] = encode_siblings(t, sibs, i + 1, id, b);
    return id;
}
}  // namespace

BinaryTree to_binary(const LabeledTree& t) {
    if (t.flavor != TreeFlavor::Ordered)
        throw validation_error("binary encoding requires an ordered tree");
    BinaryTree b;
    b.alphabet = t.alphabet;
    std::vector<int> roots = {t.root()};
    encode_siblings(t, roots, 0, -1, b);
    return b;
}

namespace {
void from_binary_rec(const BinaryTree& b, int v, LabeledTree& t, int parent) {
    // v and its right-sibling chain become children of `parent`.
    while (v != -1) {
        int id = t.size();
        t.label.push_back(b.label[v]);
        t.children.emplace_back();
        t.parent.push_back(parent);
        if (parent != -1) t.children[parent].push_back(id);
        if (b.left[v] != -1) from_binary_rec(b, b.left[v], t, id);
        v = b.right[v];
    }
}
}  // namespace

LabeledTree from_binary(const BinaryTree& b) {
    if (b.right[b.root()] != -1)
        throw validation_error("RootHasRightChild: no unranked preimage exists");
    LabeledTree t;
    t.alphabet = b.alphabet;
    t.flavor = TreeFlavor::Ordered;
    int id = 0;
    t.label.push_back(b.label[b.root()]);
    t.children.emplace_back();
    t.parent.push_back(-1);
    if (b.left[b.root()] != -1) from_binary_rec(b, b.left[b.root()], t, id);
    return t;
}

BinaryTree extend_hat(const BinaryTree& b) {
    BinaryTree out = b;
    out.alphabet = hat_alphabet(b.alphabet);
    for (int v = 0; v < b.size(); ++v) {
        unsigned flags = 0;
        if (b.parent[v] == -1) flags |= kHatRoot;
        if (b.left[v] == -1) flags |= kHatHnlc;
        if (b.right[v] == -1) flags |= kHatHnrc;
        if (b.parent[v] != -1 && b.left[b.parent[v]] == v) flags |= kHatIslc;
        if (b.parent[v] != -1 && b.right[b.parent[v]] == v) flags |= kHatIsrc;
        out.label[v] = hat_index(b.label[v], flags);
    }
    return out;
}

BinaryTree strip_hat(const BinaryTree& b, const AlphabetPtr& base) {
    BinaryTree out = b;
    out.alphabet = base;
    for (int v = 0; v < b.size(); ++v) {
        auto [name, flags] = split_hat_symbol(b.label_name(v));
        int idx = base->index_of(name);
        if (idx < 0) throw validation_error("label '" + name + "' not in base alphabet");
        out.label[v] = idx;
    }
    return out;
}

LabeledTree mark_node(const LabeledTree& t, int v) {
    if (v < 0 || v >= t.size()) throw validation_error("unknown node " + std::to_string(v));
    LabeledTree out = t;
    out.alphabet = marked_alphabet(t.alphabet);
    for (int u = 0; u < t.size(); ++u)
        out.label[u] = 2 * t.label[u] + (u == v ? 1 : 0);
    return out;
}

std::pair<LabeledTree, int> unmark_tree(const LabeledTree& t, const AlphabetPtr& base) {
    LabeledTree out = t;
    out.alphabet = base;
    int marked = -1;
    for (int u = 0; u < t.size(); ++u) {
        auto [name, mark] = split_marked_symbol(t.label_name(u));
        int idx = base->index_of(name);
        if (idx < 0) throw validation_error("label '" + name + "' not in base alphabet");
        out.label[u] = idx;
        if (mark) {
            if (marked != -1) throw validation_error("more than one marked node");
            marked = u;
        }
    }
    if (marked == -1) throw validation_error("no marked node");
    return {out, marked};
}

namespace {
void print_binary_node(const BinaryTree& b, int v, std::string& out) {
    out += b.label_name(v);
    if (b.left[v] != -1 || b.right[v] != -1) {
        out += '[';
        if (b.left[v] != -1) print_binary_node(b, b.left[v], out);
        else out += '.';
        out += ';';
        if (b.right[v] != -1) print_binary_node(b, b.right[v], out);
        else out += '.';
        out += ']';
    }
}

std::string canonical_key(const LabeledTree& t, int v) {
    std::string out = std::to_string(t.label[v]);
    out += '(';
    std::vector<std::string> keys;
    for (int c : t.children[v]) keys.push_back(canonical_key(t, c));
    std::sort(keys.begin(), keys.end());
    for (const auto& k : keys) out += k + ",";
    out += ')';
    return out;
}

void copy_sorted(const LabeledTree& src, int v, LabeledTree& dst, int parent) {
    int id = dst.size();
    dst.label.push_back(src.label[v]);
    dst.children.emplace_back();
    dst.parent.push_back(parent);
    if (parent != -1) dst.children[parent].push_back(id);
    std::vector<std::pair<std::string, int>> order;
    for (int c : src.children[v]) order.emplace_back(canonical_key(src, c), c);
    std::sort(order.begin(), order.end());
    for (const auto& [key, c] : order) copy_sorted(src, c, dst, id);
}
}  // namespace

std::string binary_tree_to_text(const BinaryTree& b) {
    std::string out;
    print_binary_node(b, b.root(), out);
    return out;
}

LabeledTree canonicalize_unordered(const LabeledTree& t) {
    LabeledTree out;
    out.alphabet = t.alphabet;
    out.flavor = t.flavor;
    copy_sorted(t, t.root(), out, -1);
    return out;
}

namespace {

// Ordered trees with exactly n nodes, unlabeled shapes represented as
// children() structures; labels are layered on top afterwards.
struct Shape {
    std::vector<std::vector<int>> children;
    std::vector<int> parent;
};

void append_shape(Shape& dst, const Shape& src, int parent) {
    int base = static_cast<int>(dst.children.size());
    for (size_t v = 0; v < src.children.size(); ++v) {
        std::vector<int> kids;
        for (int c : src.children[v]) kids.push_back(c + base);
        dst.children.push_back(std::move(kids));
        dst.parent.push_back(src.parent[v] == -1 ? parent : src.parent[v] + base);
    }
    if (parent >= 0) dst.children[parent].push_back(base);
}

// All ordered shapes with exactly n nodes: a root plus a forest of n-1 nodes.
std::vector<Shape> ordered_shapes(int n, std::map<int, std::vector<Shape>>& memo);

std::vector<std::vector<Shape>> ordered_forests(int total, std::map<int, std::vector<Shape>>& memo) {
    std::vector<std::vector<Shape>> out;
    if (total == 0) {
        out.emplace_back();
        return out;
    }
    for (int first = 1; first <= total; ++first) {
        auto firsts = ordered_shapes(first, memo);
        auto rests = ordered_forests(total - first, memo);
        for (const auto& f : firsts)
            for (const auto& rest : rests) {
                std::vector<Shape> seq;
                seq.push_back(f);
                seq.insert(seq.end(), rest.begin(), rest.end());
                out.push_back(std::move(seq));
            }
    }
    return out;
}

std::vector<Shape> ordered_shapes(int n, std::map<int, std::vector<Shape>>& memo) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    std::vector<Shape> out;
    for (auto& forest : ordered_forests(n - 1, memo)) {
        Shape s;
        s.children.push_back({});
        s.parent.push_back(-1);
        for (const auto& sub : forest) append_shape(s, sub, 0);
        out.push_back(std::move(s));
    }
    memo[n] = out;
    return out;
}

void label_all(const Shape& shape, const AlphabetPtr& alphabet, TreeFlavor flavor,
               std::vector<LabeledTree>& out) {
    int n = static_cast<int>(shape.children.size());
    int k = alphabet->size();
    std::vector<int> labels(n, 0);
    while (true) {
        LabeledTree t;
        t.alphabet = alphabet;
        t.flavor = flavor;
        t.label = labels;
        t.children = shape.children;
        t.parent = shape.parent;
        out.push_back(std::move(t));
        int i = n - 1;
        while (i >= 0 && labels[i] == k - 1) labels[i--] = 0;
        if (i < 0) break;
        ++labels[i];
    }
}

// Unordered: enumerate canonical representatives directly, as a root label
// plus a canonically sorted multiset of canonical subtrees.
std::vector<LabeledTree> unordered_exact(int n, const AlphabetPtr& alphabet,
                                         std::map<int, std::vector<LabeledTree>>& memo);

void unordered_child_combos(int remaining, size_t min_index,
                            const std::vector<std::pair<std::string, LabeledTree>>& pool,
                            std::vector<const LabeledTree*>& current,
                            std::vector<std::vector<const LabeledTree*>>& out) {
    if (remaining == 0) {
        out.push_back(current);
        return;
    }
    for (size_t i = min_index; i < pool.size(); ++i) {
        int sz = pool[i].second.size();
        if (sz > remaining) continue;
        current.push_back(&pool[i].second);
        unordered_child_combos(remaining - sz, i, pool, current, out);
        current.pop_back();
    }
}

std::vector<LabeledTree> unordered_exact(int n, const AlphabetPtr& alphabet,
                                         std::map<int, std::vector<LabeledTree>>& memo) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    std::vector<LabeledTree> out;
    // pool of smaller canonical trees with their keys, in a fixed order
    std::vector<std::pair<std::string, LabeledTree>> pool;
    for (int m = 1; m < n; ++m)
        for (const auto& t : unordered_exact(m, alphabet, memo))
            pool.emplace_back(canonical_key(t, 0), t);
    std::sort(pool.begin(), pool.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (int root_label = 0; root_label < alphabet->size(); ++root_label) {
        std::vector<std::vector<const LabeledTree*>> combos;
        std::vector<const LabeledTree*> current;
        unordered_child_combos(n - 1, 0, pool, current, combos);
        for (const auto& combo : combos) {
            LabeledTree t;
            t.alphabet = alphabet;
            t.flavor = TreeFlavor::Unordered;
            t.label.push_back(root_label);
            t.children.emplace_back();
            t.parent.push_back(-1);
            for (const LabeledTree* sub : combo) {
                int base = t.size();
                for (int v = 0; v < sub->size(); ++v) {
                    t.label.push_back(sub->label[v]);
                    std::vector<int> kids;
                    for (int c : sub->children[v]) kids.push_back(c + base);
                    t.children.push_back(std::move(kids));
                    t.parent.push_back(sub->parent[v] == -1 ? 0 : sub->parent[v] + base);
                }
                t.children[0].push_back(base);
            }
            out.push_back(std::move(t));
        }
    }
    memo[n] = out;
    return out;
}

}  // namespace

std::vector<LabeledTree> enumerate_trees(const AlphabetPtr& alphabet, int max_nodes,
                                         TreeFlavor flavor) {
    if (max_nodes < 1) throw validation_error("max_nodes must be >= 1");
    std::vector<LabeledTree> out;
    if (flavor == TreeFlavor::Ordered) {
        std::map<int, std::vector<Shape>> memo;
        for (int n = 1; n <= max_nodes; ++n)
            for (const auto& shape : ordered_shapes(n, memo)) label_all(shape, alphabet, flavor, out);
    } else {
        std::map<int, std::vector<LabeledTree>> memo;
        for (int n = 1; n <= max_nodes; ++n)
            for (const auto& t : unordered_exact(n, alphabet, memo)) out.push_back(t);
    }
    return out;
}

namespace {
struct BinShape {
    std::vector<int> left, right, parent;
};

std::vector<BinShape> binary_shapes(int n, std::map<int, std::vector<BinShape>>& memo) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    std::vector<BinShape> out;
    if (n == 0) {
        memo[n] = out;
        return out;
    }
    if (n == 1) {
        out.push_back({{-1}, {-1}, {-1}});
        memo[n] = out;
        return out;
    }
    for (int nl = 0; nl <= n - 1; ++nl) {
        int nr = n - 1 - nl;
        auto lefts = binary_shapes(nl, memo);
        auto rights = binary_shapes(nr, memo);
        auto place = [&](const BinShape* l, const BinShape* r) {
            BinShape s;
            s.left.push_back(-1);
            s.right.push_back(-1);
            s.parent.push_back(-1);
            if (l) {
                int base = static_cast<int>(s.left.size());
                for (size_t v = 0; v < l->left.size(); ++v) {
                    s.left.push_back(l->left[v] == -1 ? -1 : l->left[v] + base);
                    s.right.push_back(l->right[v] == -1 ? -1 : l->right[v] + base);
                    s.parent.push_back(l->parent[v] == -1 ? 0 : l->parent[v] + base);
                }
                s.left[0] = base;
            }
            if (r) {
                int base = static_cast<int>(s.left.size());
                for (size_t v = 0; v < r->left.size(); ++v) {
                    s.left.push_back(r->left[v] == -1 ? -1 : r->left[v] + base);
                    s.right.push_back(r->right[v] == -1 ? -1 : r->right[v] + base);
                    s.parent.push_back(r->parent[v] == -1 ? 0 : r->parent[v] + base);
                }
                s.right[0] = base;
            }
            out.push_back(std::move(s));
        };
        if (nl == 0 && nr == 0) place(nullptr, nullptr);
        else if (nl == 0)
            for (const auto& r : rights) place(nullptr, &r);
        else if (nr == 0)
            for (const auto& l : lefts) place(&l, nullptr);
        else
            for (const auto& l : lefts)
                for (const auto& r : rights) place(&l, &r);
    }
    memo[n] = out;
    return out;
}
}  // namespace

std::vector<BinaryTree> enumerate_binary_trees(const AlphabetPtr& alphabet, int max_nodes) {
    if (max_nodes < 1) throw validation_error("max_nodes must be >= 1");
    std::vector<BinaryTree> out;
    std::map<int, std::vector<BinShape>> memo;
    int k = alphabet->size();
    for (int n = 1; n <= max_nodes; ++n) {
        for (const auto& shape : binary_shapes(n, memo)) {
            std::vector<int> labels(n, 0);
            while (true) {
                BinaryTree b;
                b.alphabet = alphabet;
                b.label = labels;
                b.left = shape.left;
                b.right = shape.right;
                b.parent = shape.parent;
                out.push_back(std::move(b));
                int i = n - 1;
                while (i >= 0 && labels[i] == k - 1) labels[i--] = 0;
                if (i < 0) break;
                ++labels[i];
            }
        }
    }
    return out;
}

}  // namespace mdlc
