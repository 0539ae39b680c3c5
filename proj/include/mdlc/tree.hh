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

#ifndef MDLC_TREE_HH
#define MDLC_TREE_HH

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mdlc/alphabet.hh"

namespace mdlc {

enum class TreeFlavor { Unordered, Ordered };

/// Finite rooted labeled tree. Node ids are assigned in preorder; the root
/// is always node 0. Unordered trees record a sibling order too, but
/// evaluation of unordered-schema queries never reads it.
struct LabeledTree {
    AlphabetPtr alphabet;
    TreeFlavor flavor = TreeFlavor::Ordered;
    std::vector<int> label;                   // node -> symbol index
    std::vector<std::vector<int>> children;   // node -> ordered children
    std::vector<int> parent;                  // node -> parent, -1 at root

    int size() const { return static_cast<int>(label.size()); }
    int root() const { return 0; }
    bool is_leaf(int v) const { return children[v].empty(); }
    const std::string& label_name(int v) const { return alphabet->symbol(label[v]); }
    int depth(int v) const;  // root has depth 1
};

/// Rooted binary tree with optional left/right children, preorder ids.
struct BinaryTree {
    AlphabetPtr alphabet;
    std::vector<int> label;
    std::vector<int> left;    // -1 = absent
    std::vector<int> right;   // -1 = absent
    std::vector<int> parent;  // -1 at root

    int size() const { return static_cast<int>(label.size()); }
    int root() const { return 0; }
    const std::string& label_name(int v) const { return alphabet->symbol(label[v]); }
};

/// Parses the parenthesized term grammar
///   tree := LABEL | LABEL '(' tree (',' tree)* ')'
/// Whitespace is insignificant. A label that starts with '(' extends to the
/// matching ')' so that composite labels like "(a,1)" parse unambiguously.
LabeledTree parse_tree(const std::string& text, AlphabetPtr alphabet,
                       TreeFlavor flavor = TreeFlavor::Ordered);

std::string tree_to_text(const LabeledTree& t);

/// First-child/next-sibling encoding of an ordered tree. Node ids are
/// reassigned in preorder of the binary tree; labels and node count carry
/// over, and the root never has a right child.
BinaryTree to_binary(const LabeledTree& t);

/// Inverse of the first-child/next-sibling encoding. The preimage exists
/// exactly when the root has no right child.
LabeledTree from_binary(const BinaryTree& b);

/// Re-labels over the flag-extended alphabet; each node's flag set records
/// exactly its structural position (root / missing children / which child).
BinaryTree extend_hat(const BinaryTree& b);

/// Drops the structural flags again.
BinaryTree strip_hat(const BinaryTree& b, const AlphabetPtr& base);

/// Re-labels over base x {0,1} with exactly node v marked 1.
LabeledTree mark_node(const LabeledTree& t, int v);

/// Finds the unique marked node and restores base labels.
std::pair<LabeledTree, int> unmark_tree(const LabeledTree& t, const AlphabetPtr& base);

std::string binary_tree_to_text(const BinaryTree& b);

/// Sorts children recursively into a canonical order (used to report
/// unordered witnesses deterministically).
LabeledTree canonicalize_unordered(const LabeledTree& t);

/// All trees with at most max_nodes nodes, each exactly once, smaller sizes
/// first and in a fixed canonical order. For the unordered flavor, one
/// representative per isomorphism class under sibling permutation.
std::vector<LabeledTree> enumerate_trees(const AlphabetPtr& alphabet, int max_nodes,
                                         TreeFlavor flavor);

/// All binary trees with at most max_nodes nodes, each exactly once.
std::vector<BinaryTree> enumerate_binary_trees(const AlphabetPtr& alphabet, int max_nodes);

}  // namespace mdlc

#endif
