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

#ifndef MDLC_FACTS_HH
#define MDLC_FACTS_HH

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mdlc/tree.hh"

namespace mdlc {

/// The tree schemas, from plain unordered {child} up to the binary-tree
/// schema {lc, rc, root, hnlc, hnrc}. Every schema also carries the
/// label_<symbol> family induced by an alphabet.
enum class SchemaKind {
    TauU,
    TauURootLeaf,
    TauURootLeafDesc,
    TauO,
    TauOChild,
    TauGK,
    TauGKChild,
    TauGKChildDesc,
    TauB,
};

std::string schema_name(SchemaKind k);
/// Accepts names like "tau_u", "tau_u_root_leaf_desc", "tau_gk_child", "tau_b".
SchemaKind schema_from_name(const std::string& name);

/// Built-in predicate names (lower case) allowed by a schema, besides labels.
const std::set<std::string>& schema_unary_builtins(SchemaKind k);
const std::set<std::string>& schema_binary_builtins(SchemaKind k);

bool is_builtin_predicate(const std::string& name);
bool schema_allows(SchemaKind k, const std::string& pred, int arity);
/// Whether trees of this flavor can be viewed under schema k.
bool schema_fits_flavor(SchemaKind k, TreeFlavor flavor);
bool schema_has(SchemaKind k, const std::string& pred);

/// Atomic facts of a tree structure, keyed by predicate name.
struct FactSet {
    int num_nodes = 0;
    std::map<std::string, std::set<int>> unary;
    std::map<std::string, std::set<std::pair<int, int>>> binary;

    bool has_unary(const std::string& p, int a) const {
        auto it = unary.find(p);
        return it != unary.end() && it->second.count(a);
    }
    bool has_binary(const std::string& p, int a, int b) const {
        auto it = binary.find(p);
        return it != binary.end() && it->second.count({a, b});
    }
    size_t total() const;
    bool operator==(const FactSet& o) const {
        return num_nodes == o.num_nodes && unary == o.unary && binary == o.binary;
    }
};

/// The true atoms of the tree under the given schema: labels, child/desc
/// (desc = transitive closure of child), root/leaf, and for ordered trees
/// fc/ns/ls. Throws when the schema does not fit the tree flavor.
FactSet facts_of(const LabeledTree& tree, SchemaKind schema);

/// Binary-tree view: lc/rc, root, and the missing-child predicates
/// hnlc/hnrc computed from the structure.
FactSet facts_of(const BinaryTree& tree, SchemaKind schema);

}  // namespace mdlc

#endif
