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

#include "mdlc/facts.hh"

#include <algorithm>

namespace mdlc {

std::string schema_name(SchemaKind k) {
    switch (k) {
        case SchemaKind::TauU: return "tau_u";
        case SchemaKind::TauURootLeaf: return "tau_u_root_leaf";
        case SchemaKind::TauURootLeafDesc: return "tau_u_root_leaf_desc";
        case SchemaKind::TauO: return "tau_o";
        case SchemaKind::TauOChild: return "tau_o_child";
        case SchemaKind::TauGK: return "tau_gk";
        case SchemaKind::TauGKChild: return "tau_gk_child";
        case SchemaKind::TauGKChildDesc: return "tau_gk_child_desc";
        case SchemaKind::TauB: return "tau_b";
    }
    return "?";
}

SchemaKind schema_from_name(const std::string& name) {
    for (SchemaKind k : {SchemaKind::TauU, SchemaKind::TauURootLeaf, SchemaKind::TauURootLeafDesc,
                         SchemaKind::TauO, SchemaKind::TauOChild, SchemaKind::TauGK,
                         SchemaKind::TauGKChild, SchemaKind::TauGKChildDesc, SchemaKind::TauB})
        if (schema_name(k) == name) return k;
    throw validation_error("unknown schema '" + name + "'");
}

const std::set<std::string>& schema_unary_builtins(SchemaKind k) {
    static const std::set<std::string> none;
    static const std::set<std::string> root_leaf = {"root", "leaf"};
    static const std::set<std::string> gk = {"root", "leaf", "ls"};
    static const std::set<std::string> b = {"root", "hnlc", "hnrc"};
    switch (k) {
        case SchemaKind::TauU:
        case SchemaKind::TauO: return none;
        case SchemaKind::TauURootLeaf:
        case SchemaKind::TauURootLeafDesc: return root_leaf;
        case SchemaKind::TauOChild: return none;
        case SchemaKind::TauGK:
        case SchemaKind::TauGKChild:
        case SchemaKind::TauGKChildDesc: return gk;
        case SchemaKind::TauB: return b;
    }
    return none;
}

const std::set<std::string>& schema_binary_builtins(SchemaKind k) {
    static const std::set<std::string> u = {"child"};
    static const std::set<std::string> ud = {"child", "desc"};
    static const std::set<std::string> o = {"fc", "ns"};
    static const std::set<std::string> oc = {"fc", "ns", "child"};
    static const std::set<std::string> ocd = {"fc", "ns", "child", "desc"};
    static const std::set<std::string> b = {"lc", "rc"};
    switch (k) {
        case SchemaKind::TauU:
        case SchemaKind::TauURootLeaf: return u;
        case SchemaKind::TauURootLeafDesc: return ud;
        case SchemaKind::TauO: return o;
        case SchemaKind::TauOChild: return oc;
        case SchemaKind::TauGK: return o;
        case SchemaKind::TauGKChild: return oc;
        case SchemaKind::TauGKChildDesc: return ocd;
        case SchemaKind::TauB: return b;
    }
    return u;
}

bool is_builtin_predicate(const std::string& name) {
    static const std::set<std::string> all = {"root", "leaf", "ls",   "hnlc", "hnrc", "child",
                                              "desc", "fc",   "ns",   "lc",   "rc"};
    if (all.count(name)) return true;
    return name.rfind("label_", 0) == 0;
}

bool schema_has(SchemaKind k, const std::string& pred) {
    return schema_unary_builtins(k).count(pred) || schema_binary_builtins(k).count(pred);
}

bool schema_allows(SchemaKind k, const std::string& pred, int arity) {
    if (pred.rfind("label_", 0) == 0) return arity == 1;
    if (arity == 1) return schema_unary_builtins(k).count(pred) != 0;
    return schema_binary_builtins(k).count(pred) != 0;
}

bool schema_fits_flavor(SchemaKind k, TreeFlavor flavor) {
    switch (k) {
        case SchemaKind::TauU:
        case SchemaKind::TauURootLeaf:
        case SchemaKind::TauURootLeafDesc:
            return true;  // unordered schemas read any tree, ignoring order
        case SchemaKind::TauO:
        case SchemaKind::TauOChild:
        case SchemaKind::TauGK:
        case SchemaKind::TauGKChild:
        case SchemaKind::TauGKChildDesc:
            return flavor == TreeFlavor::Ordered;
        case SchemaKind::TauB:
            return false;  // binary trees use the BinaryTree overload
    }
    return false;
}

size_t FactSet::total() const {
    size_t n = 0;
    for (const auto& [p, s] : unary) n += s.size();
    for (const auto& [p, s] : binary) n += s.size();
    return n;
}

FactSet facts_of(const LabeledTree& tree, SchemaKind schema) {
    if (schema == SchemaKind::TauB)
        throw validation_error("tau_b facts require a binary tree");
    if (!schema_fits_flavor(schema, tree.flavor))
        throw validation_error("schema " + schema_name(schema) + " does not fit an unordered tree");
    FactSet f;
    f.num_nodes = tree.size();
    const auto& un = schema_unary_builtins(schema);
    const auto& bin = schema_binary_builtins(schema);
    for (int v = 0; v < tree.size(); ++v) {
        f.unary["label_" + tree.label_name(v)].insert(v);
        if (un.count("root") && tree.parent[v] == -1) f.unary["root"].insert(v);
        if (un.count("leaf") && tree.is_leaf(v)) f.unary["leaf"].insert(v);
        if (un.count("ls")) {
            // last sibling = no next sibling; the root qualifies
            int p = tree.parent[v];
            if (p == -1 || tree.children[p].back() == v) f.unary["ls"].insert(v);
        }
        if (bin.count("child"))
            for (int c : tree.children[v]) f.binary["child"].insert({v, c});
        if (bin.count("fc") && !tree.children[v].empty())
            f.binary["fc"].insert({v, tree.children[v][0]});
        if (bin.count("ns"))
            for (size_t i = 0; i + 1 < tree.children[v].size(); ++i)
                f.binary["ns"].insert({tree.children[v][i], tree.children[v][i + 1]});
    }
    if (bin.count("desc")) {
        auto& desc = f.binary["desc"];
        for (int v = 0; v < tree.size(); ++v)
            for (int a = tree.parent[v]; a != -1; a = tree.parent[a]) desc.insert({a, v});
    }
    return f;
}

FactSet facts_of(const BinaryTree& tree, SchemaKind schema) {
    if (schema != SchemaKind::TauB)
        throw validation_error("binary trees carry only tau_b facts");
    FactSet f;
    f.num_nodes = tree.size();
    for (int v = 0; v < tree.size(); ++v) {
        f.unary["label_" + tree.label_name(v)].insert(v);
        if (tree.parent[v] == -1) f.unary["root"].insert(v);
        if (tree.left[v] == -1) f.unary["hnlc"].insert(v);
        if (tree.right[v] == -1) f.unary["hnrc"].insert(v);
        if (tree.left[v] != -1) f.binary["lc"].insert({v, tree.left[v]});
        if (tree.right[v] != -1) f.binary["rc"].insert({v, tree.right[v]});
    }
    return f;
}

}  // namespace mdlc
