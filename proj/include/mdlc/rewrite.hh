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

#ifndef MDLC_REWRITE_HH
#define MDLC_REWRITE_HH

#include "mdlc/datalog.hh"

namespace mdlc {

/// A rewritten query plus a transformation log, one rewrite step per line.
struct RewriteResult {
    DatalogQuery query;
    std::vector<std::string> log;
};

// -- Rule graphs -------------------------------------------------------------

/// Directed multigraph of a rule body: one vertex per variable, one edge per
/// binary body atom from its first to its second argument.
struct RuleGraph {
    struct Edge {
        int from, to;
        std::string pred;
        int atom_index;
    };
    std::vector<std::string> vars;  // first-occurrence order: head, then body
    std::vector<Edge> edges;

    int var_index(const std::string& v) const;
};

RuleGraph build_rule_graph(const Rule& r);
bool has_directed_cycle(const RuleGraph& g);
/// Cycle in the shadow (undirected) multigraph; parallel edges count.
bool has_undirected_cycle(const RuleGraph& g);

// -- Tree-marking normal form ------------------------------------------------

/// The three rule shapes of the normal form:
///   BinaryForward   X(x) <- R(x,y), Y(y)
///   BinaryBackward  X(x) <- R(y,x), Y(y)
///   UnaryUnary      X(x) <- Y(x), Z(x)
enum class TmnfForm { BinaryForward, BinaryBackward, UnaryUnary, NotTmnf };

TmnfForm tmnf_form(const Rule& r);
bool is_tmnf(const DatalogProgram& p);
/// Per-rule tags; throws validation_error when some rule matches no form.
std::vector<TmnfForm> tmnf_certificate(const DatalogProgram& p);

// -- Rewritings --------------------------------------------------------------

/// Unary query -> Boolean query over the marked alphabet: the answer nodes
/// of q on T correspond exactly to the marked trees accepted by the result,
/// which also checks that exactly one node carries a mark.
RewriteResult unary_to_boolean(const DatalogQuery& q);

/// Equivalent program in tree-marking normal form without child atoms.
/// Desc must have been eliminated beforehand.
RewriteResult to_tmnf(const DatalogQuery& q);

/// Boolean query on ordered unranked trees -> Boolean query on their
/// first-child/next-sibling encodings (renames fc,ns,leaf,ls to
/// lc,rc,hnlc,hnrc and restricts to encodings via a hnrc guard at the
/// root). Preserves the normal form.
RewriteResult to_binary_query(const DatalogQuery& q);

/// Reduction dropping root/leaf from the schema by moving them into the
/// labels; the second query additionally accepts every inconsistently
/// labeled tree, which preserves the containment status of the pair.
std::pair<RewriteResult, RewriteResult> eliminate_root_leaf(const DatalogQuery& q1,
                                                            const DatalogQuery& q2);

/// Equivalent query in which every rule's shadow graph is a forest.
RewriteResult make_acyclic(const DatalogQuery& q);

/// Decomposes one acyclic rule into rules of the three shapes
///   X(x) <- R(y,x),Y(y)   X(x) <- R(x,y),Y(y)   X(x) <- Y(x),Z(z)
/// (z need not equal x). Fresh predicate names come from `names`.
std::vector<Rule> decompose_acyclic_rule(const Rule& r, const Alphabet& alphabet, NameGen& names,
                                         std::vector<std::string>* log = nullptr);

/// Convenience wrapper decomposing every rule of a query.
RewriteResult decompose_query(const DatalogQuery& q);

/// Equivalent query without desc atoms (worst-case exponentially larger).
RewriteResult eliminate_desc(const DatalogQuery& q);

}  // namespace mdlc

#endif
