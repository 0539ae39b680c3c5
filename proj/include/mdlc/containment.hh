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

#ifndef MDLC_CONTAINMENT_HH
#define MDLC_CONTAINMENT_HH

#include <map>
#include <optional>

#include "mdlc/query_automata.hh"

namespace mdlc {

enum class NoRoute { Auto, SetVariables, Alternating };

struct ContainmentOptions {
    size_t max_states = 2000000;     // product tuples / conversion summaries
    long long max_sigma_n = 4096;    // set-variable alphabet cap
    NoRoute route = NoRoute::Auto;
    bool both_routes = false;        // cross-build the No-automaton both ways
};

struct ContainmentVerdict {
    bool contained = false;
    std::optional<LabeledTree> witness_tree;   // decoded, canonical ids
    std::optional<int> witness_node;           // for unary inputs
    std::vector<std::string> stage_log;
    std::map<std::string, std::string> stats;  // key=value lines
};

/// Decides q1 <= q2 over all trees of the given schema mode by compiling
/// both queries to automata on encoded binary trees: the Yes-language of q1
/// through the alternating route and the No-language of q2 through either
/// route, then an emptiness check of the product. NotContained verdicts
/// carry a minimum-size witness that is re-verified by direct evaluation
/// before being returned.
ContainmentVerdict decide_containment(const DatalogQuery& q1, const DatalogQuery& q2,
                                      SchemaKind mode, const ContainmentOptions& opts = {});

struct OracleOutcome {
    bool counterexample_found = false;
    LabeledTree tree;      // valid when found
    int node = -1;         // for unary queries
    int checked_up_to = 0;
};

/// Exhaustive ground truth up to max_nodes: evaluates both queries on every
/// enumerated tree (and node, for unary queries). Sound for refutation,
/// bounded for confirmation. Sweeps sizes in order and returns the first
/// counterexample in canonical enumeration order.
OracleOutcome bounded_oracle(const DatalogQuery& q1, const DatalogQuery& q2, int max_nodes,
                             SchemaKind mode, bool parallel = true);

}  // namespace mdlc

#endif
