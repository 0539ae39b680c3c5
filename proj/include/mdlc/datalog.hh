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

#ifndef MDLC_DATALOG_HH
#define MDLC_DATALOG_HH

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdlc/facts.hh"

namespace mdlc {

struct Atom {
    std::string pred;
    std::vector<std::string> vars;  // arity 1 or 2

    bool operator==(const Atom& o) const { return pred == o.pred && vars == o.vars; }
    bool operator<(const Atom& o) const {
        return pred != o.pred ? pred < o.pred : vars < o.vars;
    }
    std::string to_text() const;
};

struct Rule {
    Atom head;
    std::vector<Atom> body;  // non-empty

    std::string to_text() const;
    std::set<std::string> variables() const;
    bool operator==(const Rule& o) const { return head == o.head && body == o.body; }
};

/// A set of rules whose head predicates are all unary. Extensional
/// predicates are the schema's built-ins (lower-case keywords) plus the
/// label family; intensional names are user-chosen and disjoint from them.
struct DatalogProgram {
    std::vector<Rule> rules;

    std::set<std::string> idb() const;
    /// Body predicates that never occur in a head.
    std::set<std::string> edb() const;
    std::string to_text() const;
};

enum class QueryMode { Unary, Boolean };

struct DatalogQuery {
    DatalogProgram program;
    std::string query_pred;
    QueryMode mode = QueryMode::Boolean;
    SchemaKind schema = SchemaKind::TauGKChild;
    AlphabetPtr alphabet;

    std::string to_text() const;
    /// Total atom count over all rules plus one per head; a stable notion
    /// of size for measurements.
    size_t size() const;
};

/// Checks safety (head variables occur in the body), monadic heads, arities,
/// predicate/schema fit, and that the query predicate is intensional.
void validate_query(const DatalogQuery& q);
void validate_program(const DatalogProgram& p, SchemaKind schema, const Alphabet& alphabet);

/// Parses `head :- atom, atom, ... .` lines followed by
/// `QUERY <pred> [BOOLEAN|UNARY]`. '#' starts a comment.
DatalogQuery parse_query(const std::string& text, SchemaKind schema, AlphabetPtr alphabet);
DatalogProgram parse_program(const std::string& text, SchemaKind schema, const Alphabet& alphabet);

/// One application of the immediate consequence operator (returns the
/// input plus everything derivable in a single step).
FactSet immediate_consequence(const DatalogProgram& p, const FactSet& facts);

/// Least fixpoint containing `facts`. Semi-naive by default; the naive
/// variant re-fires every rule on the full set each round and is kept as a
/// reference the fast path is checked against.
FactSet fixpoint(const DatalogProgram& p, const FactSet& facts);
FactSet fixpoint_naive(const DatalogProgram& p, const FactSet& facts);

std::set<int> eval_unary(const DatalogQuery& q, const LabeledTree& tree);
bool eval_boolean(const DatalogQuery& q, const LabeledTree& tree);
std::set<int> eval_unary(const DatalogQuery& q, const BinaryTree& tree);
bool eval_boolean(const DatalogQuery& q, const BinaryTree& tree);

/// Drops rules that can never fire (their bodies mention underivable
/// predicates) and rules whose heads cannot reach the query predicate.
/// Preserves the query's answers on every tree.
DatalogQuery prune_query(const DatalogQuery& q);

}  // namespace mdlc

#endif
