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

#ifndef MDLC_ALPHABET_HH
#define MDLC_ALPHABET_HH

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdlc/util.hh"

namespace mdlc {

/// Structural flags carried by nodes of a flag-extended binary tree.
/// Bit order is fixed; it is part of the rendered symbol names.
enum HatFlag : unsigned {
    kHatRoot = 1u << 0,
    kHatHnlc = 1u << 1,
    kHatHnrc = 1u << 2,
    kHatIslc = 1u << 3,
    kHatIsrc = 1u << 4,
};

constexpr unsigned kHatFlagCount = 5;

/// Finite label alphabet. Symbols are distinct non-empty strings over
/// [a-zA-Z0-9_,()!|-]. Derived alphabets (products with marks, structural
/// flags, or bit vectors) render the product structurally in the symbol
/// name so downstream automata stay over flat alphabets.
class Alphabet {
public:
    explicit Alphabet(std::vector<std::string> symbols);

    int size() const { return static_cast<int>(symbols_.size()); }
    const std::string& symbol(int i) const { return symbols_.at(i); }
    const std::vector<std::string>& symbols() const { return symbols_; }
    bool contains(const std::string& s) const { return index_.count(s) != 0; }
    /// Returns -1 when the symbol is unknown.
    int index_of(const std::string& s) const;

    bool operator==(const Alphabet& o) const { return symbols_ == o.symbols_; }

    static bool valid_symbol(const std::string& s);

private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, int> index_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

AlphabetPtr make_alphabet(std::vector<std::string> symbols);

/// Parses one label per line; '#' starts a comment.
AlphabetPtr parse_alphabet(const std::string& text);

// -- Marked alphabet: base x {0,1}, rendered "(a,0)" / "(a,1)". ------------

AlphabetPtr marked_alphabet(const AlphabetPtr& base);
std::string marked_symbol(const std::string& base, bool mark);
/// Splits "(a,1)" into {"a", true}; throws validation_error otherwise.
std::pair<std::string, bool> split_marked_symbol(const std::string& sym);

// -- Flag-extended alphabet: base x 2^{Root,Hnlc,Hnrc,Islc,Isrc}. ----------
// Rendered "(a,Root|Hnlc)"; the empty flag set renders as "(a,-)".

AlphabetPtr hat_alphabet(const AlphabetPtr& base);
std::string hat_symbol(const std::string& base, unsigned flags);
std::pair<std::string, unsigned> split_hat_symbol(const std::string& sym);
/// Index arithmetic: hat index = base_index * 32 + flags.
inline int hat_index(int base_index, unsigned flags) { return base_index * 32 + static_cast<int>(flags); }
inline int hat_base_index(int hat_idx) { return hat_idx / 32; }
inline unsigned hat_flags(int hat_idx) { return static_cast<unsigned>(hat_idx % 32); }

// -- Root/leaf-annotated alphabet: base x 2^{Root,Leaf}. --------------------
// Rendered "(a,-)", "(a,Root)", "(a,Leaf)", "(a,Root|Leaf)".

AlphabetPtr root_leaf_alphabet(const AlphabetPtr& base);
std::string root_leaf_symbol(const std::string& base, bool is_root, bool is_leaf);
/// Returns {base, is_root, is_leaf}.
std::tuple<std::string, bool, bool> split_root_leaf_symbol(const std::string& sym);

// -- Set-variable alphabet: base x {0,1}^n x {0,1}^2. -----------------------
// Rendered "(a,0110,01)". Index arithmetic:
//   index = (base_index * 2^n + gamma) * 4 + z, z = z1*2 + z2.

AlphabetPtr setvar_alphabet(const AlphabetPtr& base, int n, long long max_symbols);
std::string setvar_symbol(const std::string& base, uint64_t gamma, int n, bool z1, bool z2);

}  // namespace mdlc

#endif
