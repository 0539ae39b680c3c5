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

#include "mdlc/alphabet.hh"

#include <array>
#include <sstream>

namespace mdlc {

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

bool Alphabet::valid_symbol(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_' || c == ',' || c == '(' || c == ')' || c == '!' || c == '|' || c == '-';
        if (!ok) return false;
    }
    return true;
}

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw validation_error("alphabet must be non-empty");
    for (size_t i = 0; i < symbols_.size(); ++i) {
        const std::string& s = symbols_[i];
        if (!valid_symbol(s)) throw validation_error("invalid label name: '" + s + "'");
        if (!index_.emplace(s, static_cast<int>(i)).second)
            throw validation_error("duplicate label name: '" + s + "'");
    }
}

int Alphabet::index_of(const std::string& s) const {
    auto it = index_.find(s);
    return it == index_.end() ? -1 : it->second;
}

AlphabetPtr make_alphabet(std::vector<std::string> symbols) {
    return std::make_shared<Alphabet>(std::move(symbols));
}

AlphabetPtr parse_alphabet(const std::string& text) {
    std::vector<std::string> symbols;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        for (const auto& tok : split_ws(line)) symbols.push_back(tok);
    }
    return make_alphabet(std::move(symbols));
}

std::string marked_symbol(const std::string& base, bool mark) {
    return "(" + base + "," + (mark ? "1" : "0") + ")";
}

AlphabetPtr marked_alphabet(const AlphabetPtr& base) {
    std::vector<std::string> out;
    out.reserve(base->size() * 2);
    for (const auto& s : base->symbols()) {
        out.push_back(marked_symbol(s, false));
        out.push_back(marked_symbol(s, true));
    }
    return make_alphabet(std::move(out));
}

std::pair<std::string, bool> split_marked_symbol(const std::string& sym) {
    if (sym.size() < 5 || sym.front() != '(' || sym.back() != ')')
        throw validation_error("not a marked symbol: '" + sym + "'");
    auto comma = sym.rfind(',');
    if (comma == std::string::npos || comma + 2 != sym.size() - 1)
        throw validation_error("not a marked symbol: '" + sym + "'");
    char m = sym[comma + 1];
    if (m != '0' && m != '1') throw validation_error("not a marked symbol: '" + sym + "'");
    return {sym.substr(1, comma - 1), m == '1'};
}

namespace {
const std::array<std::pair<unsigned, const char*>, kHatFlagCount> kHatNames = {{
    {kHatRoot, "Root"},
    {kHatHnlc, "Hnlc"},
    {kHatHnrc, "Hnrc"},
    {kHatIslc, "Islc"},
    {kHatIsrc, "Isrc"},
}};
}  // namespace

std::string hat_symbol(const std::string& base, unsigned flags) {
    std::vector<std::string> names;
    for (const auto& [bit, name] : kHatNames)
        if (flags & bit) names.emplace_back(name);
    return "(" + base + "," + (names.empty() ? "-" : join(names, "|")) + ")";
}

AlphabetPtr hat_alphabet(const AlphabetPtr& base) {
    std::vector<std::string> out;
    out.reserve(base->size() * 32);
    for (const auto& s : base->symbols())
        for (unsigned flags = 0; flags < 32; ++flags) out.push_back(hat_symbol(s, flags));
    return make_alphabet(std::move(out));
}

std::pair<std::string, unsigned> split_hat_symbol(const std::string& sym) {
    if (sym.size() < 4 || sym.front() != '(' || sym.back() != ')')
        throw validation_error("not a flag-extended symbol: '" + sym + "'");
    auto comma = sym.rfind(',');
    if (comma == std::string::npos)
        throw validation_error("not a flag-extended symbol: '" + sym + "'");
    std::string base = sym.substr(1, comma - 1);
    std::string flagpart = sym.substr(comma + 1, sym.size() - comma - 2);
    unsigned flags = 0;
    if (flagpart != "-") {
        size_t pos = 0;
        while (pos <= flagpart.size()) {
            auto bar = flagpart.find('|', pos);
            std::string name = flagpart.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos);
            bool found = false;
            for (const auto& [bit, fname] : kHatNames)
                if (name == fname) {
                    flags |= bit;
                    found = true;
                }
            if (!found) throw validation_error("unknown flag '" + name + "' in '" + sym + "'");
            if (bar == std::string::npos) break;
            pos = bar + 1;
        }
    }
    return {base, flags};
}

std::string root_leaf_symbol(const std::string& base, bool is_root, bool is_leaf) {
    std::string part = is_root ? (is_leaf ? "Root|Leaf" : "Root") : (is_leaf ? "Leaf" : "-");
    return "(" + base + "," + part + ")";
}

AlphabetPtr root_leaf_alphabet(const AlphabetPtr& base) {
    std::vector<std::string> out;
    out.reserve(base->size() * 4);
    for (const auto& s : base->symbols())
        for (int i = 0; i < 4; ++i) out.push_back(root_leaf_symbol(s, i & 1, i & 2));
    return make_alphabet(std::move(out));
}

std::tuple<std::string, bool, bool> split_root_leaf_symbol(const std::string& sym) {
    if (sym.size() < 4 || sym.front() != '(' || sym.back() != ')')
        throw validation_error("not a root/leaf-annotated symbol: '" + sym + "'");
    auto comma = sym.rfind(',');
    if (comma == std::string::npos)
        throw validation_error("not a root/leaf-annotated symbol: '" + sym + "'");
    std::string base = sym.substr(1, comma - 1);
    std::string part = sym.substr(comma + 1, sym.size() - comma - 2);
    if (part == "-") return {base, false, false};
    if (part == "Root") return {base, true, false};
    if (part == "Leaf") return {base, false, true};
    if (part == "Root|Leaf") return {base, true, true};
    throw validation_error("bad annotation in '" + sym + "'");
}

std::string setvar_symbol(const std::string& base, uint64_t gamma, int n, bool z1, bool z2) {
    std::string bits(n, '0');
    for (int i = 0; i < n; ++i)
        if (gamma & (1ULL << i)) bits[i] = '1';
    std::string z;
    z += z1 ? '1' : '0';
    z += z2 ? '1' : '0';
    return "(" + base + "," + bits + "," + z + ")";
}

AlphabetPtr setvar_alphabet(const AlphabetPtr& base, int n, long long max_symbols) {
    if (n < 0 || n >= 62) throw cap_error("set-variable alphabet: n out of range");
    long long total = static_cast<long long>(base->size()) * (1LL << n) * 4;
    if (total > max_symbols)
        throw cap_error("set-variable alphabet would have " + std::to_string(total) +
                        " symbols, above the configured cap of " + std::to_string(max_symbols) +
                        "; shrink the query or raise the cap");
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(total));
    for (const auto& s : base->symbols())
        for (uint64_t gamma = 0; gamma < (1ULL << n); ++gamma)
            for (int z = 0; z < 4; ++z)
                out.push_back(setvar_symbol(s, gamma, n, z & 2, z & 1));
    return make_alphabet(std::move(out));
}

}  // namespace mdlc
