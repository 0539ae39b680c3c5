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

#ifndef MDLC_UTIL_HH
#define MDLC_UTIL_HH

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace mdlc {

struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text. `pos` is a 0-based character offset.
struct parse_error : error {
    size_t pos;
    parse_error(const std::string& msg, size_t pos_)
        : error(msg + " (at offset " + std::to_string(pos_) + ")"), pos(pos_) {}
};

/// Input violates a precondition (arity, schema, flavor, ...).
struct validation_error : error {
    using error::error;
};

/// A configured resource ceiling was exceeded; the result would have been
/// too large to compute honestly at this scale.
struct cap_error : error {
    using error::error;
};

/// A pipeline self-check failed; indicates a bug, never a user error.
struct internal_error : error {
    using error::error;
};

inline void hash_mix(size_t& h, size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

/// Generates names that do not collide with an existing set.
class NameGen {
public:
    explicit NameGen(std::unordered_set<std::string> taken) : taken_(std::move(taken)) {}

    std::string fresh(const std::string& base) {
        if (taken_.insert(base).second) return base;
        for (int i = 1;; ++i) {
            std::string cand = base + "_" + std::to_string(i);
            if (taken_.insert(cand).second) return cand;
        }
    }

    void reserve(const std::string& name) { taken_.insert(name); }

private:
    std::unordered_set<std::string> taken_;
};

std::vector<std::string> split_ws(const std::string& s);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

}  // namespace mdlc

#endif
