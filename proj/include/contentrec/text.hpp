#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace contentrec {

/// Casefold, trim, and collapse internal whitespace runs to single spaces.
/// Idempotent; empty input yields empty output.
std::string normalize_field(std::string_view raw);

/// Lowercase alphanumeric token runs, in order of appearance.
std::vector<std::string> tokenize(std::string_view text);

/// Tokens of `text` as a set (lowercased alphanumeric runs).
std::unordered_set<std::string> token_set(std::string_view text);

/// FNV-1a 64-bit. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view data);

/// Hash of an ordered field tuple; fields are separated by an
/// unambiguous delimiter so ("ab","c") != ("a","bc").
std::uint64_t hash_tuple(const std::vector<std::string>& fields);

}  // namespace contentrec
