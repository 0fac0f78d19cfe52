#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace playbook {

std::string trim(const std::string& s);
std::string to_lower(const std::string& s);
std::string to_upper(const std::string& s);

// Lowercase + collapse internal whitespace runs to single spaces. Used to
// compare dilemmas and application names.
std::string normalize_key(const std::string& s);

// Lowercased alphanumeric runs.
std::vector<std::string> tokenize(const std::string& s);

// Jaccard overlap of the token sets of two strings; 1.0 for identical sets,
// 0.0 when either side has no tokens.
double token_jaccard(const std::string& a, const std::string& b);

// "RocketChat", "Login" -> "rocketchat-login"
std::string slugify(const std::string& s);

std::uint64_t fnv1a64(const std::string& s);
std::string fnv1a64_hex(const std::string& s);

std::string join(const std::vector<std::string>& parts, const std::string& sep);
bool contains(const std::string& haystack, const std::string& needle);

}  // namespace playbook
