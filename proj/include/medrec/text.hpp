#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small ASCII-oriented string helpers shared by the modules. UTF-8 bytes
// above 0x7F pass through untouched.
namespace medrec::text {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Collapses whitespace runs to one space, trims, lowercases.
std::string normalize_surface(std::string_view s);

// True if [begin, end) sits on alphanumeric word boundaries of `s`.
bool on_word_boundaries(std::string_view s, std::size_t begin, std::size_t end);

// Removes all whitespace; used to compare texts modulo whitespace.
std::string strip_whitespace(std::string_view s);

struct TokenSpan {
  std::size_t begin;
  std::size_t end;
};

// Maximal runs of non-whitespace characters.
std::vector<TokenSpan> whitespace_tokens(std::string_view s);

// Lowercased maximal runs of ASCII alphanumerics.
std::vector<std::string> alnum_tokens(std::string_view s);

// 64-bit FNV-1a; stable across platforms.
std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace medrec::text
