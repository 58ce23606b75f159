#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "vlk/phonex.hpp"

namespace vlk::phonex::detail {

/// Lookup structures derived from an ObfuscationLexicon.
struct Matcher {
  std::unordered_map<std::string, std::string> words;
  std::unordered_map<std::string, std::string> homophones;
  std::size_t max_word = 0;
  std::unordered_map<char32_t, std::string> lookalike;
  // First code point -> (encoded key, digits), longest key first.
  std::unordered_map<char32_t, std::vector<std::pair<std::string, std::string>>> sequences;
  std::unordered_set<char32_t> confounders;

  explicit Matcher(const ObfuscationLexicon& lexicon);
  static const Matcher& builtin();
};

bool is_space(char32_t cp);
inline bool is_ascii_letter(char32_t cp) { return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'); }
inline bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

}  // namespace vlk::phonex::detail
