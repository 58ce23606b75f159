#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vlk::utf8 {

struct CodePoint {
  char32_t value;
  std::size_t offset;  // byte offset of the first unit
  std::size_t length;  // encoded length in bytes
};

/// Decodes UTF-8; invalid bytes decode to U+FFFD one byte at a time.
std::vector<CodePoint> decode(std::string_view text);

std::u32string to_u32(std::string_view text);
std::string encode(char32_t cp);
std::string encode(std::u32string_view text);

bool is_valid(std::string_view text);

}  // namespace vlk::utf8
