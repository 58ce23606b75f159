#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vlk/error.hpp"
#include "vlk/phonex.hpp"
#include "vlk/utf8.hpp"

namespace vlk::phonex {

namespace {

constexpr std::array<const char*, 10> kUnits = {"zero", "one", "two",   "three", "four",
                                                "five", "six", "seven", "eight", "nine"};
constexpr std::array<const char*, 10> kTeens = {"ten",     "eleven",  "twelve",    "thirteen", "fourteen",
                                                "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
constexpr std::array<const char*, 8> kTens = {"twenty", "thirty", "forty", "fifty",
                                              "sixty",  "seventy", "eighty", "ninety"};
constexpr std::array<const char*, 9> kSpanish = {"uno",  "dos",   "tres", "cuatro", "cinco",
                                                 "seis", "siete", "ocho", "nueve"};

ObfuscationLexicon make_builtin() {
  ObfuscationLexicon lex;
  auto& words = lex.word_to_digits;
  for (int d = 0; d < 10; ++d) words[kUnits[d]] = std::to_string(d);
  for (int d = 0; d < 10; ++d) words[kTeens[d]] = std::to_string(10 + d);
  for (int t = 0; t < 8; ++t) {
    const int tens = (t + 2) * 10;
    words[kTens[t]] = std::to_string(tens);
    for (int u = 1; u < 10; ++u) {
      const std::string value = std::to_string(tens + u);
      words[std::string(kTens[t]) + kUnits[u]] = value;
      words[std::string(kTens[t]) + "-" + kUnits[u]] = value;
    }
  }
  words["oh"] = "0";
  words["o"] = "0";
  for (int d = 0; d < 9; ++d) words[kSpanish[d]] = std::to_string(d + 1);

  lex.homophones = {{"too", "2"}, {"to", "2"}};

  lex.lookalike_chars = {{"O", "0"}, {"o", "0"}, {"l", "1"}, {"I", "1"}, {"i", "1"},
                         {"|", "1"}, {"B", "8"}, {"S", "5"}, {"s", "5"}, {"Z", "2"}, {"z", "2"}};

  for (char32_t d = 0; d < 10; ++d) {
    const std::string digit(1, static_cast<char>('0' + d));
    lex.emoji_digits[digit + "\xEF\xB8\x8F\xE2\x83\xA3"] = digit;  // d U+FE0F U+20E3
    lex.emoji_digits[digit + "\xE2\x83\xA3"] = digit;              // d U+20E3
  }
  lex.emoji_digits[utf8::encode(U'\U0001F51F')] = "10";  // keycap ten
  lex.emoji_digits[utf8::encode(U'☺')] = "0";
  lex.emoji_digits[utf8::encode(U"☺️")] = "0";

  // Blocks of visually equivalent digits, each laid out 0..9.
  for (char32_t base : {U'０', U'\U0001D7CE', U'\U0001D7D8', U'\U0001D7E2', U'\U0001D7EC', U'\U0001D7F6',
                        U'₀'}) {
    for (char32_t d = 0; d < 10; ++d) lex.unicode_digits[utf8::encode(base + d)] = std::to_string(d);
  }
  // Blocks that start at 1.
  for (char32_t base : {U'①', U'❶', U'➀', U'⑴'}) {
    for (char32_t d = 1; d < 10; ++d) lex.unicode_digits[utf8::encode(base + d - 1)] = std::to_string(d);
  }
  lex.unicode_digits[utf8::encode(U'⓪')] = "0";
  lex.unicode_digits[utf8::encode(U'⁰')] = "0";
  lex.unicode_digits[utf8::encode(U'¹')] = "1";
  lex.unicode_digits[utf8::encode(U'²')] = "2";
  lex.unicode_digits[utf8::encode(U'³')] = "3";
  for (char32_t d = 4; d < 10; ++d) lex.unicode_digits[utf8::encode(U'⁰' + d)] = std::to_string(d);

  lex.confounder_chars = {" ", ",", ".", "-", "/", "_", "!", "&", "(", ")", "*", "'", "\""};
  return lex;
}

bool is_digit_string(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::map<std::string, std::string> read_table(const nlohmann::json& obj, const char* key, bool lowercase_keys) {
  const auto& table = obj.at(key);
  if (!table.is_object()) throw Error(std::string("lexicon: \"") + key + "\" must be an object");
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : table.items()) {
    if (!v.is_string()) throw Error(std::string("lexicon: values of \"") + key + "\" must be strings");
    std::string name = k;
    if (lowercase_keys) {
      std::transform(name.begin(), name.end(), name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    out[name] = v.get<std::string>();
  }
  return out;
}

}  // namespace

const ObfuscationLexicon& ObfuscationLexicon::builtin() {
  static const ObfuscationLexicon lex = make_builtin();
  return lex;
}

void ObfuscationLexicon::validate() const {
  for (const auto* table : {&word_to_digits, &homophones, &lookalike_chars, &emoji_digits, &unicode_digits}) {
    for (const auto& [key, value] : *table) {
      if (key.empty()) throw Error("lexicon: empty key");
      if (!is_digit_string(value)) throw Error("lexicon: value for \"" + key + "\" is not a digit string");
    }
  }
  for (const auto& [key, value] : lookalike_chars) {
    if (utf8::decode(key).size() != 1) throw Error("lexicon: lookalike key \"" + key + "\" is not one character");
  }
  for (const auto& c : confounder_chars) {
    if (utf8::decode(c).size() != 1) throw Error("lexicon: confounder \"" + c + "\" is not one character");
  }
}

ObfuscationLexicon ObfuscationLexicon::from_json_text(std::string_view text) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("lexicon: invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw Error("lexicon: expected a JSON object");
  ObfuscationLexicon lex = builtin();
  if (obj.contains("word_to_digits")) lex.word_to_digits = read_table(obj, "word_to_digits", true);
  if (obj.contains("homophones")) lex.homophones = read_table(obj, "homophones", true);
  if (obj.contains("lookalike_chars")) lex.lookalike_chars = read_table(obj, "lookalike_chars", false);
  if (obj.contains("emoji_digits")) lex.emoji_digits = read_table(obj, "emoji_digits", false);
  if (obj.contains("unicode_digits")) lex.unicode_digits = read_table(obj, "unicode_digits", false);
  if (obj.contains("confounder_chars")) {
    const auto& arr = obj.at("confounder_chars");
    if (!arr.is_array()) throw Error("lexicon: \"confounder_chars\" must be an array");
    lex.confounder_chars.clear();
    for (const auto& c : arr) {
      if (!c.is_string()) throw Error("lexicon: confounder entries must be strings");
      lex.confounder_chars.insert(c.get<std::string>());
    }
  }
  lex.validate();
  return lex;
}

ObfuscationLexicon ObfuscationLexicon::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open lexicon file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return from_json_text(buf.str());
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace vlk::phonex
