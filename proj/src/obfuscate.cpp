#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <vector>

#include "vlk/error.hpp"
#include "vlk/phonex.hpp"
#include "vlk/utf8.hpp"

// The generator keeps its own surface-form tables instead of inverting the
// extractor's lexicon, so a round trip exercises both sides independently.

namespace vlk::phonex {

namespace {

constexpr std::array<const char*, 10> kEnglish = {"zero", "one", "two",   "three", "four",
                                                  "five", "six", "seven", "eight", "nine"};
constexpr std::array<const char*, 10> kTeens = {"ten",     "eleven",  "twelve",    "thirteen", "fourteen",
                                                "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
constexpr std::array<const char*, 10> kTens = {"", "", "twenty", "thirty", "forty",
                                               "fifty", "sixty", "seventy", "eighty", "ninety"};
constexpr std::array<const char*, 10> kSpanish = {"", "uno", "dos", "tres", "cuatro",
                                                  "cinco", "seis", "siete", "ocho", "nueve"};
constexpr std::array<const char*, 13> kConfounders = {" ", ",", ".", "-", "/", "_", "!",
                                                      "&", "(", ")", "*", "'", "\""};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool coin(double p) { return uniform() < p; }
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

enum class Kind { literal, lookalike, word, emoji, unicode };

struct GenUnit {
  Kind kind = Kind::literal;
  std::string surface;
  bool homophone = false;
};

bool starts_with_letter(const std::string& s) {
  return !s.empty() && std::isalpha(static_cast<unsigned char>(s.front()));
}
bool ends_with_letter(const std::string& s) {
  return !s.empty() && std::isalpha(static_cast<unsigned char>(s.back()));
}

std::string apply_case(std::string word, Rng& rng, bool canonical) {
  if (canonical) return word;
  const double r = rng.uniform();
  if (r < 0.6) return word;
  if (r < 0.8) {
    for (auto& c : word) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else {
    word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  }
  return word;
}

GenUnit word_unit(std::string_view number, std::size_t& i, Rng& rng, const ObfuscateOptions& opt) {
  GenUnit u;
  u.kind = Kind::word;
  const int d = number[i] - '0';
  const bool pair_ok = !opt.canonical && i + 1 < number.size() && d != 0;
  if (pair_ok && rng.coin(0.4)) {
    const int d2 = number[i + 1] - '0';
    i += 2;
    if (d == 1) {
      u.surface = kTeens[d2];
    } else if (d2 == 0) {
      u.surface = kTens[d];
    } else {
      u.surface = std::string(kTens[d]) + (rng.coin(0.5) ? "-" : "") + kEnglish[d2];
    }
    u.surface = apply_case(u.surface, rng, opt.canonical);
    return u;
  }
  ++i;
  std::vector<std::string> forms = {kEnglish[d]};
  if (!opt.canonical) {
    if (d > 0) forms.emplace_back(kSpanish[d]);
    if (d == 0) {
      forms.emplace_back("oh");
      forms.emplace_back("o");
    }
    if (d == 2 && opt.homophones) {
      forms.emplace_back("too");
      forms.emplace_back("to");
    }
  }
  const std::size_t choice = rng.pick(forms.size());
  u.surface = apply_case(forms[choice], rng, opt.canonical);
  u.homophone = d == 2 && choice >= 2;
  return u;
}

std::string emoji_form(int d, Rng& rng, bool canonical) {
  if (!canonical && d == 0 && rng.coin(0.3)) return utf8::encode(U'☺');
  const std::string digit(1, static_cast<char>('0' + d));
  if (canonical || rng.coin(0.5)) return digit + "\xEF\xB8\x8F\xE2\x83\xA3";
  return digit + "\xE2\x83\xA3";
}

std::string unicode_form(int d, Rng& rng, bool canonical) {
  constexpr std::array<char32_t, 6> zero_based = {U'０', U'\U0001D7CE', U'\U0001D7D8',
                                                   U'\U0001D7E2', U'\U0001D7EC', U'\U0001D7F6'};
  constexpr std::array<char32_t, 3> one_based = {U'①', U'❶', U'➀'};
  constexpr std::array<char32_t, 10> superscript = {U'⁰', U'¹', U'²', U'³', U'⁴', U'⁵', U'⁶', U'⁷', U'⁸', U'⁹'};
  if (canonical) return utf8::encode(zero_based[0] + static_cast<char32_t>(d));
  const std::size_t family = rng.pick(3);
  if (family == 0) return utf8::encode(zero_based[rng.pick(zero_based.size())] + static_cast<char32_t>(d));
  if (family == 1) {
    if (d == 0) return utf8::encode(U'⓪');
    return utf8::encode(one_based[rng.pick(one_based.size())] + static_cast<char32_t>(d - 1));
  }
  return utf8::encode(superscript[d]);
}

std::string lookalike_form(char digit, Rng& rng, bool canonical) {
  auto choose = [&](std::initializer_list<const char*> forms) {
    const std::size_t k = canonical ? 0 : rng.pick(forms.size());
    return std::string(*(forms.begin() + k));
  };
  switch (digit) {
    case '0': return choose({"O", "o"});
    case '1': return choose({"l", "I", "i", "|"});
    case '2': return choose({"Z", "z"});
    case '5': return choose({"S", "s"});
    case '8': return choose({"B"});
    default: return {};
  }
}

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> v{"oh", "o"};
    for (auto* w : kEnglish) v.push_back(w);
    for (auto* w : kTeens) v.push_back(w);
    for (std::size_t t = 2; t < kTens.size(); ++t) {
      v.push_back(kTens[t]);
      for (std::size_t u = 1; u < kEnglish.size(); ++u) {
        v.push_back(std::string(kTens[t]) + kEnglish[u]);
        v.push_back(std::string(kTens[t]) + "-" + kEnglish[u]);
      }
    }
    for (std::size_t u = 1; u < kSpanish.size(); ++u) v.push_back(kSpanish[u]);
    return v;
  }();
  return words;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// True when a longer vocabulary word starts at the left word and runs into
// the right one ("eighty" + "-" + "seventy" reads as "eighty-seven").
bool swallows(const GenUnit& left, const std::string& sep, const GenUnit& right) {
  if (left.kind != Kind::word || right.kind != Kind::word) return false;
  const std::string joined = lower(left.surface + sep + right.surface);
  for (const auto& w : vocabulary()) {
    if (w.size() > left.surface.size() && joined.compare(0, w.size(), w) == 0) return true;
  }
  return false;
}

bool joins(const GenUnit& left, const std::string& sep, const GenUnit& right) {
  if (sep.empty()) return true;
  return sep == "-" && ends_with_letter(left.surface) && starts_with_letter(right.surface);
}

// Mirrors the extractor's reading rules at unit granularity: a token with a
// real digit reads everything; otherwise it must be all words, or a single
// lookalike sitting next to a readable token.
bool readable(const std::vector<GenUnit>& units, const std::vector<std::string>& seps) {
  std::vector<std::pair<std::size_t, std::size_t>> tokens;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < units.size(); ++i) {
    if (!joins(units[i], seps[i], units[i + 1])) {
      tokens.emplace_back(start, i + 1);
      start = i + 1;
    }
  }
  tokens.emplace_back(start, units.size());

  auto is_word_like = [](const GenUnit& u) {
    return u.kind == Kind::word || (u.kind == Kind::lookalike && (u.surface == "o" || u.surface == "O"));
  };
  std::vector<int> state(tokens.size());  // 0 invalid, 1 strong, 2 lone lookalike
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto [b, e] = tokens[t];
    bool anchored = false, all_words = true;
    for (std::size_t i = b; i < e; ++i) {
      anchored |= units[i].kind == Kind::literal || units[i].kind == Kind::emoji || units[i].kind == Kind::unicode;
      all_words &= is_word_like(units[i]);
    }
    if (anchored || all_words) {
      state[t] = 1;
    } else if (e - b == 1 && units[b].kind == Kind::lookalike) {
      state[t] = 2;
    }
  }
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (state[t] == 0) return false;
    if (state[t] == 2) {
      const bool left = t > 0 && state[t - 1] == 1;
      const bool right = t + 1 < tokens.size() && state[t + 1] == 1;
      if (!left && !right) return false;
    }
  }
  return true;
}

}  // namespace

SchemeSet parse_schemes(std::string_view names) {
  if (names.empty() || names == "none") return {};
  if (names == "all") return SchemeSet::all();
  std::uint8_t bits = 0;
  std::size_t start = 0;
  while (start <= names.size()) {
    const auto end = std::min(names.find(',', start), names.size());
    const auto name = names.substr(start, end - start);
    if (name == "char_sub") bits |= static_cast<std::uint8_t>(Scheme::char_sub);
    else if (name == "word_sub") bits |= static_cast<std::uint8_t>(Scheme::word_sub);
    else if (name == "confounders") bits |= static_cast<std::uint8_t>(Scheme::confounders);
    else if (name == "emoji") bits |= static_cast<std::uint8_t>(Scheme::emoji);
    else if (name == "unicode") bits |= static_cast<std::uint8_t>(Scheme::unicode);
    else throw Error("unknown obfuscation scheme \"" + std::string(name) + "\"");
    start = end + 1;
  }
  return SchemeSet::from_bits(bits);
}

std::string obfuscate(std::string_view number, SchemeSet schemes, std::uint64_t seed,
                      const ObfuscateOptions& opt) {
  if (number.empty() || !std::all_of(number.begin(), number.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error("obfuscate: \"" + std::string(number) + "\" is not a digit string");
  }
  if (opt.enforce_length && (number.size() < 7 || number.size() > 11)) {
    throw Error("obfuscate: phone numbers must have 7 to 11 digits");
  }

  Rng rng(seed);
  std::vector<GenUnit> units;
  std::vector<Scheme> unit_schemes;
  for (Scheme s : {Scheme::word_sub, Scheme::emoji, Scheme::unicode}) {
    if (schemes.has(s)) unit_schemes.push_back(s);
  }

  std::size_t i = 0;
  while (i < number.size()) {
    const int d = number[i] - '0';
    if (!unit_schemes.empty() && rng.coin(opt.rate)) {
      const Scheme s = unit_schemes[rng.pick(unit_schemes.size())];
      if (s == Scheme::word_sub) {
        units.push_back(word_unit(number, i, rng, opt));
        continue;
      }
      GenUnit u;
      u.kind = s == Scheme::emoji ? Kind::emoji : Kind::unicode;
      u.surface = s == Scheme::emoji ? emoji_form(d, rng, opt.canonical) : unicode_form(d, rng, opt.canonical);
      units.push_back(std::move(u));
      ++i;
      continue;
    }
    GenUnit u;
    u.surface = std::string(1, number[i]);
    units.push_back(std::move(u));
    ++i;
  }

  std::vector<std::string> seps(units.empty() ? 0 : units.size() - 1);
  for (std::size_t k = 0; k < seps.size(); ++k) {
    const auto& left = units[k];
    const auto& right = units[k + 1];
    if (schemes.has(Scheme::confounders)) {
      const std::size_t count = rng.pick(3);
      for (std::size_t c = 0; c < count; ++c) seps[k] += kConfounders[rng.pick(kConfounders.size())];
    } else if (left.kind == Kind::word || right.kind == Kind::word) {
      seps[k] = " ";
    }
    if (opt.extractable) {
      const bool fragile = seps[k].empty() || seps[k] == "-";
      if (fragile && (swallows(left, seps[k], right) || left.homophone || right.homophone)) seps[k] = " ";
    }
  }

  if (schemes.has(Scheme::char_sub)) {
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < units.size(); ++k) {
      if (units[k].kind == Kind::literal && !lookalike_form(units[k].surface[0], rng, true).empty()) order.push_back(k);
    }
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.pick(k)]);
    for (std::size_t k : order) {
      if (!rng.coin(opt.rate)) continue;
      const GenUnit saved = units[k];
      units[k].kind = Kind::lookalike;
      units[k].surface = lookalike_form(saved.surface[0], rng, opt.canonical);
      if (opt.extractable && !readable(units, seps)) units[k] = saved;
    }
  }

  std::string out;
  for (std::size_t k = 0; k < units.size(); ++k) {
    out += units[k].surface;
    if (k < seps.size()) out += seps[k];
  }
  return out;
}

}  // namespace vlk::phonex
