#include <algorithm>
#include <array>
#include <cctype>

#include "phonex_internal.hpp"
#include "vlk/utf8.hpp"

namespace vlk::phonex {

namespace detail {

Matcher::Matcher(const ObfuscationLexicon& lexicon) {
  for (const auto& [word, digits] : lexicon.word_to_digits) {
    words.emplace(word, digits);
    max_word = std::max(max_word, word.size());
  }
  for (const auto& [word, digits] : lexicon.homophones) {
    homophones.emplace(word, digits);
    max_word = std::max(max_word, word.size());
  }
  for (const auto& [key, digits] : lexicon.lookalike_chars) {
    const auto cps = utf8::decode(key);
    if (cps.size() == 1) lookalike.emplace(cps.front().value, digits);
  }
  for (const auto* table : {&lexicon.emoji_digits, &lexicon.unicode_digits}) {
    for (const auto& [key, digits] : *table) {
      const auto cps = utf8::decode(key);
      if (!cps.empty()) sequences[cps.front().value].emplace_back(key, digits);
    }
  }
  for (auto& [cp, list] : sequences) {
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return a.first.size() != b.first.size() ? a.first.size() > b.first.size() : a.first < b.first;
    });
  }
  for (const auto& c : lexicon.confounder_chars) {
    const auto cps = utf8::decode(c);
    if (cps.size() == 1) confounders.insert(cps.front().value);
  }
}

const Matcher& Matcher::builtin() {
  static const Matcher m(ObfuscationLexicon::builtin());
  return m;
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' || cp == 0xA0 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

}  // namespace detail

namespace {

using detail::Matcher;

// A run of digits recovered from one source: a literal digit, an emoji, or a
// whole lexicon word. Units are never split across phone candidates.
struct Unit {
  std::string digits;
  Span span;
};

struct Token {
  std::size_t first_cp = 0;
  std::size_t last_cp = 0;  // exclusive
  std::vector<Unit> units;
};

template <class F>
auto with_matcher(const ObfuscationLexicon& lexicon, F&& f) {
  if (&lexicon == &ObfuscationLexicon::builtin()) return f(Matcher::builtin());
  const Matcher m(lexicon);
  return f(m);
}

std::vector<Token> tokenize(const std::vector<utf8::CodePoint>& cps, const Matcher& m) {
  std::vector<Token> tokens;
  auto is_separator = [&](std::size_t i) {
    const char32_t cp = cps[i].value;
    if (detail::is_space(cp)) return true;
    if (!m.confounders.count(cp)) return false;
    // A hyphen between two letters belongs to the word ("seventy-five").
    if (cp == '-' && i > 0 && i + 1 < cps.size() && detail::is_ascii_letter(cps[i - 1].value) &&
        detail::is_ascii_letter(cps[i + 1].value)) {
      return false;
    }
    return true;
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_separator(i)) {
      ++i;
      continue;
    }
    Token t;
    t.first_cp = i;
    while (i < cps.size() && !is_separator(i)) ++i;
    t.last_cp = i;
    tokens.push_back(std::move(t));
  }
  return tokens;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

const std::string* find_word(const Matcher& m, const std::string& key, bool homophones) {
  if (auto it = m.words.find(key); it != m.words.end()) return &it->second;
  if (homophones) {
    if (auto it = m.homophones.find(key); it != m.homophones.end()) return &it->second;
  }
  return nullptr;
}

// Words inside one alphabetic run. In an anchored token (one holding a real
// digit) lookalike letters are read as digits and unmatched letters are
// skipped; otherwise the run must be covered entirely by lexicon words.
std::vector<Unit> scan_run(std::string_view text, const std::vector<utf8::CodePoint>& cps, std::size_t begin,
                           std::size_t end, bool anchored, const Matcher& m, const ExtractConfig& cfg) {
  const std::size_t byte_begin = cps[begin].offset;
  const std::size_t byte_end = cps[end - 1].offset + cps[end - 1].length;
  const std::string run = lower_ascii(text.substr(byte_begin, byte_end - byte_begin));

  std::vector<Unit> units;
  std::size_t pos = 0;
  while (pos < run.size()) {
    if (run[pos] == '-') {
      ++pos;
      continue;
    }
    const std::string* digits = nullptr;
    std::size_t len = std::min(m.max_word, run.size() - pos);
    for (; len > 0; --len) {
      digits = find_word(m, run.substr(pos, len), cfg.homophones);
      if (digits) break;
    }
    if (digits) {
      units.push_back({*digits, {byte_begin + pos, byte_begin + pos + len}});
      pos += len;
      continue;
    }
    if (!anchored) return {};
    // Lookalikes are case-sensitive, so consult the original character.
    const char32_t original = cps[begin + pos].value;
    if (auto it = m.lookalike.find(original); it != m.lookalike.end()) {
      units.push_back({it->second, {byte_begin + pos, byte_begin + pos + 1}});
    }
    ++pos;
  }
  return units;
}

const std::pair<std::string, std::string>* match_sequence(std::string_view text, std::size_t offset,
                                                          char32_t first, const Matcher& m) {
  auto it = m.sequences.find(first);
  if (it == m.sequences.end()) return nullptr;
  for (const auto& entry : it->second) {
    if (text.compare(offset, entry.first.size(), entry.first) == 0) return &entry;
  }
  return nullptr;
}

void scan_token(std::string_view text, const std::vector<utf8::CodePoint>& cps, Token& token, const Matcher& m,
                const ExtractConfig& cfg) {
  enum class Kind { unit, run, other };
  struct Segment {
    Kind kind;
    std::size_t begin;  // code point indices
    std::size_t end;
    Unit unit;
  };

  std::vector<Segment> segments;
  bool anchored = false;
  std::size_t i = token.first_cp;
  while (i < token.last_cp) {
    const auto& cp = cps[i];
    if (!cfg.masking) {
      if (const auto* seq = match_sequence(text, cp.offset, cp.value, m)) {
        const std::size_t end_byte = cp.offset + seq->first.size();
        std::size_t j = i;
        while (j < token.last_cp && cps[j].offset < end_byte) ++j;
        segments.push_back({Kind::unit, i, j, {seq->second, {cp.offset, end_byte}}});
        anchored = true;
        i = j;
        continue;
      }
    }
    if (detail::is_ascii_digit(cp.value)) {
      segments.push_back({Kind::unit, i, i + 1, {std::string(1, static_cast<char>(cp.value)), {cp.offset, cp.offset + 1}}});
      anchored = true;
      ++i;
      continue;
    }
    if (detail::is_ascii_letter(cp.value)) {
      std::size_t j = i + 1;
      while (j < token.last_cp &&
             (detail::is_ascii_letter(cps[j].value) ||
              (cps[j].value == '-' && j + 1 < token.last_cp && detail::is_ascii_letter(cps[j + 1].value)))) {
        ++j;
      }
      segments.push_back({Kind::run, i, j, {}});
      i = j;
      continue;
    }
    segments.push_back({Kind::other, i, i + 1, {}});
    ++i;
  }

  for (const auto& seg : segments) {
    switch (seg.kind) {
      case Kind::unit:
        token.units.push_back(seg.unit);
        break;
      case Kind::run:
        if (cfg.masking) break;
        for (auto& u : scan_run(text, cps, seg.begin, seg.end, anchored, m, cfg)) token.units.push_back(std::move(u));
        break;
      case Kind::other:
        if (cfg.masking || !anchored) break;
        if (auto it = m.lookalike.find(cps[seg.begin].value); it != m.lookalike.end()) {
          const auto& cp = cps[seg.begin];
          token.units.push_back({it->second, {cp.offset, cp.offset + cp.length}});
        }
        break;
    }
  }
}

std::vector<Token> scan_tokens(std::string_view text, const std::vector<utf8::CodePoint>& cps, const Matcher& m,
                               const ExtractConfig& cfg) {
  auto tokens = tokenize(cps, m);
  for (auto& t : tokens) scan_token(text, cps, t, m, cfg);
  if (cfg.masking) return tokens;

  // A lone lookalike ("o", "I", "|") counts only next to a digit-bearing token.
  const std::vector<bool> bearing = [&] {
    std::vector<bool> b(tokens.size());
    for (std::size_t k = 0; k < tokens.size(); ++k) b[k] = !tokens[k].units.empty();
    return b;
  }();
  const std::size_t window = static_cast<std::size_t>(std::max(cfg.gap_limit_tokens, 0)) + 1;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    auto& t = tokens[k];
    if (bearing[k] || t.last_cp - t.first_cp != 1) continue;
    const auto& cp = cps[t.first_cp];
    auto it = m.lookalike.find(cp.value);
    if (it == m.lookalike.end()) continue;
    const std::size_t lo = k >= window ? k - window : 0;
    const std::size_t hi = std::min(tokens.size() - 1, k + window);
    bool near = false;
    for (std::size_t n = lo; n <= hi && !near; ++n) near = n != k && bearing[n];
    if (near) t.units.push_back({it->second, {cp.offset, cp.offset + cp.length}});
  }
  return tokens;
}

}  // namespace

std::vector<DigitEvent> deobfuscate_scan(std::string_view text, const ObfuscationLexicon& lexicon,
                                         const ExtractConfig& config) {
  const auto cps = utf8::decode(text);
  const auto tokens =
      with_matcher(lexicon, [&](const Matcher& m) { return scan_tokens(text, cps, m, config); });
  std::vector<DigitEvent> events;
  for (const auto& t : tokens) {
    for (const auto& u : t.units) {
      for (char d : u.digits) events.push_back({d, u.span});
    }
  }
  return events;
}

std::vector<PhoneCandidate> extract_phones(std::string_view text, const ExtractConfig& config,
                                           const ObfuscationLexicon& lexicon) {
  const auto cps = utf8::decode(text);
  const auto tokens =
      with_matcher(lexicon, [&](const Matcher& m) { return scan_tokens(text, cps, m, config); });

  std::vector<PhoneCandidate> out;
  PhoneCandidate group;
  auto close = [&] {
    if (group.digits.size() >= config.min_len && group.digits.size() <= config.max_len) out.push_back(group);
    group = PhoneCandidate{};
  };

  int gap = 0;
  for (const auto& t : tokens) {
    if (t.units.empty()) {
      ++gap;
      continue;
    }
    if (gap > config.gap_limit_tokens) close();
    gap = 0;
    // A token that fits in a fresh group is not split across two groups.
    std::size_t token_digits = 0;
    for (const auto& u : t.units) token_digits += u.digits.size();
    if (!group.digits.empty() && token_digits <= config.max_len &&
        group.digits.size() + token_digits > config.max_len) {
      close();
    }
    for (const auto& u : t.units) {
      if (!group.digits.empty() && group.digits.size() + u.digits.size() > config.max_len) close();
      if (group.digits.empty()) group.span.begin = u.span.begin;
      group.digits += u.digits;
      group.span.end = u.span.end;
      group.events += u.digits.size();
    }
  }
  close();
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

ExtractionAccuracy eval_extraction(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
  const std::size_t n = std::max(gold.size(), pred.size());
  if (n == 0) return {1.0, 1.0, 1.0};

  static const std::string empty;
  double lev = 0.0, perfect = 0.0, digit = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& g = i < gold.size() ? gold[i] : empty;
    const std::string& p = i < pred.size() ? pred[i] : empty;
    const std::size_t denom = std::max<std::size_t>({g.size(), p.size(), 1});
    lev += 1.0 - static_cast<double>(edit_distance(g, p)) / static_cast<double>(denom);
    perfect += (g == p) ? 1.0 : 0.0;
    if (!g.empty()) {
      std::array<std::size_t, 256> gc{}, pc{};
      for (unsigned char c : g) ++gc[c];
      for (unsigned char c : p) ++pc[c];
      std::size_t common = 0;
      for (std::size_t c = 0; c < 256; ++c) common += std::min(gc[c], pc[c]);
      digit += static_cast<double>(common) / static_cast<double>(g.size());
    } else if (p.empty()) {
      digit += 1.0;
    }
  }
  const double dn = static_cast<double>(n);
  return {lev / dn, perfect / dn, digit / dn};
}

}  // namespace vlk::phonex
