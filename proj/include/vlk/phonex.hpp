#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vlk::phonex {

/// Tables that map obfuscated surface forms back to digits. Keys of the
/// character tables are single UTF-8 encoded code points; emoji and unicode
/// keys may be multi-code-point sequences.
struct ObfuscationLexicon {
  std::map<std::string, std::string> word_to_digits;   // lowercase words
  std::map<std::string, std::string> homophones;       // only used in strict mode
  std::map<std::string, std::string> lookalike_chars;  // 'O' -> "0", 'l' -> "1", ...
  std::map<std::string, std::string> emoji_digits;     // keycaps, smiley
  std::map<std::string, std::string> unicode_digits;   // fullwidth, math bold, circled, ...
  std::set<std::string> confounder_chars;

  /// The built-in tables.
  static const ObfuscationLexicon& builtin();

  /// Loads overrides from JSON. Keys absent from the file keep the built-in
  /// table. Throws Error on malformed content.
  static ObfuscationLexicon from_json_file(const std::string& path);
  static ObfuscationLexicon from_json_text(std::string_view text);

  /// Throws Error if any value is not a non-empty digit string.
  void validate() const;
};

struct Span {
  std::size_t begin = 0;  // byte offsets, half-open
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct DigitEvent {
  char digit;
  Span span;  // source of the event; digits from one word share a span
  bool operator==(const DigitEvent&) const = default;
};

struct PhoneCandidate {
  std::string digits;
  Span span;
  std::size_t events = 0;
};

struct ExtractConfig {
  int gap_limit_tokens = 2;
  std::size_t min_len = 7;
  std::size_t max_len = 11;
  /// "to"/"too" read as 2. Off by default; prose is full of "to".
  bool homophones = false;
  /// Literal ASCII digits only. Used for privacy masking, where spans must
  /// be stable under re-masking.
  bool masking = false;
};

/// Left-to-right digit events recovered from noisy text.
std::vector<DigitEvent> deobfuscate_scan(std::string_view text,
                                         const ObfuscationLexicon& lexicon = ObfuscationLexicon::builtin(),
                                         const ExtractConfig& config = {});

/// Groups digit events into phone candidates of min_len..max_len digits.
std::vector<PhoneCandidate> extract_phones(std::string_view text, const ExtractConfig& config = {},
                                           const ObfuscationLexicon& lexicon = ObfuscationLexicon::builtin());

enum class Scheme : std::uint8_t {
  char_sub = 1 << 0,
  word_sub = 1 << 1,
  confounders = 1 << 2,
  emoji = 1 << 3,
  unicode = 1 << 4,
};

class SchemeSet {
 public:
  constexpr SchemeSet() = default;
  constexpr SchemeSet(std::initializer_list<Scheme> schemes) {
    for (auto s : schemes) bits_ |= static_cast<std::uint8_t>(s);
  }
  static constexpr SchemeSet all() { return from_bits(0x1F); }
  static constexpr SchemeSet from_bits(std::uint8_t bits) {
    SchemeSet s;
    s.bits_ = bits & 0x1F;
    return s;
  }
  constexpr bool has(Scheme s) const { return (bits_ & static_cast<std::uint8_t>(s)) != 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }

 private:
  std::uint8_t bits_ = 0;
};

/// Parses "char_sub,word_sub,..." or "all"/"none".
SchemeSet parse_schemes(std::string_view names);

struct ObfuscateOptions {
  /// Per-unit probability of applying a selected substitution scheme.
  double rate = 0.5;
  /// Keep the output recoverable by extract_phones (lookalikes stay anchored
  /// next to a literal digit, tens words are kept apart from unit words).
  bool extractable = true;
  /// Require a 7..11 digit input.
  bool enforce_length = true;
  /// Always pick the first listed surface form ('l' for 1, 'O' for 0, ...).
  bool canonical = false;
  bool homophones = false;
};

/// Seeded adversarial formatter for a digit string. Deterministic for fixed
/// (number, schemes, seed, options). Throws Error on invalid numbers.
std::string obfuscate(std::string_view number, SchemeSet schemes, std::uint64_t seed,
                      const ObfuscateOptions& options = {});

struct ExtractionAccuracy {
  double levenshtein_acc = 0.0;
  double perfect_acc = 0.0;
  double digit_acc = 0.0;
};

/// Position-aligned comparison; missing entries on either side pair with "".
ExtractionAccuracy eval_extraction(const std::vector<std::string>& gold, const std::vector<std::string>& pred);

/// Plain Levenshtein distance over bytes (inputs are digit strings).
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace vlk::phonex
