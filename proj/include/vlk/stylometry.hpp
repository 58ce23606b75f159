#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vlk::stylometry {

struct PairSimilarity {
  double levenshtein_sim = 0.0;
  double jaccard_sim = 0.0;
  double obershelp_sim = 0.0;
  double mean = 0.0;
};

struct Options {
  bool lowercase_tokens = false;  // Jaccard token sets; casing is stylistic signal
  unsigned threads = 1;
};

/// Optimal-string-alignment Damerau-Levenshtein distance over code points.
std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b);

/// Matched characters of the Ratcliff-Obershelp recursion: the longest common
/// substring (earliest in a, then in b) plus matches found recursively to its
/// left and right.
std::size_t obershelp_matches(std::u32string_view a, std::u32string_view b);

double levenshtein_similarity(std::string_view a, std::string_view b);
double jaccard_similarity(std::string_view a, std::string_view b, bool lowercase = false);
double obershelp_similarity(std::string_view a, std::string_view b);

PairSimilarity pair_similarity(std::string_view a, std::string_view b, const Options& options = {});

/// Mean pair similarity over all unordered pairs of distinct positions.
/// Throws Error for fewer than two ads.
double vendor_within_similarity(const std::vector<std::string>& ads, const Options& options = {});

/// Mean over cross pairs, skipping pairs whose texts are identical (the same
/// ad listed in both markets). Throws Error when a list is empty or no pair
/// survives.
double vendor_across_similarity(const std::vector<std::string>& ads_a, const std::vector<std::string>& ads_b,
                                const Options& options = {});

}  // namespace vlk::stylometry
