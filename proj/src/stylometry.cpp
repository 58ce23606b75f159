#include "vlk/stylometry.hpp"

#include <algorithm>
#include <set>

#include "vlk/error.hpp"
#include "vlk/parallel.hpp"
#include "vlk/utf8.hpp"

namespace vlk::stylometry {

namespace {

std::set<std::string> token_set(std::string_view s, bool lowercase) {
  std::set<std::string> out;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < s.size()) {
    while (i < s.size() && space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !space(s[j])) ++j;
    if (j > i) {
      std::string tok(s.substr(i, j - i));
      if (lowercase) {
        for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      out.insert(std::move(tok));
    }
    i = j;
  }
  return out;
}

struct LongestMatch {
  std::size_t a = 0, b = 0, length = 0;
};

// Longest common substring; ties go to the smallest start in a, then in b.
LongestMatch longest_common_substring(std::u32string_view a, std::u32string_view b) {
  LongestMatch best;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      if (cur[j] == 0) continue;
      const std::size_t len = cur[j];
      const std::size_t sa = i - len, sb = j - len;
      if (len > best.length || (len == best.length && (sa < best.a || (sa == best.a && sb < best.b)))) {
        best = {sa, sb, len};
      }
    }
    std::swap(prev, cur);
    std::fill(cur.begin(), cur.end(), 0);
  }
  return best;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b) {
  const std::size_t n = a.size(), m = b.size();
  // Three rolling rows: i-2, i-1, i.
  std::vector<std::size_t> r2(m + 1), r1(m + 1), r0(m + 1);
  for (std::size_t j = 0; j <= m; ++j) r1[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    r0[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      std::size_t d = std::min({r1[j] + 1, r0[j - 1] + 1, r1[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) d = std::min(d, r2[j - 2] + 1);
      r0[j] = d;
    }
    std::swap(r2, r1);
    std::swap(r1, r0);
  }
  return r1[m];
}

std::size_t obershelp_matches(std::u32string_view a, std::u32string_view b) {
  if (a.empty() || b.empty()) return 0;
  const auto lm = longest_common_substring(a, b);
  if (lm.length == 0) return 0;
  return lm.length + obershelp_matches(a.substr(0, lm.a), b.substr(0, lm.b)) +
         obershelp_matches(a.substr(lm.a + lm.length), b.substr(lm.b + lm.length));
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  const auto ua = utf8::to_u32(a), ub = utf8::to_u32(b);
  const auto denom = std::max<std::size_t>({ua.size(), ub.size(), 1});
  return 1.0 - static_cast<double>(damerau_levenshtein(ua, ub)) / static_cast<double>(denom);
}

double jaccard_similarity(std::string_view a, std::string_view b, bool lowercase) {
  const auto ta = token_set(a, lowercase), tb = token_set(b, lowercase);
  if (ta.empty() && tb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& t : ta) common += tb.count(t);
  const std::size_t uni = ta.size() + tb.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

double obershelp_similarity(std::string_view a, std::string_view b) {
  const auto ua = utf8::to_u32(a), ub = utf8::to_u32(b);
  if (ua.empty() && ub.empty()) return 1.0;
  // The recursion's tie-break depends on argument order; taking the larger
  // count of both orders keeps the measure symmetric.
  const std::size_t m = std::max(obershelp_matches(ua, ub), obershelp_matches(ub, ua));
  return 2.0 * static_cast<double>(m) / static_cast<double>(ua.size() + ub.size());
}

PairSimilarity pair_similarity(std::string_view a, std::string_view b, const Options& options) {
  PairSimilarity s;
  s.levenshtein_sim = levenshtein_similarity(a, b);
  s.jaccard_sim = jaccard_similarity(a, b, options.lowercase_tokens);
  s.obershelp_sim = obershelp_similarity(a, b);
  s.mean = (s.levenshtein_sim + s.jaccard_sim + s.obershelp_sim) / 3.0;
  return s;
}

double vendor_within_similarity(const std::vector<std::string>& ads, const Options& options) {
  if (ads.size() < 2) throw Error("within-vendor similarity needs at least two ads");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < ads.size(); ++i) {
    for (std::size_t j = i + 1; j < ads.size(); ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) values[k] = pair_similarity(ads[pairs[k].first], ads[pairs[k].second], options).mean;
  });
  return mean_of(values);
}

double vendor_across_similarity(const std::vector<std::string>& ads_a, const std::vector<std::string>& ads_b,
                                const Options& options) {
  if (ads_a.empty() || ads_b.empty()) throw Error("across-market similarity needs ads on both sides");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < ads_a.size(); ++i) {
    for (std::size_t j = 0; j < ads_b.size(); ++j) {
      if (ads_a[i] != ads_b[j]) pairs.emplace_back(i, j);
    }
  }
  if (pairs.empty()) throw Error("no distinct cross pairs");
  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) values[k] = pair_similarity(ads_a[pairs[k].first], ads_b[pairs[k].second], options).mean;
  });
  return mean_of(values);
}

}  // namespace vlk::stylometry
