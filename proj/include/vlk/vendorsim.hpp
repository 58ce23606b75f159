#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "vlk/embedstore.hpp"

namespace vlk::vendorsim {

using Ads = std::vector<std::span<const float>>;

inline constexpr double kDefaultAliasThreshold = 0.8;

struct VendorPairScore {
  std::string vendor_a, vendor_b;
  double sim = 0.0;
  double sim_self_a = 0.0;
  double sim_self_b = 0.0;
  double sim_norm = 0.0;
};

/// Mean cosine over all |A|*|B| cross pairs. Throws Error if either is empty.
double vendor_pair_similarity(const Ads& a, const Ads& b);

/// Mean cosine over distinct unordered pairs. Throws Error for fewer than 2 ads.
double self_similarity(const Ads& ads);

/// sim_norm = 2 sim / (sim_self_a + sim_self_b). Throws Error when the
/// denominator is not positive.
VendorPairScore normalized_similarity(const Ads& a, const Ads& b);

/// Row views grouped by label; rows without a label are ignored.
std::map<std::string, Ads> group_by_vendor(const EmbeddingSet& set, const std::map<std::string, std::string>& labels);

struct AliasCandidate {
  std::string vendor;
  double sim_norm = 0.0;
};

/// Vendors whose sim_norm with parent is at least threshold, descending, ties
/// by vendor id. Single-ad vendors and undefined scores are skipped.
std::vector<AliasCandidate> alias_candidates(const std::string& parent, const std::map<std::string, Ads>& vendors,
                                             double threshold = kDefaultAliasThreshold);

struct AliasScan {
  std::string parent;
  std::vector<AliasCandidate> candidates;
};

/// alias_candidates for every vendor with at least two ads, in vendor order.
std::vector<AliasScan> scan_aliases(const std::map<std::string, Ads>& vendors,
                                    double threshold = kDefaultAliasThreshold, unsigned threads = 1);

/// CSV: parent_vendor,candidate_vendor,sim_norm
std::string scatter_csv(const std::vector<AliasScan>& scans);

}  // namespace vlk::vendorsim
