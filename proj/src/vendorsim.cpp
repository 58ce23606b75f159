#include "vlk/vendorsim.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "vlk/error.hpp"
#include "vlk/parallel.hpp"

namespace vlk::vendorsim {

namespace {

// Sorting before summing makes the total independent of pair order, so
// swapping the vendors cannot change a single bit.
double sorted_mean(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

bool eligible(const Ads& ads) { return ads.size() >= 2; }

struct Scorer {
  const std::map<std::string, Ads>& vendors;
  std::map<std::string, double> self;

  explicit Scorer(const std::map<std::string, Ads>& v) : vendors(v) {
    for (const auto& [name, ads] : vendors) {
      if (eligible(ads)) self[name] = self_similarity(ads);
    }
  }

  std::vector<AliasCandidate> candidates(const std::string& parent, double threshold) const {
    const auto& pa = vendors.at(parent);
    const double sa = self.at(parent);
    std::vector<AliasCandidate> out;
    for (const auto& [name, ads] : vendors) {
      if (name == parent || !eligible(ads)) continue;
      const double denom = sa + self.at(name);
      if (!(denom > 0.0)) continue;
      const double s = 2.0 * vendor_pair_similarity(pa, ads) / denom;
      if (s >= threshold) out.push_back({name, s});
    }
    std::sort(out.begin(), out.end(), [](const AliasCandidate& a, const AliasCandidate& b) {
      return a.sim_norm != b.sim_norm ? a.sim_norm > b.sim_norm : a.vendor < b.vendor;
    });
    return out;
  }
};

}  // namespace

double vendor_pair_similarity(const Ads& a, const Ads& b) {
  if (a.empty() || b.empty()) throw Error("vendor similarity needs at least one ad per vendor");
  std::vector<double> c;
  c.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) c.push_back(cosine(x, y));
  }
  return sorted_mean(c);
}

double self_similarity(const Ads& ads) {
  if (ads.size() < 2) throw Error("self-similarity needs at least two ads");
  std::vector<double> c;
  c.reserve(ads.size() * (ads.size() - 1) / 2);
  for (std::size_t i = 0; i < ads.size(); ++i) {
    for (std::size_t j = i + 1; j < ads.size(); ++j) c.push_back(cosine(ads[i], ads[j]));
  }
  return sorted_mean(c);
}

VendorPairScore normalized_similarity(const Ads& a, const Ads& b) {
  VendorPairScore s;
  s.sim = vendor_pair_similarity(a, b);
  s.sim_self_a = self_similarity(a);
  s.sim_self_b = self_similarity(b);
  const double denom = s.sim_self_a + s.sim_self_b;
  if (!(denom > 0.0)) throw Error("sim_norm undefined: self-similarities sum to a non-positive value");
  s.sim_norm = 2.0 * s.sim / denom;
  return s;
}

std::map<std::string, Ads> group_by_vendor(const EmbeddingSet& set, const std::map<std::string, std::string>& labels) {
  std::map<std::string, Ads> out;
  for (std::size_t r = 0; r < set.rows(); ++r) {
    auto it = labels.find(set.ids()[r]);
    if (it != labels.end()) out[it->second].push_back(set.row(r));
  }
  return out;
}

std::vector<AliasCandidate> alias_candidates(const std::string& parent, const std::map<std::string, Ads>& vendors,
                                             double threshold) {
  auto it = vendors.find(parent);
  if (it == vendors.end()) throw Error("unknown vendor \"" + parent + "\"");
  if (!eligible(it->second)) throw Error("vendor \"" + parent + "\" has fewer than two ads");
  return Scorer(vendors).candidates(parent, threshold);
}

std::vector<AliasScan> scan_aliases(const std::map<std::string, Ads>& vendors, double threshold, unsigned threads) {
  const Scorer scorer(vendors);
  std::vector<std::string> parents;
  for (const auto& [name, ads] : vendors) {
    if (eligible(ads)) parents.push_back(name);
  }
  std::vector<AliasScan> out(parents.size());
  parallel_for(parents.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = {parents[i], scorer.candidates(parents[i], threshold)};
  });
  return out;
}

std::string scatter_csv(const std::vector<AliasScan>& scans) {
  std::ostringstream out;
  out << "parent_vendor,candidate_vendor,sim_norm\n";
  char buf[32];
  for (const auto& s : scans) {
    for (const auto& c : s.candidates) {
      std::snprintf(buf, sizeof buf, "%.6f", c.sim_norm);
      out << s.parent << ',' << c.vendor << ',' << buf << '\n';
    }
  }
  return out.str();
}

}  // namespace vlk::vendorsim
