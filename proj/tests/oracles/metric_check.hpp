// Random retrieval runs scored twice: by the library and by the rank-scan
// oracle. Shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "vlk/metrics.hpp"

namespace oracle {

struct SyntheticRun {
  std::vector<vlk::retrieval::QueryResult> run;
  std::map<std::string, std::string> index_labels;
  std::map<std::string, std::string> query_labels;
};

inline SyntheticRun synthetic_run(std::mt19937_64& rng) {
  SyntheticRun s;
  const auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t docs = pick(1, 50), queries = pick(1, 10), vendors = pick(1, 6);
  std::vector<std::string> ids;
  for (std::size_t d = 0; d < docs; ++d) {
    ids.push_back("d" + std::to_string(d));
    s.index_labels[ids.back()] = "v" + std::to_string(pick(0, vendors - 1));
  }
  for (std::size_t q = 0; q < queries; ++q) {
    vlk::retrieval::QueryResult r;
    r.query_id = "q" + std::to_string(q);
    // one extra vendor id so some queries have no relevant docs
    s.query_labels[r.query_id] = "v" + std::to_string(pick(0, vendors));
    auto order = ids;
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(pick(0, order.size()));
    double score = 1.0;
    for (const auto& id : order) r.hits.push_back({id, score -= 0.01});
    s.run.push_back(std::move(r));
  }
  return s;
}

/// Largest absolute difference between library and oracle over every metric,
/// cutoff and aggregate. Negative when the two disagree structurally.
inline double metric_discrepancy(const SyntheticRun& s, const std::vector<std::size_t>& cutoffs) {
  using vlk::metrics::kRCutoff;
  const auto judgments = vlk::metrics::judge(s.run, s.index_labels, s.query_labels);
  const auto report = vlk::metrics::evaluate(s.run, judgments, cutoffs);

  // metric -> cutoff -> (class, value) per evaluated query
  std::map<std::string, std::map<std::string, std::vector<std::pair<std::string, double>>>> expect;
  std::size_t evaluated = 0, skipped = 0;
  for (const auto& q : s.run) {
    std::set<std::string> relevant;
    const auto& vendor = s.query_labels.at(q.query_id);
    for (const auto& [id, v] : s.index_labels)
      if (v == vendor && id != q.query_id) relevant.insert(id);
    if (relevant.empty()) {
      ++skipped;
      continue;
    }
    ++evaluated;
    std::vector<std::string> ranking;
    for (const auto& h : q.hits) ranking.push_back(h.doc_id);
    for (std::size_t k : cutoffs) {
      const auto sc = rank_scan(ranking, relevant, k);
      const auto key = std::to_string(k);
      expect["precision"][key].push_back({vendor, sc.precision});
      expect["recall"][key].push_back({vendor, sc.recall});
      expect["map"][key].push_back({vendor, sc.ap});
      expect["mrr"][key].push_back({vendor, sc.rr});
    }
    const double rp = r_precision(ranking, relevant);
    expect["r_precision"][kRCutoff].push_back({vendor, rp});
    expect["macro_f1"][kRCutoff].push_back({vendor, rp});
  }
  if (report.evaluated_queries != evaluated || report.skipped_queries != skipped) return -1;
  double worst = 0;
  for (const auto& [metric, by_cut] : expect) {
    for (const auto& [cut, values] : by_cut) {
      const auto agg = aggregate(values);
      const auto& got = report.at(metric, cut);
      const double mean = metric == "macro_f1" ? agg.macro : agg.mean;
      worst = std::max({worst, std::abs(got.mean - mean), std::abs(got.std_classes - agg.std)});
    }
  }
  return worst;
}

}  // namespace oracle
