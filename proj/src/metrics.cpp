#include "vlk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vlk/error.hpp"

namespace vlk::metrics {

RelevanceJudgments judge(const std::vector<QueryResult>& run, const std::map<std::string, std::string>& index_labels,
                         const std::map<std::string, std::string>& query_labels) {
  std::map<std::string, std::vector<std::string>> by_vendor;
  for (const auto& [id, vendor] : index_labels) by_vendor[vendor].push_back(id);

  RelevanceJudgments out;
  for (const auto& r : run) {
    auto q = query_labels.find(r.query_id);
    if (q == query_labels.end()) throw Error("query \"" + r.query_id + "\" has no vendor label");
    std::vector<std::string> relevant;
    if (auto it = by_vendor.find(q->second); it != by_vendor.end()) {
      for (const auto& id : it->second) {
        if (id != r.query_id) relevant.push_back(id);
      }
    }
    if (relevant.empty()) {
      ++out.skipped_queries;
      continue;
    }
    out.R_of[r.query_id] = relevant.size();
    out.class_of[r.query_id] = q->second;
    out.relevant_of[r.query_id] = std::move(relevant);
  }
  return out;
}

PerQuery score_query(const std::vector<std::string>& ranking, const std::vector<std::string>& relevant,
                     const std::vector<std::size_t>& cutoffs) {
  const std::set<std::string> rel(relevant.begin(), relevant.end());
  const std::size_t R = rel.size();
  if (R == 0) throw Error("score_query: empty relevant set");

  // hits[i] = relevant documents among the first i ranks
  std::vector<std::size_t> hits(ranking.size() + 1, 0);
  // extended precision so AP is rounded once, at the final division
  std::vector<long double> precision_sum(ranking.size() + 1, 0.0L);
  std::size_t first = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const bool is_rel = rel.count(ranking[i]) > 0;
    hits[i + 1] = hits[i] + (is_rel ? 1 : 0);
    precision_sum[i + 1] = precision_sum[i];
    if (is_rel) {
      precision_sum[i + 1] += static_cast<long double>(hits[i + 1]) / static_cast<long double>(i + 1);
      if (first == 0) first = i + 1;
    }
  }
  auto at = [&](std::size_t k) { return std::min(k, ranking.size()); };

  PerQuery out;
  for (std::size_t k : cutoffs) {
    if (k < 1) throw Error("cutoff must be at least 1");
    const double h = static_cast<double>(hits[at(k)]);
    out.precision[k] = h / static_cast<double>(k);
    out.recall[k] = h / static_cast<double>(R);
    out.average_precision[k] =
        static_cast<double>(precision_sum[at(k)] / static_cast<long double>(std::min(R, k)));
    out.reciprocal_rank[k] = (first != 0 && first <= k) ? 1.0 / static_cast<double>(first) : 0.0;
  }
  out.r_precision = static_cast<double>(hits[at(R)]) / static_cast<double>(R);
  out.f1_x = out.r_precision;
  return out;
}

Aggregate aggregate_by_class(const std::map<std::string, double>& per_query,
                             const std::map<std::string, std::string>& class_of) {
  if (per_query.empty()) throw Error("aggregate_by_class: no queries");
  Aggregate out;
  std::map<std::string, std::pair<double, std::size_t>> sums;
  double total = 0.0;
  for (const auto& [q, v] : per_query) {
    auto c = class_of.find(q);
    if (c == class_of.end()) throw Error("aggregate_by_class: query \"" + q + "\" has no class");
    total += v;
    auto& s = sums[c->second];
    s.first += v;
    ++s.second;
  }
  out.mean = total / static_cast<double>(per_query.size());
  double class_mean = 0.0;
  for (const auto& [c, s] : sums) {
    const double m = s.first / static_cast<double>(s.second);
    out.per_class[c] = m;
    class_mean += m;
  }
  class_mean /= static_cast<double>(sums.size());
  double var = 0.0;
  for (const auto& [c, m] : out.per_class) var += (m - class_mean) * (m - class_mean);
  out.std_classes = std::sqrt(var / static_cast<double>(sums.size()));
  return out;
}

const Aggregate& MetricReport::at(const std::string& metric, const std::string& cutoff) const {
  auto m = values.find(metric);
  if (m == values.end()) throw Error("report has no metric " + metric);
  auto c = m->second.find(cutoff);
  if (c == m->second.end()) throw Error("report has no cutoff " + cutoff + " for " + metric);
  return c->second;
}

MetricReport evaluate(const std::vector<QueryResult>& run, const RelevanceJudgments& judgments,
                      const std::vector<std::size_t>& cutoffs) {
  if (cutoffs.empty()) throw Error("at least one cutoff required");
  for (auto k : cutoffs) {
    if (k < 1) throw Error("cutoff must be at least 1");
  }
  std::vector<std::size_t> ks(cutoffs);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::map<std::string, std::map<std::size_t, double>> p, rc, ap, rr;
  std::map<std::string, double> rp, f1;
  std::set<std::string> seen;
  for (const auto& r : run) {
    if (!seen.insert(r.query_id).second) throw Error("query \"" + r.query_id + "\" appears twice in the run");
    auto rel = judgments.relevant_of.find(r.query_id);
    if (rel == judgments.relevant_of.end()) continue;
    std::vector<std::string> ranking;
    ranking.reserve(r.hits.size());
    for (const auto& h : r.hits) ranking.push_back(h.doc_id);
    const auto s = score_query(ranking, rel->second, ks);
    for (auto k : ks) {
      p[r.query_id][k] = s.precision.at(k);
      rc[r.query_id][k] = s.recall.at(k);
      ap[r.query_id][k] = s.average_precision.at(k);
      rr[r.query_id][k] = s.reciprocal_rank.at(k);
    }
    rp[r.query_id] = s.r_precision;
    f1[r.query_id] = s.f1_x;
  }

  MetricReport report;
  report.cutoffs = ks;
  report.skipped_queries = judgments.skipped_queries;
  report.evaluated_queries = rp.size();
  if (rp.empty()) return report;

  auto per_cutoff = [&](const std::map<std::string, std::map<std::size_t, double>>& src, const std::string& name) {
    for (auto k : ks) {
      std::map<std::string, double> v;
      for (const auto& [q, m] : src) v[q] = m.at(k);
      report.values[name][std::to_string(k)] = aggregate_by_class(v, judgments.class_of);
    }
  };
  per_cutoff(p, "precision");
  per_cutoff(rc, "recall");
  per_cutoff(ap, "map");
  per_cutoff(rr, "mrr");
  report.values["r_precision"][kRCutoff] = aggregate_by_class(rp, judgments.class_of);

  Aggregate macro = aggregate_by_class(f1, judgments.class_of);
  double sum = 0.0;
  for (const auto& [c, m] : macro.per_class) sum += m;
  macro.mean = sum / static_cast<double>(macro.per_class.size());
  report.values["macro_f1"][kRCutoff] = std::move(macro);
  return report;
}

namespace {

const std::vector<std::string> kMetricOrder = {"precision", "recall", "map", "mrr", "r_precision", "macro_f1"};

std::vector<std::string> cutoff_keys(const MetricReport& report) {
  std::vector<std::string> keys;
  for (auto k : report.cutoffs) keys.push_back(std::to_string(k));
  keys.push_back(kRCutoff);
  return keys;
}

}  // namespace

std::string report_to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  for (const auto& metric : kMetricOrder) {
    auto m = report.values.find(metric);
    if (m == report.values.end()) continue;
    for (const auto& key : cutoff_keys(report)) {
      auto c = m->second.find(key);
      if (c == m->second.end()) continue;
      nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
      for (const auto& [cls, v] : c->second.per_class) per_class[cls] = v;
      j[metric][key] = {{"mean", c->second.mean}, {"std_classes", c->second.std_classes}, {"per_class", per_class}};
    }
  }
  j["evaluated_queries"] = report.evaluated_queries;
  j["skipped_queries"] = report.skipped_queries;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const MetricReport& report) {
  const auto keys = cutoff_keys(report);
  std::ostringstream out;
  out << "metric";
  for (const auto& k : keys) out << ',' << (k == kRCutoff ? std::string("@X") : "@" + k);
  out << '\n';
  for (const auto& metric : kMetricOrder) {
    auto m = report.values.find(metric);
    if (m == report.values.end()) continue;
    out << metric;
    for (const auto& k : keys) {
      out << ',';
      auto c = m->second.find(k);
      if (c == m->second.end()) continue;
      char cell[64];
      std::snprintf(cell, sizeof cell, "%.4f\xC2\xB1%.4f", c->second.mean, c->second.std_classes);
      out << cell;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace vlk::metrics
