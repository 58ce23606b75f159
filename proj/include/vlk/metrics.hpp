#pragma once

#include <map>
#include <string>
#include <vector>

#include "vlk/retrieval.hpp"

namespace vlk::metrics {

using retrieval::QueryResult;

struct RelevanceJudgments {
  /// query id -> sorted ids of indexed ads with the query's vendor (the query
  /// itself excluded). Only queries with R >= 1 appear.
  std::map<std::string, std::vector<std::string>> relevant_of;
  std::map<std::string, std::size_t> R_of;
  std::map<std::string, std::string> class_of;
  std::size_t skipped_queries = 0;
};

/// Relevance is vendor equality. Throws Error for a query without a label.
RelevanceJudgments judge(const std::vector<QueryResult>& run, const std::map<std::string, std::string>& index_labels,
                         const std::map<std::string, std::string>& query_labels);

struct PerQuery {
  std::map<std::size_t, double> precision, recall, average_precision, reciprocal_rank;
  double r_precision = 0.0;
  double f1_x = 0.0;
};

PerQuery score_query(const std::vector<std::string>& ranking, const std::vector<std::string>& relevant,
                     const std::vector<std::size_t>& cutoffs);

struct Aggregate {
  double mean = 0.0;
  double std_classes = 0.0;
  std::map<std::string, double> per_class;
};

/// Mean over queries, per-class means, population std of the class means.
Aggregate aggregate_by_class(const std::map<std::string, double>& per_query,
                             const std::map<std::string, std::string>& class_of);

inline constexpr const char* kRCutoff = "X";

struct MetricReport {
  /// metric -> cutoff ("1", "5", ... or "X") -> aggregate.
  std::map<std::string, std::map<std::string, Aggregate>> values;
  std::vector<std::size_t> cutoffs;
  std::size_t skipped_queries = 0;
  std::size_t evaluated_queries = 0;

  const Aggregate& at(const std::string& metric, const std::string& cutoff) const;
};

/// Metric names: precision, recall, map, mrr (per cutoff), r_precision and
/// macro_f1 (cutoff "X"). macro_f1's mean is the unweighted mean of its
/// per-class means.
MetricReport evaluate(const std::vector<QueryResult>& run, const RelevanceJudgments& judgments,
                      const std::vector<std::size_t>& cutoffs);

std::string report_to_json(const MetricReport& report);
/// Metric x cutoff grid with "mean±std" cells.
std::string report_to_csv(const MetricReport& report);

}  // namespace vlk::metrics
