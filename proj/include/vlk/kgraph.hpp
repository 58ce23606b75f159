#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlk/metrics.hpp"
#include "vlk/retrieval.hpp"

namespace vlk::kgraph {

inline constexpr std::size_t kDefaultTopK = 10;
inline constexpr double kDefaultThreshold = 0.50;

enum class Mode { rprecision, topk_threshold };

struct Node {
  std::string ad_id;
  bool is_query = false;
  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string a, b;  // a < b
  double weight = 0.0;
  bool operator==(const Edge&) const = default;
};

struct Meta {
  Mode mode = Mode::rprecision;
  std::optional<std::size_t> k;
  std::optional<double> threshold;
  std::string query_id;
  bool operator==(const Meta&) const = default;
};

/// Complete weighted graph over a query ad and its retrieved ads. Nodes and
/// edges are kept in ascending id order.
struct KnowledgeGraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  Meta meta;
  bool operator==(const KnowledgeGraph&) const = default;
};

/// Top-R exact hits, R being the query's relevant count. Throws Error when
/// the query has no judgment (unlabeled or R = 0).
KnowledgeGraph build_graph_rprecision(const std::string& query_id, std::span<const float> query,
                                      const retrieval::Index& index, const metrics::RelevanceJudgments& judgments);

/// Top-k exact hits with query score >= threshold.
KnowledgeGraph build_graph_topk(const std::string& query_id, std::span<const float> query,
                                const retrieval::Index& index, std::size_t k = kDefaultTopK,
                                double threshold = kDefaultThreshold);

enum class Format { dot, graphml, json };

Format parse_format(const std::string& name);
std::string to_dot(const KnowledgeGraph& g);
std::string to_graphml(const KnowledgeGraph& g);
std::string to_json(const KnowledgeGraph& g);
KnowledgeGraph from_json(const std::string& text);
std::string render(const KnowledgeGraph& g, Format format);
void export_graph(const KnowledgeGraph& g, Format format, const std::string& path);

}  // namespace vlk::kgraph
