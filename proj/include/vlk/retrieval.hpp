#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlk/embedstore.hpp"

namespace vlk::retrieval {

struct KMeansConfig {
  std::size_t k = 0;
  std::uint64_t seed = 1111;
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;  // max centroid shift
};

struct KMeansResult {
  std::vector<float> centroids;  // k x dim, L2-normalized
  std::vector<std::uint32_t> assignment;
  /// Sum of squared distances to the assigned (normalized) centroid, one
  /// entry per Lloyd iteration.
  std::vector<double> inertia;
  std::size_t iterations = 0;
};

/// Spherical Lloyd iterations with k-means++ seeding over L2-normalized rows.
KMeansResult spherical_kmeans(const EmbeddingSet& normalized, const KMeansConfig& config);

struct Clusters {
  std::size_t dim = 0;
  std::vector<float> centroids;                   // k x dim
  std::vector<std::vector<std::uint32_t>> members;  // row indices, ascending
  std::size_t count() const { return members.size(); }
  std::span<const float> centroid(std::size_t c) const { return {centroids.data() + c * dim, dim}; }
};

class Index {
 public:
  Index(EmbeddingSet normalized, std::vector<std::string> vendor_of_row, std::optional<Clusters> clusters);

  const EmbeddingSet& embeddings() const { return embeddings_; }
  const std::string& vendor_of(std::size_t row) const { return vendor_of_row_[row]; }
  const std::vector<std::string>& vendors() const { return vendor_of_row_; }
  const std::optional<Clusters>& clusters() const { return clusters_; }
  std::map<std::string, std::string> labels() const;

 private:
  EmbeddingSet embeddings_;
  std::vector<std::string> vendor_of_row_;
  std::optional<Clusters> clusters_;
};

/// Normalizes, attaches labels, and optionally clusters. Throws Error when an
/// id has no label or clusters exceeds the row count.
Index build_index(const EmbeddingSet& set, const std::map<std::string, std::string>& labels, std::size_t clusters,
                  std::uint64_t seed);

struct Hit {
  std::string doc_id;
  double score = 0.0;
  bool operator==(const Hit&) const = default;
};

struct QueryResult {
  std::string query_id;
  std::vector<Hit> hits;
};

/// Top-k by cosine; ties by ascending doc id. A document whose id equals
/// query_id is never returned.
QueryResult search_exact(const Index& index, const std::string& query_id, std::span<const float> query,
                         std::size_t k);

/// Same ranking restricted to members of the `probes` nearest centroids.
QueryResult search_clustered(const Index& index, const std::string& query_id, std::span<const float> query,
                             std::size_t k, std::size_t probes);

struct BatchOptions {
  std::size_t k = 10;
  std::optional<std::size_t> probes;  // set -> clustered search
  unsigned threads = 1;
};

/// Results in query input order regardless of thread count.
std::vector<QueryResult> search_batch(const Index& index, const EmbeddingSet& queries, const BatchOptions& options);

/// Fraction of exact top-k documents also returned by the approximate run.
double recall_against(const std::vector<QueryResult>& exact, const std::vector<QueryResult>& approx);

std::size_t default_cluster_count(std::size_t rows);
std::size_t default_probe_count(std::size_t clusters);

void write_run_jsonl(const std::vector<QueryResult>& run, const std::string& path);
std::vector<QueryResult> read_run_jsonl(const std::string& path);

/// Directory layout: index.emb, index.ids (normalized rows) and index.json
/// (labels, centroids, members).
void save_index(const Index& index, const std::string& dir);
Index load_index(const std::string& dir);

}  // namespace vlk::retrieval
