#include "vlk/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vlk/error.hpp"
#include "vlk/parallel.hpp"

namespace vlk::retrieval {

namespace {

struct Scored {
  double score;
  std::uint32_t row;
};

std::vector<float> normalized_query(std::span<const float> query, std::size_t dim) {
  if (query.size() != dim) {
    throw Error("query dimension " + std::to_string(query.size()) + " does not match index dimension " +
                std::to_string(dim));
  }
  const double n = norm(query);
  if (n == 0.0) throw Error("zero query vector");
  std::vector<float> q(query.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = static_cast<float>(query[i] / n);
  return q;
}

double score(const EmbeddingSet& docs, std::size_t row, std::span<const float> q) {
  return std::clamp(dot(docs.row(row), q), -1.0, 1.0);
}

template <class Rows>
QueryResult rank(const Index& index, const std::string& query_id, std::span<const float> q, const Rows& rows,
                 std::size_t k) {
  const auto& docs = index.embeddings();
  const auto& ids = docs.ids();
  const std::ptrdiff_t self = docs.find(query_id);

  std::vector<Scored> scored;
  scored.reserve(rows.size());
  for (auto r : rows) {
    if (static_cast<std::ptrdiff_t>(r) == self) continue;
    scored.push_back({score(docs, r, q), static_cast<std::uint32_t>(r)});
  }
  auto better = [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return ids[a.row] < ids[b.row];
  };
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);

  QueryResult out;
  out.query_id = query_id;
  out.hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.hits.push_back({ids[scored[i].row], scored[i].score});
  return out;
}

struct RowRange {
  std::size_t n;
  struct It {
    std::size_t v;
    std::size_t operator*() const { return v; }
    It& operator++() {
      ++v;
      return *this;
    }
    bool operator!=(const It& o) const { return v != o.v; }
  };
  It begin() const { return {0}; }
  It end() const { return {n}; }
  std::size_t size() const { return n; }
};

}  // namespace

Index::Index(EmbeddingSet normalized, std::vector<std::string> vendor_of_row, std::optional<Clusters> clusters)
    : embeddings_(std::move(normalized)), vendor_of_row_(std::move(vendor_of_row)), clusters_(std::move(clusters)) {
  if (vendor_of_row_.size() != embeddings_.rows()) throw Error("index: one vendor label per row required");
}

std::map<std::string, std::string> Index::labels() const {
  std::map<std::string, std::string> out;
  for (std::size_t r = 0; r < embeddings_.rows(); ++r) out[embeddings_.ids()[r]] = vendor_of_row_[r];
  return out;
}

std::size_t default_cluster_count(std::size_t rows) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(rows))));
}

std::size_t default_probe_count(std::size_t clusters) {
  return std::max<std::size_t>(1, (clusters + 9) / 10);
}

Index build_index(const EmbeddingSet& set, const std::map<std::string, std::string>& labels, std::size_t clusters,
                  std::uint64_t seed) {
  std::vector<std::string> vendor_of_row;
  vendor_of_row.reserve(set.rows());
  for (const auto& id : set.ids()) {
    auto it = labels.find(id);
    if (it == labels.end()) throw Error("index: ad \"" + id + "\" has no vendor label");
    vendor_of_row.push_back(it->second);
  }
  if (clusters > set.rows()) {
    throw Error("index: " + std::to_string(clusters) + " clusters requested for " + std::to_string(set.rows()) + " rows");
  }
  EmbeddingSet normalized = set.normalized() ? set : l2_normalize(set);
  std::optional<Clusters> cl;
  if (clusters > 0) {
    const auto km = spherical_kmeans(normalized, {clusters, seed, 100, 1e-6});
    Clusters c;
    c.dim = normalized.dim();
    c.centroids = km.centroids;
    c.members.resize(clusters);
    for (std::size_t r = 0; r < km.assignment.size(); ++r) c.members[km.assignment[r]].push_back(static_cast<std::uint32_t>(r));
    cl = std::move(c);
  }
  return Index(std::move(normalized), std::move(vendor_of_row), std::move(cl));
}

QueryResult search_exact(const Index& index, const std::string& query_id, std::span<const float> query,
                         std::size_t k) {
  if (k < 1) throw Error("k must be at least 1");
  const auto q = normalized_query(query, index.embeddings().dim());
  return rank(index, query_id, q, RowRange{index.embeddings().rows()}, k);
}

QueryResult search_clustered(const Index& index, const std::string& query_id, std::span<const float> query,
                             std::size_t k, std::size_t probes) {
  if (k < 1) throw Error("k must be at least 1");
  if (!index.clusters()) throw Error("index has no clusters; build it with clusters > 0");
  const auto& cl = *index.clusters();
  if (probes < 1 || probes > cl.count()) {
    throw Error("probes must be in [1, " + std::to_string(cl.count()) + "], got " + std::to_string(probes));
  }
  const auto q = normalized_query(query, index.embeddings().dim());

  std::vector<Scored> centroid_scores(cl.count());
  for (std::size_t c = 0; c < cl.count(); ++c) centroid_scores[c] = {dot(cl.centroid(c), q), static_cast<std::uint32_t>(c)};
  std::partial_sort(centroid_scores.begin(), centroid_scores.begin() + static_cast<std::ptrdiff_t>(probes),
                    centroid_scores.end(), [](const Scored& a, const Scored& b) {
                      return a.score != b.score ? a.score > b.score : a.row < b.row;
                    });
  std::vector<std::uint32_t> rows;
  for (std::size_t p = 0; p < probes; ++p) {
    const auto& m = cl.members[centroid_scores[p].row];
    rows.insert(rows.end(), m.begin(), m.end());
  }
  std::sort(rows.begin(), rows.end());
  return rank(index, query_id, q, rows, k);
}

std::vector<QueryResult> search_batch(const Index& index, const EmbeddingSet& queries, const BatchOptions& options) {
  std::vector<QueryResult> out(queries.rows());
  parallel_for(queries.rows(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& id = queries.ids()[i];
      out[i] = options.probes ? search_clustered(index, id, queries.row(i), options.k, *options.probes)
                              : search_exact(index, id, queries.row(i), options.k);
    }
  });
  return out;
}

double recall_against(const std::vector<QueryResult>& exact, const std::vector<QueryResult>& approx) {
  if (exact.size() != approx.size()) throw Error("recall: runs have different query counts");
  std::size_t found = 0, total = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    std::vector<std::string> truth;
    for (const auto& h : exact[i].hits) truth.push_back(h.doc_id);
    std::sort(truth.begin(), truth.end());
    total += truth.size();
    for (const auto& h : approx[i].hits) found += std::binary_search(truth.begin(), truth.end(), h.doc_id) ? 1 : 0;
  }
  return total == 0 ? 1.0 : static_cast<double>(found) / static_cast<double>(total);
}

void write_run_jsonl(const std::vector<QueryResult>& run, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot write file");
  for (const auto& r : run) {
    nlohmann::json j;
    j["query"] = r.query_id;
    j["hits"] = nlohmann::json::array();
    for (const auto& h : r.hits) j["hits"].push_back({{"doc", h.doc_id}, {"score", h.score}});
    out << j.dump() << '\n';
  }
}

std::vector<QueryResult> read_run_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  std::vector<QueryResult> run;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      QueryResult r;
      r.query_id = j.at("query").get<std::string>();
      for (const auto& h : j.at("hits")) r.hits.push_back({h.at("doc").get<std::string>(), h.at("score").get<double>()});
      run.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return run;
}

void save_index(const Index& index, const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_embeddings(index.embeddings(), dir + "/index.emb", dir + "/index.ids");
  nlohmann::json j;
  j["labels"] = index.vendors();
  if (const auto& cl = index.clusters()) {
    j["clusters"] = {{"dim", cl->dim}, {"centroids", cl->centroids}, {"members", cl->members}};
  }
  std::ofstream out(dir + "/index.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(dir + "/index.json: cannot write file");
  out << j.dump() << '\n';
}

Index load_index(const std::string& dir) {
  auto emb = load_embeddings(dir + "/index.emb", dir + "/index.ids");
  std::ifstream in(dir + "/index.json", std::ios::binary);
  if (!in) throw Error(dir + "/index.json: cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    const auto j = nlohmann::json::parse(buf.str());
    auto labels = j.at("labels").get<std::vector<std::string>>();
    std::optional<Clusters> cl;
    if (j.contains("clusters")) {
      Clusters c;
      c.dim = j["clusters"].at("dim").get<std::size_t>();
      c.centroids = j["clusters"].at("centroids").get<std::vector<float>>();
      c.members = j["clusters"].at("members").get<std::vector<std::vector<std::uint32_t>>>();
      cl = std::move(c);
    }
    EmbeddingSet normalized(emb.ids(), emb.values(), emb.dim(), true);
    return Index(std::move(normalized), std::move(labels), std::move(cl));
  } catch (const nlohmann::json::exception& e) {
    throw Error(dir + "/index.json: " + e.what());
  }
}

}  // namespace vlk::retrieval
