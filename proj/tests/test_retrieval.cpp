#include <gtest/gtest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "test_util.hpp"
#include "vlk/error.hpp"
#include "vlk/retrieval.hpp"

using namespace vlk;
using namespace vlk::retrieval;

namespace {

EmbeddingSet random_set(std::mt19937_64& rng, std::size_t rows, std::size_t dim, const std::string& prefix = "d") {
  std::normal_distribution<float> g;
  std::vector<std::string> ids;
  std::vector<float> v(rows * dim);
  for (auto& x : v) x = g(rng);
  for (std::size_t r = 0; r < rows; ++r) ids.push_back(prefix + std::to_string(r));
  return EmbeddingSet(ids, v, dim);
}

std::map<std::string, std::string> labels_for(const EmbeddingSet& s, std::size_t classes) {
  std::map<std::string, std::string> l;
  for (std::size_t r = 0; r < s.rows(); ++r) l[s.ids()[r]] = "v" + std::to_string(r % classes);
  return l;
}

std::vector<float> row_vec(const EmbeddingSet& s, std::size_t r) {
  return {s.row(r).begin(), s.row(r).end()};
}

}  // namespace

TEST(BuildIndex, FlatAndErrors) {
  std::mt19937_64 rng(1);
  const auto set = random_set(rng, 20, 4);
  const auto idx = build_index(set, labels_for(set, 3), 0, 1111);
  EXPECT_FALSE(idx.clusters());
  EXPECT_TRUE(idx.embeddings().normalized());
  auto labels = labels_for(set, 3);
  labels.erase("d5");
  EXPECT_THROW(build_index(set, labels, 0, 1111), Error);
  EXPECT_THROW(build_index(set, labels_for(set, 3), 21, 1111), Error);
}

TEST(BuildIndex, OneClusterPerRow) {
  std::mt19937_64 rng(2);
  const auto set = random_set(rng, 30, 5);
  const auto idx = build_index(set, labels_for(set, 2), 30, 1111);
  ASSERT_TRUE(idx.clusters());
  for (const auto& m : idx.clusters()->members) EXPECT_EQ(m.size(), 1u);
}

TEST(KMeans, InertiaNonIncreasingAndCentroidsNormalized) {
  std::mt19937_64 rng(3);
  const auto set = l2_normalize(random_set(rng, 200, 16));
  const auto km = spherical_kmeans(set, {8, 1111, 100, 1e-6});
  ASSERT_FALSE(km.inertia.empty());
  for (std::size_t i = 1; i < km.inertia.size(); ++i) EXPECT_LE(km.inertia[i], km.inertia[i - 1] * (1 + 1e-9));
  for (std::size_t c = 0; c < 8; ++c) {
    EXPECT_NEAR(norm(std::span<const float>(km.centroids.data() + c * 16, 16)), 1.0, 1e-5);
  }
  const auto again = spherical_kmeans(set, {8, 1111, 100, 1e-6});
  EXPECT_EQ(again.assignment, km.assignment);
  EXPECT_EQ(again.centroids, km.centroids);
}

TEST(SearchExact, OneHotGeometry) {
  const EmbeddingSet set({"e1", "e2", "e3"}, {1, 0, 0, 0, 1, 0, 0, 0, 1}, 3);
  const auto idx = build_index(set, {{"e1", "a"}, {"e2", "a"}, {"e3", "b"}}, 0, 1111);
  const std::vector<float> q = {1, 0, 0};
  const auto r = search_exact(idx, "query", q, 2);
  ASSERT_EQ(r.hits.size(), 2u);
  EXPECT_EQ(r.hits[0], (Hit{"e1", 1.0}));
  EXPECT_EQ(r.hits[1], (Hit{"e2", 0.0}));
  // the query's own id is never returned
  const auto self = search_exact(idx, "e1", q, 3);
  ASSERT_EQ(self.hits.size(), 2u);
  EXPECT_EQ(self.hits[0].doc_id, "e2");
}

TEST(SearchExact, OrthogonalQueryFullTie) {
  const EmbeddingSet set({"c", "a", "b"}, {1, 0, 0, 1, 0, 0, 1, 0, 0}, 3);
  const auto idx = build_index(set, {{"a", "x"}, {"b", "x"}, {"c", "x"}}, 0, 1111);
  const auto r = search_exact(idx, "q", std::vector<float>{0, 0, 1}, 3);
  ASSERT_EQ(r.hits.size(), 3u);
  EXPECT_EQ(r.hits[0].doc_id, "a");
  EXPECT_EQ(r.hits[1].doc_id, "b");
  EXPECT_EQ(r.hits[2].doc_id, "c");
  for (const auto& h : r.hits) EXPECT_EQ(h.score, 0.0);
}

TEST(SearchExact, Errors) {
  std::mt19937_64 rng(4);
  const auto set = random_set(rng, 10, 4);
  const auto idx = build_index(set, labels_for(set, 2), 0, 1111);
  EXPECT_THROW(search_exact(idx, "q", std::vector<float>{1, 0}, 3), Error);
  EXPECT_THROW(search_exact(idx, "q", std::vector<float>{0, 0, 0, 0}, 3), Error);
  EXPECT_THROW(search_exact(idx, "q", std::vector<float>{1, 0, 0, 0}, 0), Error);
  EXPECT_THROW(search_clustered(idx, "q", std::vector<float>{1, 0, 0, 0}, 3, 1), Error);
}

TEST(SearchExact, MatchesArgsortOracleWithTies) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    auto base = random_set(rng, 500, 32);
    auto values = base.values();
    // duplicate some rows to force exact score ties
    for (std::size_t r = 0; r < 50; ++r) std::copy_n(values.begin() + 32 * (r + 100), 32, values.begin() + 32 * r);
    const EmbeddingSet set(base.ids(), values, 32);
    const auto idx = build_index(set, labels_for(set, 5), 0, 1111);
    const auto queries = random_set(rng, 20, 32, "q");
    for (std::size_t q = 0; q < queries.rows(); ++q) {
      const auto qv = row_vec(queries, q);
      const auto full = oracle::argsort(idx.embeddings(), queries.ids()[q], qv);
      for (std::size_t k : {1u, 10u, 500u}) {
        const auto r = search_exact(idx, queries.ids()[q], qv, k);
        ASSERT_EQ(r.hits.size(), std::min(k, full.size()));
        for (std::size_t i = 0; i < r.hits.size(); ++i) {
          EXPECT_EQ(r.hits[i].doc_id, full[i].first);
          EXPECT_EQ(r.hits[i].score, full[i].second);
        }
      }
    }
  }
}

TEST(SearchExact, IndexedVectorRanksFirst) {
  std::mt19937_64 rng(6);
  const auto set = random_set(rng, 100, 16);
  const auto idx = build_index(set, labels_for(set, 4), 0, 1111);
  for (std::size_t r = 0; r < 100; r += 7) {
    const auto res = search_exact(idx, "other", row_vec(set, r), 1);
    EXPECT_EQ(res.hits[0].doc_id, set.ids()[r]);
    EXPECT_NEAR(res.hits[0].score, 1.0, 1e-6);
  }
}

TEST(SearchClustered, AllProbesEqualsExact) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const auto set = random_set(rng, 60, 8);
    const auto idx = build_index(set, labels_for(set, 3), 6, rng());
    const auto q = random_set(rng, 1, 8, "q");
    const auto qv = row_vec(q, 0);
    const auto exact = search_exact(idx, "q0", qv, 10);
    const auto clustered = search_clustered(idx, "q0", qv, 10, 6);
    EXPECT_EQ(exact.hits, clustered.hits);
  }
}

TEST(SearchClustered, SingleProbeStaysInCluster) {
  std::vector<float> v;
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) {
    ids.push_back("a" + std::to_string(i));
    v.insert(v.end(), {1.0f, 0.01f * float(i)});
  }
  for (int i = 0; i < 10; ++i) {
    ids.push_back("b" + std::to_string(i));
    v.insert(v.end(), {0.01f * float(i), 1.0f});
  }
  const EmbeddingSet set(ids, v, 2);
  std::map<std::string, std::string> labels;
  for (const auto& id : ids) labels[id] = id.substr(0, 1);
  const auto idx = build_index(set, labels, 2, 1111);
  const auto r = search_clustered(idx, "q", std::vector<float>{1, 0.05f}, 20, 1);
  EXPECT_EQ(r.hits.size(), 10u);
  for (const auto& h : r.hits) EXPECT_EQ(h.doc_id[0], 'a');
  EXPECT_THROW(search_clustered(idx, "q", std::vector<float>{1, 0}, 5, 3), Error);
  EXPECT_THROW(search_clustered(idx, "q", std::vector<float>{1, 0}, 5, 0), Error);
}

TEST(Batch, ThreadIndependentAndRecall) {
  std::mt19937_64 rng(8);
  const auto set = random_set(rng, 300, 16);
  const auto idx = build_index(set, labels_for(set, 5), 17, 1111);
  const auto queries = random_set(rng, 40, 16, "q");
  const auto one = search_batch(idx, queries, {10, std::nullopt, 1});
  const auto four = search_batch(idx, queries, {10, std::nullopt, 4});
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].query_id, queries.ids()[i]);
    EXPECT_EQ(one[i].hits, four[i].hits);
  }
  const auto approx = search_batch(idx, queries, {10, std::size_t{2}, 3});
  const double recall = recall_against(one, approx);
  EXPECT_GT(recall, 0.0);
  EXPECT_LE(recall, 1.0);
  EXPECT_DOUBLE_EQ(recall_against(one, search_batch(idx, queries, {10, std::size_t{17}, 2})), 1.0);
}

TEST(Defaults, ClusterAndProbeCounts) {
  EXPECT_EQ(default_cluster_count(100), 10u);
  EXPECT_EQ(default_cluster_count(101), 11u);
  EXPECT_EQ(default_probe_count(10), 1u);
  EXPECT_EQ(default_probe_count(11), 2u);
}

TEST(Persistence, RunAndIndexRoundTrip) {
  testutil::TempDir dir("ret");
  std::mt19937_64 rng(9);
  const auto set = random_set(rng, 50, 8);
  const auto idx = build_index(set, labels_for(set, 3), 5, 1111);
  save_index(idx, dir.file("idx"));
  const auto back = load_index(dir.file("idx"));
  EXPECT_EQ(back.embeddings().values(), idx.embeddings().values());
  EXPECT_EQ(back.vendors(), idx.vendors());
  EXPECT_EQ(back.clusters()->members, idx.clusters()->members);
  EXPECT_EQ(back.clusters()->centroids, idx.clusters()->centroids);

  const auto queries = random_set(rng, 5, 8, "q");
  const auto run = search_batch(back, queries, {4, std::size_t{2}, 1});
  write_run_jsonl(run, dir.file("run.jsonl"));
  const auto read = read_run_jsonl(dir.file("run.jsonl"));
  ASSERT_EQ(read.size(), run.size());
  for (std::size_t i = 0; i < run.size(); ++i) {
    EXPECT_EQ(read[i].query_id, run[i].query_id);
    EXPECT_EQ(read[i].hits, run[i].hits);
  }
}
