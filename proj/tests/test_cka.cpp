#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "oracles/oracles.hpp"
#include "test_util.hpp"
#include "vlk/cka.hpp"
#include "vlk/embedstore.hpp"
#include "vlk/error.hpp"

using namespace vlk;
using namespace vlk::cka;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> g;
  std::vector<double> v(r * c);
  for (auto& x : v) x = g(rng);
  return Matrix(r, c, v);
}

oracle::Dense dense(const Matrix& m) {
  oracle::Dense d(m.rows, std::vector<double>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) d[i][j] = m(i, j);
  return d;
}

// Random orthogonal matrix by Gram-Schmidt.
Matrix orthogonal(std::mt19937_64& rng, std::size_t n) {
  auto q = dense(random_matrix(rng, n, n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double d = 0;
      for (std::size_t k = 0; k < n; ++k) d += q[i][k] * q[j][k];
      for (std::size_t k = 0; k < n; ++k) q[i][k] -= d * q[j][k];
    }
    double s = 0;
    for (double x : q[i]) s += x * x;
    for (double& x : q[i]) x /= std::sqrt(s);
  }
  std::vector<double> v;
  for (const auto& row : q) v.insert(v.end(), row.begin(), row.end());
  return Matrix(n, n, v);
}

Matrix times(const Matrix& a, const Matrix& b) {
  const auto c = oracle::matmul(dense(a), dense(b));
  std::vector<double> v;
  for (const auto& row : c) v.insert(v.end(), row.begin(), row.end());
  return Matrix(a.rows, b.cols, v);
}

}  // namespace

TEST(MatrixCtor, Validates) {
  EXPECT_THROW(Matrix(1, 2, {1, 2}), Error);
  EXPECT_THROW(Matrix(2, 2, {1, 2, 3}), Error);
  EXPECT_THROW(Matrix(2, 1, {1, std::nan("")}), Error);
  EXPECT_THROW(Matrix(2, 0, {}), Error);
}

TEST(LinearCka, SelfOrthogonalScaling) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto x = random_matrix(rng, 20, 5);
    EXPECT_NEAR(linear_cka(x, x), 1.0, 1e-9);
    EXPECT_NEAR(linear_cka(x, times(x, orthogonal(rng, 5))), 1.0, 1e-6);
    const auto y = random_matrix(rng, 20, 3);
    auto scaled = y;
    for (auto& v : scaled.values) v *= 17.5;
    EXPECT_NEAR(linear_cka(x, scaled), linear_cka(x, y), 1e-6);
    EXPECT_NEAR(linear_cka(x, y), linear_cka(y, x), 1e-9);
  }
}

TEST(LinearCka, GramOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_matrix(rng, 20, 5), y = random_matrix(rng, 20, 5);
    const double expect = oracle::kernel_cka(oracle::gram(dense(x)), oracle::gram(dense(y)));
    EXPECT_NEAR(linear_cka(x, y), expect, 1e-8);
  }
  const auto a = random_matrix(rng, 10, 2);
  EXPECT_THROW(linear_cka(a, random_matrix(rng, 9, 2)), Error);
}

TEST(RbfCka, SelfAndKernelOracle) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_matrix(rng, 15, 4), y = random_matrix(rng, 15, 4);
    EXPECT_NEAR(rbf_cka(x, x), 1.0, 1e-9);
    const double expect = oracle::kernel_cka(oracle::rbf_kernel(dense(x), 0.5), oracle::rbf_kernel(dense(y), 0.5));
    EXPECT_NEAR(rbf_cka(x, y), expect, 1e-8);
    const double wide = oracle::kernel_cka(oracle::rbf_kernel(dense(x), 2.0), oracle::rbf_kernel(dense(y), 2.0));
    EXPECT_NEAR(rbf_cka(x, y, 2.0), wide, 1e-8);
    EXPECT_NEAR(rbf_cka(x, y), rbf_cka(y, x), 1e-9);
  }
}

TEST(RbfCka, TwoPointBandwidth) {
  const Matrix x(2, 2, {0, 0, 3, 4});
  EXPECT_DOUBLE_EQ(median_pairwise_distance(x), 5.0);
  const Matrix y(4, 1, {0, 1, 3, 7});
  // distances 1,3,7,2,6,4 -> median (3+4)/2
  EXPECT_DOUBLE_EQ(median_pairwise_distance(y), 3.5);
  const Matrix same(3, 1, {1, 1, 1});
  EXPECT_THROW(rbf_cka(same, same), Error);
}

TEST(Grid, ShapesDiagonalElementwise) {
  std::mt19937_64 rng(4);
  std::vector<Matrix> layers;
  for (int i = 0; i < 13; ++i) layers.push_back(random_matrix(rng, 12, 3));
  const auto g = cka_matrix(layers, layers, Kernel::linear, kDefaultSigmaFrac, 3);
  ASSERT_EQ(g.rows, 13u);
  ASSERT_EQ(g.cols, 13u);
  for (std::size_t i = 0; i < 13; ++i) EXPECT_NEAR(g(i, i), 1.0, 1e-9);
  for (std::size_t i = 0; i < 13; ++i)
    for (std::size_t j = 0; j < 13; ++j) {
      EXPECT_GE(g(i, j), 0.0);
      EXPECT_LE(g(i, j), 1.0);
      EXPECT_EQ(g(i, j), linear_cka(layers[i], layers[j]));
    }
  const std::vector<Matrix> a(layers.begin(), layers.begin() + 3), b(layers.begin() + 3, layers.begin() + 8);
  const auto r = cka_matrix(a, b, Kernel::rbf, 0.5, 1);
  EXPECT_EQ(r.rows, 3u);
  EXPECT_EQ(r.cols, 5u);
  EXPECT_EQ(r(2, 4), rbf_cka(a[2], b[4], 0.5));
  EXPECT_EQ(r.values, cka_matrix(a, b, Kernel::rbf, 0.5, 4).values);
}

TEST(Grid, ReportsAndLayers) {
  testutil::TempDir dir("cka");
  const std::vector<float> v1 = {1, 2, 3, 4, 5, 7}, v2 = {2, 1, 0, 4, 4, 4};
  save_embeddings(EmbeddingSet({"a", "b", "c"}, v1, 2), dir.file("l0.emb"), dir.file("l0.ids"));
  dir.write("l1.csv", "2,1\n0,4\n4,4\n");
  dir.write("m.json", R"({"layers": ["l0.emb", "l1.csv"]})");
  const auto layers = load_layers(dir.file("m.json"));
  ASSERT_EQ(layers.size(), 2u);
  EXPECT_EQ(layers[1](2, 0), 4.0);
  const auto g = cka_matrix(layers, layers, Kernel::linear);
  const auto csv = grid_to_csv(g);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "layer,b0,b1");
  const auto doc = nlohmann::json::parse(grid_to_json(g, Kernel::linear));
  EXPECT_EQ(doc["kernel"], "linear");
  EXPECT_NEAR(doc["distance"][0][1].get<double>(), 1.0 - doc["similarity"][0][1].get<double>(), 1e-12);
  EXPECT_THROW(parse_kernel("poly"), Error);
  EXPECT_THROW(load_layers(dir.file("none.json")), Error);
}
