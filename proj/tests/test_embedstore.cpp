#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_util.hpp"
#include "vlk/embedstore.hpp"
#include "vlk/error.hpp"

using namespace vlk;

TEST(Emb1, LayoutIsLittleEndian) {
  const std::vector<float> v = {1.0f, -2.5f};
  const auto bytes = encode_emb1(1, 2, v);
  ASSERT_EQ(bytes.size(), 12u + 8u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "EMB1");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 2);
  // 1.0f = 0x3F800000
  EXPECT_EQ(bytes[12], 0x00);
  EXPECT_EQ(bytes[15], 0x3F);
  const auto m = decode_emb1(bytes);
  EXPECT_EQ(m.values, v);
}

TEST(Emb1, RejectsBadInput) {
  auto bytes = encode_emb1(2, 3, std::vector<float>(6, 0.5f));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_emb1(bad), Error);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(decode_emb1(truncated), Error);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(decode_emb1(trailing), Error);
}

TEST(Embeddings, SaveLoadBitExactAndByteIdentical) {
  testutil::TempDir dir("emb");
  std::vector<float> v = {0.1f, -0.0f, 3.4e38f, 1e-45f, 2.0f, -7.25f};
  EmbeddingSet set({"a", "b"}, v, 3);
  save_embeddings(set, dir.file("m.emb"), dir.file("m.ids"));
  const auto back = load_embeddings(dir.file("m.emb"), dir.file("m.ids"));
  EXPECT_EQ(back.ids(), set.ids());
  ASSERT_EQ(back.values().size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint32_t>(back.values()[i]), std::bit_cast<std::uint32_t>(v[i]));
  }
  save_embeddings(back, dir.file("n.emb"), dir.file("n.ids"));
  EXPECT_EQ(testutil::slurp(dir.file("m.emb")), testutil::slurp(dir.file("n.emb")));
  EXPECT_EQ(testutil::slurp(dir.file("m.ids")), testutil::slurp(dir.file("n.ids")));
}

TEST(Embeddings, CountMismatchAndNaN) {
  testutil::TempDir dir("emb");
  const auto bytes = encode_emb1(2, 1, std::vector<float>{1.0f, 2.0f});
  dir.write("m.emb", std::string(bytes.begin(), bytes.end()));
  dir.write("m.ids", "a\nb\nc\n");
  EXPECT_THROW(load_embeddings(dir.file("m.emb"), dir.file("m.ids")), Error);

  const auto nan = encode_emb1(1, 1, std::vector<float>{std::numeric_limits<float>::quiet_NaN()});
  dir.write("nan.emb", std::string(nan.begin(), nan.end()));
  dir.write("one.ids", "a\n");
  EXPECT_THROW(load_embeddings(dir.file("nan.emb"), dir.file("one.ids")), Error);
  EXPECT_THROW(load_embeddings(dir.file("missing.emb"), dir.file("one.ids")), Error);
}

TEST(Embeddings, CsvFallback) {
  testutil::TempDir dir("emb");
  dir.write("m.csv", "1,2,3\n4.5,-1,0\n");
  dir.write("m.ids", "x\ny\n");
  const auto set = load_embeddings(dir.file("m.csv"), dir.file("m.ids"));
  EXPECT_EQ(set.dim(), 3u);
  EXPECT_EQ(set.row("y")[0], 4.5f);
}

TEST(Embeddings, DuplicateIds) { EXPECT_THROW(EmbeddingSet({"a", "a"}, {1, 2}, 1), Error); }

TEST(Normalize, Examples) {
  const auto n = l2_normalize(EmbeddingSet({"a"}, {3, 4}, 2));
  EXPECT_FLOAT_EQ(n.row(0)[0], 0.6f);
  EXPECT_FLOAT_EQ(n.row(0)[1], 0.8f);
  EXPECT_TRUE(n.normalized());
  const auto twice = l2_normalize(n);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(twice.row(0)[i], n.row(0)[i], 1e-7);
  try {
    l2_normalize(EmbeddingSet({"a", "zero"}, {1, 0, 0, 0}, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("zero"), std::string::npos);
  }
}

TEST(Cosine, Examples) {
  const std::vector<float> e1 = {1, 0, 0}, e2 = {0, 1, 0};
  EXPECT_DOUBLE_EQ(cosine(e1, e1), 1.0);
  EXPECT_DOUBLE_EQ(cosine(e1, e2), 0.0);
  EXPECT_THROW(cosine(e1, std::vector<float>{1, 0}), Error);
  EXPECT_THROW(cosine(e1, std::vector<float>{0, 0, 0}), Error);
}

TEST(Cosine, ExtendedPrecisionOracleAndProperties) {
  std::mt19937_64 rng(9);
  std::normal_distribution<float> g;
  for (int t = 0; t < 500; ++t) {
    std::vector<float> a(64), b(64);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    long double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ab += (long double)a[i] * b[i];
      aa += (long double)a[i] * a[i];
      bb += (long double)b[i] * b[i];
    }
    const double c = cosine(a, b);
    EXPECT_NEAR(c, double(ab / std::sqrt(aa * bb)), 1e-6);
    EXPECT_EQ(c, cosine(b, a));
    EXPECT_LE(std::abs(c), 1.0);
    std::vector<float> scaled(a);
    for (auto& x : scaled) x *= 3.5f;
    EXPECT_NEAR(cosine(a, scaled), 1.0, 1e-6);
  }
}
