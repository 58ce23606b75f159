#include <gtest/gtest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "test_util.hpp"
#include "vlk/community.hpp"
#include "vlk/error.hpp"

using namespace vlk;
using namespace vlk::community;

namespace {

std::vector<AdPhones> random_ads(std::mt19937_64& rng, std::size_t n_ads, std::size_t n_phones) {
  std::uniform_int_distribution<std::size_t> phone(0, n_phones - 1), count(0, 3);
  std::vector<AdPhones> ads;
  for (std::size_t i = 0; i < n_ads; ++i) {
    AdPhones a{"ad" + std::to_string(i), {}};
    for (std::size_t k = count(rng); k > 0; --k) a.phones.push_back(std::to_string(5550000000ull + phone(rng)));
    ads.push_back(std::move(a));
  }
  return ads;
}

std::vector<std::pair<std::string, std::vector<std::string>>> as_pairs(const std::vector<AdPhones>& ads) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& a : ads) out.emplace_back(a.ad_id, a.phones);
  return out;
}

std::map<std::string, int> assigned(const VendorCatalog& c) {
  std::map<std::string, int> out;
  for (const auto& [ad, v] : c.assignments) {
    if (v) out[ad] = *v;
  }
  return out;
}

}  // namespace

TEST(PhoneGraph, SingleAdClique) {
  const auto g = build_phone_graph({{"a1", {"111", "222"}}});
  EXPECT_EQ(g.nodes, (std::set<std::string>{"111", "222"}));
  EXPECT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(*g.edges.begin(), std::make_pair(std::string("111"), std::string("222")));
}

TEST(PhoneGraph, Singleton) {
  const auto g = build_phone_graph({{"a1", {"111"}}});
  EXPECT_EQ(g.nodes.size(), 1u);
  EXPECT_TRUE(g.edges.empty());
}

TEST(AssignVendors, TransitiveChain) {
  const std::vector<AdPhones> ads = {{"A1", {"1", "2"}}, {"A2", {"2", "3"}}, {"A3", {"4"}}, {"A4", {}}};
  const auto c = assign_vendors(build_phone_graph(ads), ads);
  EXPECT_EQ(c.assignments.at("A1"), c.assignments.at("A2"));
  EXPECT_NE(c.assignments.at("A1"), c.assignments.at("A3"));
  EXPECT_FALSE(c.assignments.at("A4").has_value());
  EXPECT_EQ(*c.assignments.at("A1"), 0);  // component with smallest phone "1"
  EXPECT_EQ(*c.assignments.at("A3"), 1);
  EXPECT_EQ(c.unlabeled(), std::vector<std::string>{"A4"});
  EXPECT_EQ(c.vendors[0].phones, (std::vector<std::string>{"1", "2", "3"}));
}

TEST(AssignVendors, MissingPhoneIsError) {
  const auto g = build_phone_graph({{"A1", {"1"}}});
  EXPECT_THROW(assign_vendors(g, {{"A2", {"9"}}}), Error);
}

TEST(AssignVendors, PhonesSpanningComponentsIsError) {
  const auto g = build_phone_graph({{"A1", {"1"}}, {"A2", {"2"}}});
  EXPECT_THROW(assign_vendors(g, {{"A3", {"1", "2"}}}), Error);
}

TEST(AssignVendors, MatchesBfsOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ads = random_ads(rng, 500, 400);
    const auto c = assign_vendors(build_phone_graph(ads), ads);
    EXPECT_TRUE(oracle::same_partition(assigned(c), oracle::bfs_components(as_pairs(ads))));
  }
}

TEST(AssignVendors, PermutationInvariant) {
  std::mt19937_64 rng(4);
  auto ads = random_ads(rng, 200, 150);
  const auto before = assign_vendors(build_phone_graph(ads), ads);
  std::shuffle(ads.begin(), ads.end(), rng);
  const auto after = assign_vendors(build_phone_graph(ads), ads);
  EXPECT_EQ(before.assignments, after.assignments);
}

TEST(AssignVendors, SharedPhoneImpliesSameVendor) {
  std::mt19937_64 rng(8);
  const auto ads = random_ads(rng, 300, 200);
  const auto c = assign_vendors(build_phone_graph(ads), ads);
  for (const auto& a : ads) {
    for (const auto& b : ads) {
      bool share = false;
      for (const auto& p : a.phones) share = share || std::count(b.phones.begin(), b.phones.end(), p);
      if (share) EXPECT_EQ(c.assignments.at(a.ad_id), c.assignments.at(b.ad_id));
    }
  }
}

TEST(FilterVendors, DropAndBucket) {
  std::vector<AdPhones> ads;
  for (int i = 0; i < 6; ++i) ads.push_back({"a" + std::to_string(i), {"100"}});
  for (int i = 0; i < 3; ++i) ads.push_back({"b" + std::to_string(i), {"200"}});
  const auto c = assign_vendors(build_phone_graph(ads), ads);

  const auto dropped = filter_vendors(c, 5, FilterMode::drop);
  ASSERT_EQ(dropped.vendors.size(), 1u);
  EXPECT_EQ(dropped.vendors[0].ad_count(), 6u);
  EXPECT_FALSE(dropped.assignments.count("b0") && dropped.assignments.at("b0"));

  const auto bucketed = filter_vendors(c, 5, FilterMode::others_bucket);
  EXPECT_EQ(bucketed.vendors.size(), 1u);
  ASSERT_TRUE(bucketed.others);
  EXPECT_EQ(bucketed.others->ad_count(), 3u);
  EXPECT_EQ(bucketed.labels().at("b1"), "others");
  EXPECT_EQ(bucketed.labels().at("a1"), "0");
}

TEST(FilterVendors, MinOneIsIdentity) {
  std::mt19937_64 rng(2);
  const auto ads = random_ads(rng, 100, 80);
  const auto c = assign_vendors(build_phone_graph(ads), ads);
  EXPECT_EQ(filter_vendors(c, 1, FilterMode::drop).assignments, c.assignments);
}

TEST(Catalog, FromLabelsLowercases) {
  std::vector<AdRecord> ads(3);
  ads[0] = {"x1", "", "", {}, {}, {}, "AgentQ"};
  ads[1] = {"x2", "", "", {}, {}, {}, "agentq"};
  ads[2] = {"x3", "", "", {}, {}, {}, std::nullopt};
  const auto c = catalog_from_labels(ads);
  ASSERT_EQ(c.vendors.size(), 1u);
  EXPECT_EQ(*c.vendors[0].name, "agentq");
  EXPECT_EQ(c.assignments.at("x1"), c.assignments.at("x2"));
  EXPECT_FALSE(c.assignments.at("x3"));
}

TEST(Catalog, JsonRoundTripAndLabelLoading) {
  std::vector<AdPhones> ads = {{"a", {"1"}}, {"b", {"1", "2"}}, {"c", {"3"}}, {"d", {}}};
  const auto c = filter_vendors(assign_vendors(build_phone_graph(ads), ads), 2, FilterMode::others_bucket);
  const auto text = catalog_to_json(c);
  const auto back = catalog_from_json(text);
  EXPECT_EQ(back.assignments, c.assignments);
  EXPECT_EQ(catalog_to_json(back), text);

  testutil::TempDir dir("catalog");
  const auto path = dir.write("catalog.json", text);
  const auto labels = load_labels(path);
  EXPECT_EQ(labels.at("a"), "0");
  EXPECT_EQ(labels.at("c"), "others");
  EXPECT_FALSE(labels.count("d"));
  const auto flat = load_labels(dir.write("flat.json", R"({"a": "v1", "b": "v2"})"));
  EXPECT_EQ(flat.at("b"), "v2");
}

TEST(Split, StratifiedProportions) {
  std::map<std::string, std::string> labels;
  for (int i = 0; i < 40; ++i) labels["a" + std::to_string(i)] = "v0";
  for (int i = 0; i < 7; ++i) labels["b" + std::to_string(i)] = "v1";
  const auto s = stratified_split(labels, 1111);
  EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), labels.size());
  // v0: 2 validation, 8 test; v1: 0 validation, 1 test.
  EXPECT_EQ(s.validation.size(), 2u);
  EXPECT_EQ(s.test.size(), 9u);
  const auto again = stratified_split(labels, 1111);
  EXPECT_EQ(again.test, s.test);
  EXPECT_NE(stratified_split(labels, 7).test, s.test);
}
