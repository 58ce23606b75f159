// Synthetic end-to-end inputs and the subcommand sequence that consumes them.
#pragma once

#include <nlohmann/json.hpp>
#include <random>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "vlk/embedstore.hpp"
#include "vlk/phonex.hpp"

namespace pipeline {

inline constexpr int kVendors = 6;
inline constexpr int kAdsPerVendor = 8;
inline constexpr int kDim = 16;

inline std::string vendor_of(int v) { return "vendor" + std::to_string(v); }

inline void write_embeddings(const std::string& emb, const std::string& ids_path, const std::vector<std::string>& ids,
                             const std::vector<int>& vendor, const std::vector<std::vector<float>>& centers,
                             std::mt19937_64& rng) {
  std::normal_distribution<float> noise(0.0f, 0.35f);
  std::vector<float> v;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (int d = 0; d < kDim; ++d) v.push_back(centers[vendor[i]][d] + noise(rng));
  vlk::save_embeddings(vlk::EmbeddingSet(ids, v, kDim), emb, ids_path);
}

/// Writes ads.jsonl, index/query matrices, labels.json and a layer manifest.
inline void write_inputs(const testutil::TempDir& dir, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  const char* markets[] = {"alpha", "beta", "gamma"};
  const char* phrases[] = {"new in town", "sweet and discreet", "available now", "call me anytime"};
  std::string ads;
  nlohmann::ordered_json labels;
  std::vector<std::string> index_ids, query_ids;
  std::vector<int> index_vendor, query_vendor;
  for (int v = 0; v < kVendors; ++v) {
    std::string phone = "555";
    for (int i = 0; i < 7; ++i) phone += char('0' + (rng() % 10));
    // the last vendor stays below the default community size
    const int count = v == kVendors - 1 ? 3 : kAdsPerVendor;
    for (int a = 0; a < count; ++a) {
      const std::string id = "ad" + std::to_string(v) + "_" + std::to_string(a);
      const auto schemes = vlk::phonex::SchemeSet::from_bits(std::uint8_t(1 + rng() % 31));
      nlohmann::ordered_json ad;
      ad["ad_id"] = id;
      ad["title"] = std::string(phrases[v % 4]) + " " + std::to_string(a);
      ad["description"] = std::string(phrases[(v + a) % 4]) + " text me " +
                          vlk::phonex::obfuscate(phone, schemes, rng()) + " xzy@gmail.com on March 4";
      ad["market"] = markets[(v + a) % 3];
      ad["vendor_label"] = vendor_of(v);
      ads += ad.dump() + "\n";
      labels[id] = vendor_of(v);
      (a % 4 == 3 ? query_ids : index_ids).push_back(id);
      (a % 4 == 3 ? query_vendor : index_vendor).push_back(v);
    }
  }
  dir.write("ads.jsonl", ads);
  dir.write("labels.json", labels.dump(2));

  std::vector<std::vector<float>> centers(kVendors, std::vector<float>(kDim));
  for (auto& c : centers)
    for (auto& x : c) x = g(rng);
  write_embeddings(dir.file("index.emb"), dir.file("index.ids"), index_ids, index_vendor, centers, rng);
  write_embeddings(dir.file("query.emb"), dir.file("query.ids"), query_ids, query_vendor, centers, rng);

  nlohmann::json manifest;
  manifest["layers"] = nlohmann::json::array();
  for (int l = 0; l < 3; ++l) {
    std::vector<std::string> ids;
    std::vector<int> vendor;
    for (int i = 0; i < 24; ++i) {
      ids.push_back("s" + std::to_string(i));
      vendor.push_back(i % kVendors);
    }
    const auto name = "layer" + std::to_string(l);
    write_embeddings(dir.file(name + ".emb"), dir.file(name + ".ids"), ids, vendor, centers, rng);
    manifest["layers"].push_back(name + ".emb");
  }
  dir.write("layers.json", manifest.dump());
}

/// Every data-producing subcommand, in dependency order.
inline std::vector<std::vector<std::string>> commands(const std::string& in, const std::string& out) {
  const auto f = [&](const std::string& n) { return in + "/" + n; };
  const auto o = [&](const std::string& n) { return out + "/" + n; };
  std::vector<std::vector<std::string>> c = {
      {"extract-phones", "--ads", f("ads.jsonl")},
      {"mask", "--ads", f("ads.jsonl")},
      {"build-communities", "--ads", f("ads.jsonl"), "--phones", o("phones.jsonl"), "--split"},
      {"stylometry", "--ads", f("ads.jsonl"), "--labels", o("catalog.json")},
      {"index", "--embeddings", f("index.emb"), "--ids", f("index.ids"), "--labels", f("labels.json")},
      {"retrieve", "--index", o("index"), "--queries", f("query.emb"), "--query-ids", f("query.ids"), "--probes",
       "2"},
      {"eval", "--run", o("run.jsonl"), "--index", o("index"), "--labels", f("labels.json")},
      {"vendor-sim", "--embeddings", f("index.emb"), "--ids", f("index.ids"), "--labels", f("labels.json")},
      {"cka", "--layers-a", f("layers.json"), "--kernel", "rbf"},
      {"kgraph", "--index", o("index"), "--queries", f("query.emb"), "--query-ids", f("query.ids"), "--query",
       "ad0_3", "--labels", f("labels.json"), "--format", "all"},
  };
  for (auto& cmd : c) cmd.insert(cmd.end(), {"--out", out, "--seed", "1111"});
  return c;
}

}  // namespace pipeline
