// Small fixed inputs shared by the golden-file tests.
#pragma once

#include <cstdlib>
#include <fstream>
#include <string>

#include "test_util.hpp"
#include "vlk/kgraph.hpp"
#include "vlk/retrieval.hpp"

namespace fixtures {

inline vlk::retrieval::Index graph_index() {
  const vlk::EmbeddingSet set({"ad-a", "ad-b", "ad-c", "ad-d"}, {1, 0, 0, 0.8f, 0.6f, 0, 0, 1, 0, 0, 0, 1}, 3);
  return vlk::retrieval::build_index(set, {{"ad-a", "v1"}, {"ad-b", "v1"}, {"ad-c", "v2"}, {"ad-d", "v2"}}, 0, 1111);
}

/// Query (1, 0.2, 0) keeps ad-a and ad-b above 0.5; ad-c falls below it.
inline vlk::kgraph::KnowledgeGraph golden_graph() {
  const std::vector<float> q = {1, 0.2f, 0};
  return vlk::kgraph::build_graph_topk("ad-q", q, graph_index(), 3, 0.5);
}

inline std::string golden_path(const std::string& name) { return std::string(VLK_GOLDEN_DIR) + "/" + name; }

/// Golden file content; VLK_UPDATE_GOLDEN=1 rewrites it from `actual` first.
inline std::string golden(const std::string& name, const std::string& actual) {
  if (const char* u = std::getenv("VLK_UPDATE_GOLDEN"); u && std::string(u) == "1") {
    std::ofstream(golden_path(name), std::ios::binary) << actual;
  }
  return testutil::slurp(golden_path(name));
}

}  // namespace fixtures
