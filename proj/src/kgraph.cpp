#include "vlk/kgraph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vlk/error.hpp"

namespace vlk::kgraph {

namespace {

KnowledgeGraph assemble(const std::string& query_id, std::span<const float> query, const retrieval::Index& index,
                        const std::vector<retrieval::Hit>& hits, Meta meta) {
  const auto& docs = index.embeddings();
  struct Item {
    std::string id;
    std::span<const float> vec;
    bool is_query;
  };
  std::vector<Item> items{{query_id, query, true}};
  for (const auto& h : hits) items.push_back({h.doc_id, docs.row(h.doc_id), false});
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.id < b.id; });

  KnowledgeGraph g;
  g.meta = std::move(meta);
  g.meta.query_id = query_id;
  for (const auto& it : items) g.nodes.push_back({it.id, it.is_query});
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      g.edges.push_back({items[i].id, items[j].id, cosine(items[i].vec, items[j].vec)});
    }
  }
  return g;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

KnowledgeGraph build_graph_rprecision(const std::string& query_id, std::span<const float> query,
                                      const retrieval::Index& index, const metrics::RelevanceJudgments& judgments) {
  auto r = judgments.R_of.find(query_id);
  if (r == judgments.R_of.end() || r->second == 0) {
    throw Error("query \"" + query_id + "\" is unlabeled or its vendor has no relevant index ads (R = 0)");
  }
  const auto result = retrieval::search_exact(index, query_id, query, r->second);
  Meta meta;
  meta.mode = Mode::rprecision;
  meta.k = r->second;
  return assemble(query_id, query, index, result.hits, std::move(meta));
}

KnowledgeGraph build_graph_topk(const std::string& query_id, std::span<const float> query,
                                const retrieval::Index& index, std::size_t k, double threshold) {
  auto result = retrieval::search_exact(index, query_id, query, k);
  std::erase_if(result.hits, [&](const retrieval::Hit& h) { return h.score < threshold; });
  Meta meta;
  meta.mode = Mode::topk_threshold;
  meta.k = k;
  meta.threshold = threshold;
  return assemble(query_id, query, index, result.hits, std::move(meta));
}

Format parse_format(const std::string& name) {
  if (name == "dot") return Format::dot;
  if (name == "graphml") return Format::graphml;
  if (name == "json") return Format::json;
  throw Error("unknown graph format \"" + name + "\" (expected dot, graphml or json)");
}

std::string to_dot(const KnowledgeGraph& g) {
  std::ostringstream out;
  out << "graph g {\n";
  for (const auto& n : g.nodes) out << "  " << quoted(n.ad_id) << (n.is_query ? " [query=true]" : "") << ";\n";
  for (const auto& e : g.edges) {
    out << "  " << quoted(e.a) << " -- " << quoted(e.b) << " [weight=" << fixed4(e.weight) << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_graphml(const KnowledgeGraph& g) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"query\" for=\"node\" attr.name=\"query\" attr.type=\"boolean\"/>\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      << "  <graph id=\"g\" edgedefault=\"undirected\">\n";
  for (const auto& n : g.nodes) {
    out << "    <node id=\"" << xml_escape(n.ad_id) << "\"><data key=\"query\">" << (n.is_query ? "true" : "false")
        << "</data></node>\n";
  }
  for (const auto& e : g.edges) {
    out << "    <edge source=\"" << xml_escape(e.a) << "\" target=\"" << xml_escape(e.b) << "\"><data key=\"weight\">"
        << fixed4(e.weight) << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

std::string to_json(const KnowledgeGraph& g) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes) j["nodes"].push_back({{"id", n.ad_id}, {"query", n.is_query}});
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
  nlohmann::ordered_json meta;
  meta["mode"] = g.meta.mode == Mode::rprecision ? "rprecision" : "topk_threshold";
  meta["k"] = g.meta.k ? nlohmann::ordered_json(*g.meta.k) : nlohmann::ordered_json(nullptr);
  meta["threshold"] = g.meta.threshold ? nlohmann::ordered_json(*g.meta.threshold) : nlohmann::ordered_json(nullptr);
  meta["query_id"] = g.meta.query_id;
  j["meta"] = meta;
  return j.dump(2) + "\n";
}

KnowledgeGraph from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    KnowledgeGraph g;
    for (const auto& n : j.at("nodes")) g.nodes.push_back({n.at("id").get<std::string>(), n.at("query").get<bool>()});
    for (const auto& e : j.at("edges")) {
      g.edges.push_back({e.at("a").get<std::string>(), e.at("b").get<std::string>(), e.at("weight").get<double>()});
    }
    const auto& m = j.at("meta");
    const auto mode = m.at("mode").get<std::string>();
    if (mode == "rprecision") {
      g.meta.mode = Mode::rprecision;
    } else if (mode == "topk_threshold") {
      g.meta.mode = Mode::topk_threshold;
    } else {
      throw Error("unknown graph mode \"" + mode + "\"");
    }
    if (!m.at("k").is_null()) g.meta.k = m["k"].get<std::size_t>();
    if (!m.at("threshold").is_null()) g.meta.threshold = m["threshold"].get<double>();
    g.meta.query_id = m.at("query_id").get<std::string>();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("graph JSON: ") + e.what());
  }
}

std::string render(const KnowledgeGraph& g, Format format) {
  switch (format) {
    case Format::dot: return to_dot(g);
    case Format::graphml: return to_graphml(g);
    case Format::json: return to_json(g);
  }
  throw Error("unknown graph format");
}

void export_graph(const KnowledgeGraph& g, Format format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot write file");
  out << render(g, format);
  if (!out) throw Error(path + ": write failed");
}

}  // namespace vlk::kgraph
