#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vlk/cka.hpp"
#include "vlk/community.hpp"
#include "vlk/config.hpp"
#include "vlk/corpus.hpp"
#include "vlk/embedstore.hpp"
#include "vlk/error.hpp"
#include "vlk/kgraph.hpp"
#include "vlk/metrics.hpp"
#include "vlk/parallel.hpp"
#include "vlk/phonex.hpp"
#include "vlk/retrieval.hpp"
#include "vlk/stylometry.hpp"
#include "vlk/vendorsim.hpp"

namespace vlk::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// JSON config files: top-level keys are global options, nested objects are
// subcommand sections ({"seed": 1111, "retrieve": {"k": 5}}).
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool, bool, std::string) const override {
    return dump(*app).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream buf;
    buf << input.rdbuf();
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file: top level must be an object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const nlohmann::json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(value, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static ojson typed(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    if (!s.empty()) {
      char* end = nullptr;
      const long long i = std::strtoll(s.c_str(), &end, 10);
      if (*end == '\0') return i;
      const double d = std::strtod(s.c_str(), &end);
      if (*end == '\0') return d;
    }
    return s;
  }

  static ojson dump(const CLI::App& app) {
    ojson j = ojson::object();
    for (const CLI::Option* opt : app.get_options()) {
      if (!opt->get_configurable() || opt->get_required() || opt->get_default_str().empty()) continue;
      j[opt->get_single_name()] = typed(opt->get_default_str());
    }
    for (const CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
      ojson s = dump(*sub);
      if (!s.empty()) j[sub->get_name()] = std::move(s);
    }
    return j;
  }
};

struct Global {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  std::string out = ".";
};

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(path.string() + ": cannot write file");
  f << content;
  if (!f) throw Error(path.string() + ": write failed");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(path + ": cannot open file");
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::string fmt(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

ojson ad_to_json(const AdRecord& ad) {
  ojson j;
  j["ad_id"] = ad.ad_id;
  j["title"] = ad.title;
  j["description"] = ad.description;
  if (ad.market) j["market"] = *ad.market;
  if (ad.region) j["region"] = *ad.region;
  if (ad.phones) j["phones"] = *ad.phones;
  if (ad.vendor_label) j["vendor_label"] = *ad.vendor_label;
  return j;
}

std::vector<std::size_t> parse_cutoffs(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(part, &used);
      if (used != part.size() || v < 1) throw Error("");
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Error("invalid cutoff \"" + part + "\" (expected positive integers, e.g. 1,5,10)");
    }
  }
  if (out.empty()) throw Error("no cutoffs given");
  return out;
}

std::vector<std::string> unique_in_order(const std::vector<phonex::PhoneCandidate>& cands) {
  std::vector<std::string> out;
  for (const auto& c : cands) {
    if (std::find(out.begin(), out.end(), c.digits) == out.end()) out.push_back(c.digits);
  }
  return out;
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string ads;
  std::string lexicon;
  int gap = phonex::ExtractConfig{}.gap_limit_tokens;
  std::size_t min_len = phonex::ExtractConfig{}.min_len;
  std::size_t max_len = phonex::ExtractConfig{}.max_len;
  bool homophones = false;
};

phonex::ExtractConfig extract_config(const ExtractArgs& a) {
  phonex::ExtractConfig c;
  c.gap_limit_tokens = a.gap;
  c.min_len = a.min_len;
  c.max_len = a.max_len;
  c.homophones = a.homophones;
  if (c.min_len < 1 || c.min_len > c.max_len) throw Error("phone length bounds must satisfy 1 <= min-len <= max-len");
  if (c.gap_limit_tokens < 0) throw Error("gap must be non-negative");
  return c;
}

int run_extract(const Global& g, const ExtractArgs& a, std::ostream& out) {
  const auto ads = load_ads(a.ads);
  const auto lexicon = a.lexicon.empty() ? phonex::ObfuscationLexicon::builtin()
                                         : phonex::ObfuscationLexicon::from_json_file(a.lexicon);
  const auto config = extract_config(a);

  std::vector<std::vector<std::string>> found(ads.size());
  parallel_for(ads.size(), resolve_threads(g.threads), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      found[i] = unique_in_order(phonex::extract_phones(prepare_text(ads[i]).text, config, lexicon));
    }
  });

  std::string lines;
  std::vector<std::string> gold, pred;
  std::size_t with_phones = 0, with_gold = 0;
  for (std::size_t i = 0; i < ads.size(); ++i) {
    lines += ojson{{"ad_id", ads[i].ad_id}, {"phones", found[i]}}.dump() + "\n";
    with_phones += found[i].empty() ? 0 : 1;
    if (ads[i].phones) {
      ++with_gold;
      const auto& gp = *ads[i].phones;
      const std::size_t n = std::max(gp.size(), found[i].size());
      for (std::size_t k = 0; k < n; ++k) {
        gold.push_back(k < gp.size() ? gp[k] : "");
        pred.push_back(k < found[i].size() ? found[i][k] : "");
      }
    }
  }
  const fs::path dir(g.out);
  write_file(dir / "phones.jsonl", lines);

  ojson summary;
  summary["ads"] = ads.size();
  summary["ads_with_phones"] = with_phones;
  summary["ads_with_gold"] = with_gold;
  if (with_gold > 0) {
    const auto acc = phonex::eval_extraction(gold, pred);
    summary["accuracy"] = {{"levenshtein", acc.levenshtein_acc}, {"perfect", acc.perfect_acc}, {"digit", acc.digit_acc}};
  } else {
    summary["accuracy"] = nullptr;
  }
  write_file(dir / "extract_summary.json", summary.dump(2) + "\n");
  out << "extract-phones: " << ads.size() << " ads, " << with_phones << " with phones -> "
      << (dir / "phones.jsonl").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- mask

struct MaskArgs {
  std::string ads;
  bool no_dates = false, no_links = false, no_emails = false, no_post_ids = false, no_phones = false;
};

int run_mask(const Global& g, const MaskArgs& a, std::ostream& out) {
  auto ads = load_ads(a.ads);
  MaskOptions opt;
  opt.mask_dates = !a.no_dates;
  opt.mask_links = !a.no_links;
  opt.mask_emails = !a.no_emails;
  opt.mask_post_ids = !a.no_post_ids;
  opt.mask_phones = !a.no_phones;
  std::string lines;
  for (auto& ad : ads) {
    ad.title = mask_sensitive(ad.title, opt);
    ad.description = mask_sensitive(ad.description, opt);
    lines += ad_to_json(ad).dump() + "\n";
  }
  const fs::path path = fs::path(g.out) / "masked.jsonl";
  write_file(path, lines);
  out << "mask: " << ads.size() << " ads -> " << path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- communities

struct CommunityArgs {
  std::string ads;
  std::string phones;
  bool from_labels = false;
  std::size_t min_ads = 5;
  std::string mode = "drop";
  bool split = false;
};

int run_communities(const Global& g, const CommunityArgs& a, std::ostream& out) {
  const auto ads = load_ads(a.ads);
  if (a.min_ads < 1) throw Error("min-ads must be at least 1");
  const auto mode = a.mode == "drop" ? community::FilterMode::drop : community::FilterMode::others_bucket;

  community::VendorCatalog catalog;
  if (a.from_labels) {
    catalog = community::catalog_from_labels(ads);
  } else {
    std::map<std::string, std::vector<std::string>> given;
    if (!a.phones.empty()) {
      std::istringstream in(read_file(a.phones));
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          const auto j = nlohmann::json::parse(line);
          given[j.at("ad_id").get<std::string>()] = j.at("phones").get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
          throw ParseError(a.phones, line_no, e.what());
        }
      }
    }
    std::vector<community::AdPhones> ad_phones;
    for (const auto& ad : ads) {
      community::AdPhones p{ad.ad_id, {}};
      if (auto it = given.find(ad.ad_id); it != given.end()) {
        p.phones = it->second;
      } else if (ad.phones) {
        p.phones = *ad.phones;
      } else {
        p.phones = unique_in_order(phonex::extract_phones(prepare_text(ad).text));
      }
      ad_phones.push_back(std::move(p));
    }
    catalog = community::assign_vendors(community::build_phone_graph(ad_phones), ad_phones);
  }
  catalog = community::filter_vendors(catalog, a.min_ads, mode);

  const fs::path dir(g.out);
  write_file(dir / "catalog.json", community::catalog_to_json(catalog));
  out << "build-communities: " << catalog.vendors.size() << " vendors, " << catalog.unlabeled().size()
      << " unlabeled ads -> " << (dir / "catalog.json").string();
  if (a.split) {
    const auto s = community::stratified_split(catalog.labels(), g.seed);
    ojson j;
    j["seed"] = g.seed;
    j["train"] = s.train;
    j["validation"] = s.validation;
    j["test"] = s.test;
    write_file(dir / "split.json", j.dump(2) + "\n");
    out << ", split " << s.train.size() << "/" << s.validation.size() << "/" << s.test.size();
  }
  out << "\n";
  return 0;
}

// ---------------------------------------------------------------- stylometry

struct StyloArgs {
  std::string ads;
  std::string labels;
  bool lowercase_tokens = false;
};

int run_stylometry(const Global& g, const StyloArgs& a, std::ostream& out) {
  const auto ads = load_ads(a.ads);
  std::map<std::string, std::string> labels;
  if (!a.labels.empty()) {
    labels = community::load_labels(a.labels);
  } else {
    for (const auto& [id, v] : community::catalog_from_labels(ads).labels()) labels[id] = v;
  }
  // vendor -> market -> prepared texts
  std::map<std::string, std::map<std::string, std::vector<std::string>>> groups;
  for (const auto& ad : ads) {
    auto it = labels.find(ad.ad_id);
    if (it == labels.end()) continue;
    groups[it->second][ad.market.value_or("")].push_back(prepare_text(ad).text);
  }
  stylometry::Options opt;
  opt.lowercase_tokens = a.lowercase_tokens;
  opt.threads = resolve_threads(g.threads);

  std::string csv = "vendor,scope,markets,mean_similarity\n";
  std::size_t rows = 0;
  for (const auto& [vendor, markets] : groups) {
    for (const auto& [market, texts] : markets) {
      if (texts.size() < 2) continue;
      csv += vendor + ",within," + market + "," + fmt(stylometry::vendor_within_similarity(texts, opt), 6) + "\n";
      ++rows;
    }
    for (auto m1 = markets.begin(); m1 != markets.end(); ++m1) {
      for (auto m2 = std::next(m1); m2 != markets.end(); ++m2) {
        try {
          const double s = stylometry::vendor_across_similarity(m1->second, m2->second, opt);
          csv += vendor + ",across," + m1->first + "|" + m2->first + "," + fmt(s, 6) + "\n";
          ++rows;
        } catch (const Error&) {
          // every cross pair was a duplicated listing; nothing to report
        }
      }
    }
  }
  const fs::path path = fs::path(g.out) / "stylometry.csv";
  write_file(path, csv);
  out << "stylometry: " << groups.size() << " vendors, " << rows << " rows -> " << path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- index

struct IndexArgs {
  std::string embeddings, ids, labels;
  std::string clusters = "auto";
};

int run_index(const Global& g, const IndexArgs& a, std::ostream& out) {
  const auto set = load_embeddings(a.embeddings, a.ids);
  const auto labels = community::load_labels(a.labels);
  std::size_t clusters = 0;
  if (a.clusters == "auto") {
    clusters = retrieval::default_cluster_count(set.rows());
  } else {
    try {
      std::size_t used = 0;
      const long v = std::stol(a.clusters, &used);
      if (used != a.clusters.size() || v < 0) throw Error("");
      clusters = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw Error("clusters must be \"auto\" or a non-negative integer, got \"" + a.clusters + "\"");
    }
  }
  const auto index = retrieval::build_index(set, labels, clusters, g.seed);
  const fs::path dir = fs::path(g.out) / "index";
  retrieval::save_index(index, dir.string());
  out << "index: " << set.rows() << " docs, dim " << set.dim() << ", " << clusters << " clusters -> "
      << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- retrieve

struct RetrieveArgs {
  std::string index, queries, query_ids;
  std::size_t k = 10;
  std::string probes = "auto";
};

int run_retrieve(const Global& g, const RetrieveArgs& a, std::ostream& out) {
  const auto index = retrieval::load_index(a.index);
  const auto queries = load_embeddings(a.queries, a.query_ids);
  if (a.k < 1) throw Error("k must be at least 1");

  retrieval::BatchOptions exact{a.k, std::nullopt, resolve_threads(g.threads)};
  retrieval::BatchOptions chosen = exact;
  if (a.probes != "exact" && index.clusters()) {
    const std::size_t n = index.clusters()->count();
    std::size_t p = retrieval::default_probe_count(n);
    if (a.probes != "auto") {
      try {
        std::size_t used = 0;
        const long v = std::stol(a.probes, &used);
        if (used != a.probes.size() || v < 1) throw Error("");
        p = static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        throw Error("probes must be \"auto\", \"exact\" or a positive integer, got \"" + a.probes + "\"");
      }
    }
    chosen.probes = p;
  } else if (a.probes != "exact" && a.probes != "auto") {
    throw Error("index has no clusters; probes cannot be used");
  }

  const auto run = retrieval::search_batch(index, queries, chosen);
  const fs::path dir(g.out);
  retrieval::write_run_jsonl(run, (dir / "run.jsonl").string());

  ojson summary;
  summary["queries"] = run.size();
  summary["k"] = a.k;
  summary["mode"] = chosen.probes ? "clustered" : "exact";
  if (chosen.probes) {
    summary["clusters"] = index.clusters()->count();
    summary["probes"] = *chosen.probes;
    summary["recall_vs_exact"] = retrieval::recall_against(retrieval::search_batch(index, queries, exact), run);
  }
  write_file(dir / "retrieve_summary.json", summary.dump(2) + "\n");
  out << "retrieve: " << run.size() << " queries, k=" << a.k;
  if (chosen.probes) out << ", probes=" << *chosen.probes << ", recall vs exact " << fmt(summary["recall_vs_exact"].get<double>());
  out << " -> " << (dir / "run.jsonl").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string run, index, ids, labels, query_labels;
  std::string cutoffs = "1,5,10";
};

int run_eval(const Global& g, const EvalArgs& a, std::ostream& out) {
  const auto run = retrieval::read_run_jsonl(a.run);
  const auto labels = community::load_labels(a.labels);
  const auto query_labels = a.query_labels.empty() ? labels : community::load_labels(a.query_labels);

  std::map<std::string, std::string> index_labels;
  if (fs::is_directory(a.index)) {
    index_labels = retrieval::load_index(a.index).labels();
  } else {
    if (a.ids.empty()) throw Error("--ids is required when --index is an embedding file");
    const auto set = load_embeddings(a.index, a.ids);
    for (const auto& id : set.ids()) {
      auto it = labels.find(id);
      if (it == labels.end()) throw Error(a.ids + ": index ad \"" + id + "\" has no label in " + a.labels);
      index_labels[id] = it->second;
    }
  }
  const auto judgments = metrics::judge(run, index_labels, query_labels);
  const auto report = metrics::evaluate(run, judgments, parse_cutoffs(a.cutoffs));

  const fs::path dir(g.out);
  write_file(dir / "report.json", metrics::report_to_json(report));
  write_file(dir / "report.csv", metrics::report_to_csv(report));
  out << "eval: " << report.evaluated_queries << " queries (" << report.skipped_queries << " skipped)";
  if (report.evaluated_queries > 0) {
    out << ", R-Precision " << fmt(report.at("r_precision", metrics::kRCutoff).mean) << ", Macro-F1@X "
        << fmt(report.at("macro_f1", metrics::kRCutoff).mean);
  }
  out << " -> " << (dir / "report.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- vendor-sim

struct VendorSimArgs {
  std::string embeddings, ids, labels, parent;
  double threshold = vendorsim::kDefaultAliasThreshold;
};

int run_vendor_sim(const Global& g, const VendorSimArgs& a, std::ostream& out) {
  const auto set = load_embeddings(a.embeddings, a.ids);
  const auto vendors = vendorsim::group_by_vendor(set, community::load_labels(a.labels));
  const unsigned threads = resolve_threads(g.threads);

  std::vector<vendorsim::AliasScan> aliases;
  if (!a.parent.empty()) {
    aliases.push_back({a.parent, vendorsim::alias_candidates(a.parent, vendors, a.threshold)});
  } else {
    aliases = vendorsim::scan_aliases(vendors, a.threshold, threads);
  }
  ojson j = ojson::object();
  j["threshold"] = a.threshold;
  j["aliases"] = ojson::array();
  std::size_t pairs = 0;
  for (const auto& s : aliases) {
    ojson c = ojson::array();
    for (const auto& cand : s.candidates) c.push_back({{"vendor", cand.vendor}, {"sim_norm", cand.sim_norm}});
    pairs += s.candidates.size();
    j["aliases"].push_back({{"parent", s.parent}, {"candidates", c}});
  }
  const double all = -std::numeric_limits<double>::infinity();
  std::vector<vendorsim::AliasScan> scatter;
  if (!a.parent.empty()) {
    scatter.push_back({a.parent, vendorsim::alias_candidates(a.parent, vendors, all)});
  } else {
    scatter = vendorsim::scan_aliases(vendors, all, threads);
  }
  const fs::path dir(g.out);
  write_file(dir / "aliases.json", j.dump(2) + "\n");
  write_file(dir / "scatter.csv", vendorsim::scatter_csv(scatter));
  out << "vendor-sim: " << vendors.size() << " vendors, " << pairs << " alias candidates at sim_norm >= "
      << fmt(a.threshold, 2) << " -> " << (dir / "aliases.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- cka

struct CkaArgs {
  std::string layers_a, layers_b;
  std::string kernel = "linear";
  double sigma_frac = cka::kDefaultSigmaFrac;
};

int run_cka(const Global& g, const CkaArgs& a, std::ostream& out) {
  const auto kernel = cka::parse_kernel(a.kernel);
  const auto la = cka::load_layers(a.layers_a);
  const auto lb = a.layers_b.empty() ? la : cka::load_layers(a.layers_b);
  const auto grid = cka::cka_matrix(la, lb, kernel, a.sigma_frac, resolve_threads(g.threads));
  const fs::path dir(g.out);
  write_file(dir / "cka.csv", cka::grid_to_csv(grid));
  write_file(dir / "cka.json", cka::grid_to_json(grid, kernel));
  out << "cka: " << grid.rows << "x" << grid.cols << " " << a.kernel << " grid -> " << (dir / "cka.csv").string()
      << "\n";
  return 0;
}

// ---------------------------------------------------------------- kgraph

struct KgraphArgs {
  std::string index, queries, query_ids, query, labels;
  std::string mode = "rprecision";
  std::size_t k = kgraph::kDefaultTopK;
  double threshold = kgraph::kDefaultThreshold;
  std::string format = "dot";
};

int run_kgraph(const Global& g, const KgraphArgs& a, std::ostream& out) {
  const auto index = retrieval::load_index(a.index);
  const auto queries = load_embeddings(a.queries, a.query_ids);
  const auto vec = queries.row(a.query);

  kgraph::KnowledgeGraph graph;
  if (a.mode == "rprecision") {
    if (a.labels.empty()) throw Error("--labels is required in rprecision mode");
    const auto judgments = metrics::judge({retrieval::QueryResult{a.query, {}}}, index.labels(),
                                          community::load_labels(a.labels));
    graph = kgraph::build_graph_rprecision(a.query, vec, index, judgments);
  } else {
    if (a.k < 1) throw Error("k must be at least 1");
    graph = kgraph::build_graph_topk(a.query, vec, index, a.k, a.threshold);
  }
  std::vector<std::string> formats;
  if (a.format == "all") {
    formats = {"dot", "graphml", "json"};
  } else {
    formats = {a.format};
  }
  const fs::path dir(g.out);
  for (const auto& f : formats) kgraph::export_graph(graph, kgraph::parse_format(f), (dir / ("graph." + f)).string());
  out << "kgraph: " << graph.nodes.size() << " nodes, " << graph.edges.size() << " edges -> "
      << (dir / ("graph." + formats.front())).string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- carbon

struct CarbonArgs {
  double power_kw = 0.0, hours = 0.0, intensity = 0.0;
};

int run_carbon(const CarbonArgs& a, std::ostream& out) {
  const double kg = carbon_estimate(a.power_kw, a.hours, a.intensity);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", kg);
  out << "carbon: " << buf << " kg CO2e\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vendor-linking toolkit: phone extraction, vendor communities, retrieval and evaluation"};
  app.name("vlk");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config; explicit flags take precedence");

  Global g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads (0: VLK_THREADS or 1)");
  app.add_option("--out", g.out, "Output directory");

  ExtractArgs ex;
  auto* c_ex = app.add_subcommand("extract-phones", "Recover obfuscated phone numbers from ad text");
  c_ex->add_option("--ads", ex.ads, "Ads (JSONL or CSV)")->required();
  c_ex->add_option("--lexicon", ex.lexicon, "Lexicon override JSON");
  c_ex->add_option("--gap", ex.gap, "Non-digit tokens allowed inside a number");
  c_ex->add_option("--min-len", ex.min_len, "Shortest accepted number");
  c_ex->add_option("--max-len", ex.max_len, "Longest accepted number");
  c_ex->add_flag("--homophones", ex.homophones, "Read to/too as 2");

  MaskArgs mk;
  auto* c_mk = app.add_subcommand("mask", "Mask phones, emails, links, dates and post ids");
  c_mk->add_option("--ads", mk.ads, "Ads (JSONL or CSV)")->required();
  c_mk->add_flag("--no-dates", mk.no_dates);
  c_mk->add_flag("--no-links", mk.no_links);
  c_mk->add_flag("--no-emails", mk.no_emails);
  c_mk->add_flag("--no-post-ids", mk.no_post_ids);
  c_mk->add_flag("--no-phones", mk.no_phones);

  CommunityArgs cm;
  auto* c_cm = app.add_subcommand("build-communities", "Group ads into vendors by shared phone numbers");
  c_cm->add_option("--ads", cm.ads, "Ads (JSONL or CSV)")->required();
  c_cm->add_option("--phones", cm.phones, "phones.jsonl from extract-phones");
  c_cm->add_flag("--from-labels", cm.from_labels, "Use vendor_label instead of phones");
  c_cm->add_option("--min-ads", cm.min_ads, "Smallest vendor kept");
  c_cm->add_option("--mode", cm.mode, "Small vendors: drop or others")
      ->check(CLI::IsMember({"drop", "others"}));
  c_cm->add_flag("--split", cm.split, "Also write a 0.75/0.05/0.20 stratified split");

  StyloArgs st;
  auto* c_st = app.add_subcommand("stylometry", "Within- and across-market text similarity per vendor");
  c_st->add_option("--ads", st.ads, "Ads (JSONL or CSV)")->required();
  c_st->add_option("--labels", st.labels, "Catalog or label map (default: vendor_label)");
  c_st->add_flag("--lowercase-tokens", st.lowercase_tokens);

  IndexArgs ix;
  auto* c_ix = app.add_subcommand("index", "Build a retrieval index from labeled embeddings");
  c_ix->add_option("--embeddings", ix.embeddings, "EMB1 matrix")->required();
  c_ix->add_option("--ids", ix.ids, "Row ids, one per line")->required();
  c_ix->add_option("--labels", ix.labels, "Catalog or label map")->required();
  c_ix->add_option("--clusters", ix.clusters, "auto, 0 (flat) or a count");

  RetrieveArgs rt;
  auto* c_rt = app.add_subcommand("retrieve", "Top-k cosine search of query ads against an index");
  c_rt->add_option("--index", rt.index, "Index directory")->required();
  c_rt->add_option("--queries", rt.queries, "Query EMB1 matrix")->required();
  c_rt->add_option("--query-ids", rt.query_ids, "Query ids")->required();
  c_rt->add_option("--k", rt.k, "Hits per query");
  c_rt->add_option("--probes", rt.probes, "auto, exact or a count");

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "Precision, recall, MAP, MRR, R-Precision and Macro-F1");
  c_ev->add_option("--run", ev.run, "run.jsonl")->required();
  c_ev->add_option("--index", ev.index, "Index directory or EMB1 matrix")->required();
  c_ev->add_option("--ids", ev.ids, "Index ids (with an EMB1 matrix)");
  c_ev->add_option("--labels", ev.labels, "Catalog or label map")->required();
  c_ev->add_option("--query-labels", ev.query_labels, "Labels for queries (default: --labels)");
  c_ev->add_option("--cutoffs", ev.cutoffs, "Comma-separated K values");

  VendorSimArgs vs;
  auto* c_vs = app.add_subcommand("vendor-sim", "Normalized vendor similarity and alias candidates");
  c_vs->add_option("--embeddings", vs.embeddings, "EMB1 matrix")->required();
  c_vs->add_option("--ids", vs.ids, "Row ids")->required();
  c_vs->add_option("--labels", vs.labels, "Catalog or label map")->required();
  c_vs->add_option("--parent", vs.parent, "Only score this vendor");
  c_vs->add_option("--threshold", vs.threshold, "Alias threshold on sim_norm");

  CkaArgs ck;
  auto* c_ck = app.add_subcommand("cka", "Centered kernel alignment between layer representations");
  c_ck->add_option("--layers-a", ck.layers_a, "Manifest JSON {\"layers\": [...]}")->required();
  c_ck->add_option("--layers-b", ck.layers_b, "Second manifest (default: --layers-a)");
  c_ck->add_option("--kernel", ck.kernel)->check(CLI::IsMember({"linear", "rbf"}));
  c_ck->add_option("--sigma-frac", ck.sigma_frac, "RBF bandwidth as a fraction of the median distance");

  KgraphArgs kg;
  auto* c_kg = app.add_subcommand("kgraph", "Export a query's retrieval neighbourhood as a graph");
  c_kg->add_option("--index", kg.index, "Index directory")->required();
  c_kg->add_option("--queries", kg.queries, "Query EMB1 matrix")->required();
  c_kg->add_option("--query-ids", kg.query_ids, "Query ids")->required();
  c_kg->add_option("--query", kg.query, "Query ad id")->required();
  c_kg->add_option("--labels", kg.labels, "Catalog or label map (rprecision mode)");
  c_kg->add_option("--mode", kg.mode)->check(CLI::IsMember({"rprecision", "topk"}));
  c_kg->add_option("--k", kg.k, "Hits in topk mode");
  c_kg->add_option("--threshold", kg.threshold, "Minimum query score in topk mode");
  c_kg->add_option("--format", kg.format)->check(CLI::IsMember({"dot", "graphml", "json", "all"}));

  CarbonArgs cb;
  auto* c_cb = app.add_subcommand("carbon", "Training emissions: power x hours x intensity");
  c_cb->add_option("--power-kw", cb.power_kw)->required();
  c_cb->add_option("--hours", cb.hours)->required();
  c_cb->add_option("--intensity", cb.intensity, "kg CO2e per kWh")->required();

  auto* c_dump = app.add_subcommand("dump-config", "Print every default as a JSON config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (c_ex->parsed()) return run_extract(g, ex, out);
    if (c_mk->parsed()) return run_mask(g, mk, out);
    if (c_cm->parsed()) return run_communities(g, cm, out);
    if (c_st->parsed()) return run_stylometry(g, st, out);
    if (c_ix->parsed()) return run_index(g, ix, out);
    if (c_rt->parsed()) return run_retrieve(g, rt, out);
    if (c_ev->parsed()) return run_eval(g, ev, out);
    if (c_vs->parsed()) return run_vendor_sim(g, vs, out);
    if (c_ck->parsed()) return run_cka(g, ck, out);
    if (c_kg->parsed()) return run_kgraph(g, kg, out);
    if (c_cb->parsed()) return run_carbon(cb, out);
    if (c_dump->parsed()) {
      out << app.config_to_str(true, false);
      return 0;
    }
  } catch (const Error& e) {
    err << "vlk: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "vlk: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"vlk"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace vlk::cli
