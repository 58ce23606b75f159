#include "vlk/community.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "vlk/error.hpp"

namespace vlk::community {

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned> rank_;
};

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

nlohmann::json vendor_json(const Vendor& v) {
  nlohmann::json j;
  if (v.id == kOthersId) {
    j["id"] = kOthersLabel;
  } else {
    j["id"] = v.id;
  }
  if (v.name) j["name"] = *v.name;
  j["phones"] = v.phones;
  j["ads"] = v.ad_ids;
  return j;
}

Vendor vendor_from_json(const nlohmann::json& j) {
  Vendor v;
  const auto& id = j.at("id");
  v.id = id.is_string() ? kOthersId : id.get<int>();
  if (j.contains("name")) v.name = j.at("name").get<std::string>();
  v.phones = j.value("phones", std::vector<std::string>{});
  v.ad_ids = j.at("ads").get<std::vector<std::string>>();
  return v;
}

}  // namespace

std::map<std::string, std::string> VendorCatalog::labels() const {
  std::map<std::string, std::string> out;
  for (const auto& [ad, vendor] : assignments) {
    if (!vendor) continue;
    out[ad] = *vendor == kOthersId ? std::string(kOthersLabel) : std::to_string(*vendor);
  }
  return out;
}

std::vector<std::string> VendorCatalog::unlabeled() const {
  std::vector<std::string> out;
  for (const auto& [ad, vendor] : assignments) {
    if (!vendor) out.push_back(ad);
  }
  return out;
}

PhoneGraph build_phone_graph(const std::vector<AdPhones>& ads) {
  PhoneGraph g;
  for (const auto& ad : ads) {
    std::vector<std::string> phones(ad.phones);
    std::sort(phones.begin(), phones.end());
    phones.erase(std::unique(phones.begin(), phones.end()), phones.end());
    g.nodes.insert(phones.begin(), phones.end());
    for (std::size_t i = 0; i < phones.size(); ++i) {
      for (std::size_t j = i + 1; j < phones.size(); ++j) g.edges.emplace(phones[i], phones[j]);
    }
  }
  return g;
}

VendorCatalog assign_vendors(const PhoneGraph& graph, const std::vector<AdPhones>& ads) {
  // std::set iteration is sorted, so node index order is lexicographic.
  std::unordered_map<std::string, std::size_t> index;
  std::vector<const std::string*> phone_of;
  for (const auto& p : graph.nodes) {
    index.emplace(p, phone_of.size());
    phone_of.push_back(&p);
  }
  DisjointSet dsu(phone_of.size());
  for (const auto& [a, b] : graph.edges) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end()) throw Error("phone graph edge references an unknown node");
    dsu.unite(ia->second, ib->second);
  }

  // Component rank by smallest member = order of first appearance in sorted nodes.
  std::vector<int> component_id(phone_of.size(), -1);
  int next_id = 0;
  for (std::size_t i = 0; i < phone_of.size(); ++i) {
    const std::size_t root = dsu.find(i);
    if (component_id[root] < 0) component_id[root] = next_id++;
  }

  VendorCatalog cat;
  std::vector<Vendor> vendors(static_cast<std::size_t>(next_id));
  for (int v = 0; v < next_id; ++v) vendors[static_cast<std::size_t>(v)].id = v;
  std::vector<bool> used(vendors.size(), false);

  for (const auto& ad : ads) {
    if (cat.assignments.count(ad.ad_id)) throw Error("duplicate ad_id \"" + ad.ad_id + "\"");
    if (ad.phones.empty()) {
      cat.assignments[ad.ad_id] = std::nullopt;
      continue;
    }
    int vendor = -1;
    for (const auto& p : ad.phones) {
      auto it = index.find(p);
      if (it == index.end()) throw Error("ad \"" + ad.ad_id + "\" references phone " + p + " absent from the graph");
      const int c = component_id[dsu.find(it->second)];
      if (vendor >= 0 && c != vendor) {
        throw Error("ad \"" + ad.ad_id + "\" has phones in different components of the supplied graph");
      }
      vendor = c;
    }
    cat.assignments[ad.ad_id] = vendor;
    vendors[static_cast<std::size_t>(vendor)].ad_ids.push_back(ad.ad_id);
    used[static_cast<std::size_t>(vendor)] = true;
  }
  for (std::size_t i = 0; i < phone_of.size(); ++i) {
    vendors[static_cast<std::size_t>(component_id[dsu.find(i)])].phones.push_back(*phone_of[i]);
  }
  for (auto& v : vendors) std::sort(v.ad_ids.begin(), v.ad_ids.end());

  // Components that no listed ad touches (possible with a user-supplied
  // graph) carry no ads; drop them and keep ids contiguous.
  std::vector<int> remap(vendors.size(), -1);
  int kept = 0;
  for (std::size_t v = 0; v < vendors.size(); ++v) {
    if (!used[v]) continue;
    remap[v] = kept;
    vendors[v].id = kept++;
    cat.vendors.push_back(std::move(vendors[v]));
  }
  for (auto& [ad, vendor] : cat.assignments) {
    if (vendor) vendor = remap[static_cast<std::size_t>(*vendor)];
  }
  return cat;
}

VendorCatalog filter_vendors(const VendorCatalog& catalog, std::size_t min_ads, FilterMode mode) {
  if (min_ads < 1) throw Error("min_ads must be at least 1");
  VendorCatalog out;
  std::map<int, std::optional<int>> remap;
  Vendor others = catalog.others.value_or(Vendor{kOthersId, std::nullopt, {}, {}});
  for (const auto& v : catalog.vendors) {
    if (v.ad_count() >= min_ads) {
      Vendor kept = v;
      kept.id = static_cast<int>(out.vendors.size());
      remap[v.id] = kept.id;
      out.vendors.push_back(std::move(kept));
    } else if (mode == FilterMode::others_bucket) {
      remap[v.id] = kOthersId;
      others.phones.insert(others.phones.end(), v.phones.begin(), v.phones.end());
      others.ad_ids.insert(others.ad_ids.end(), v.ad_ids.begin(), v.ad_ids.end());
    } else {
      remap[v.id] = std::nullopt;
    }
  }
  for (const auto& [ad, vendor] : catalog.assignments) {
    if (!vendor) {
      out.assignments[ad] = std::nullopt;
    } else if (*vendor == kOthersId) {
      out.assignments[ad] = kOthersId;
    } else if (auto r = remap.at(*vendor)) {
      out.assignments[ad] = *r;
    }
    // Dropped vendors take their ads with them.
  }
  if (!others.ad_ids.empty()) {
    std::sort(others.phones.begin(), others.phones.end());
    std::sort(others.ad_ids.begin(), others.ad_ids.end());
    out.others = std::move(others);
  }
  return out;
}

VendorCatalog catalog_from_labels(const std::vector<AdRecord>& ads) {
  std::map<std::string, std::vector<std::string>> by_name;
  VendorCatalog cat;
  for (const auto& ad : ads) {
    if (!ad.vendor_label || ad.vendor_label->empty()) {
      cat.assignments[ad.ad_id] = std::nullopt;
      continue;
    }
    by_name[to_lower(*ad.vendor_label)].push_back(ad.ad_id);
  }
  for (auto& [name, ids] : by_name) {
    Vendor v;
    v.id = static_cast<int>(cat.vendors.size());
    v.name = name;
    std::sort(ids.begin(), ids.end());
    v.ad_ids = ids;
    for (const auto& id : ids) cat.assignments[id] = v.id;
    cat.vendors.push_back(std::move(v));
  }
  return cat;
}

std::string catalog_to_json(const VendorCatalog& catalog) {
  nlohmann::json j;
  j["vendors"] = nlohmann::json::array();
  for (const auto& v : catalog.vendors) j["vendors"].push_back(vendor_json(v));
  if (catalog.others) j["others"] = vendor_json(*catalog.others);
  j["unlabeled"] = catalog.unlabeled();
  return j.dump(2) + "\n";
}

VendorCatalog catalog_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("catalog: invalid JSON: ") + e.what());
  }
  VendorCatalog cat;
  try {
    for (const auto& vj : j.at("vendors")) {
      Vendor v = vendor_from_json(vj);
      if (v.id != static_cast<int>(cat.vendors.size())) throw Error("catalog: vendor ids must be contiguous from 0");
      for (const auto& ad : v.ad_ids) cat.assignments[ad] = v.id;
      cat.vendors.push_back(std::move(v));
    }
    if (j.contains("others")) {
      Vendor o = vendor_from_json(j.at("others"));
      o.id = kOthersId;
      for (const auto& ad : o.ad_ids) cat.assignments[ad] = kOthersId;
      cat.others = std::move(o);
    }
    for (const auto& ad : j.value("unlabeled", std::vector<std::string>{})) cat.assignments[ad] = std::nullopt;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("catalog: ") + e.what());
  }
  return cat;
}

std::map<std::string, std::string> load_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open label file");
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path + ": invalid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("vendors") && j.at("vendors").is_array()) {
    try {
      return catalog_from_json(buf.str()).labels();
    } catch (const Error& e) {
      throw Error(path + ": " + e.what());
    }
  }
  if (!j.is_object()) throw Error(path + ": expected a catalog or an ad_id -> label object");
  std::map<std::string, std::string> out;
  for (const auto& [ad, label] : j.items()) {
    if (label.is_string()) {
      out[ad] = label.get<std::string>();
    } else if (label.is_number_integer()) {
      out[ad] = std::to_string(label.get<long long>());
    } else {
      throw Error(path + ": label of \"" + ad + "\" must be a string or integer");
    }
  }
  return out;
}

Split stratified_split(const std::map<std::string, std::string>& labels, std::uint64_t seed, double train_ratio,
                       double validation_ratio, double test_ratio) {
  if (train_ratio < 0 || validation_ratio < 0 || test_ratio < 0 ||
      std::abs(train_ratio + validation_ratio + test_ratio - 1.0) > 1e-9) {
    throw Error("split ratios must be non-negative and sum to 1");
  }
  std::map<std::string, std::vector<std::string>> by_class;
  for (const auto& [ad, label] : labels) by_class[label].push_back(ad);

  std::mt19937_64 rng(seed);
  Split split;
  for (auto& [label, ids] : by_class) {
    // ids arrive sorted (map order); Fisher-Yates with our own index draw.
    for (std::size_t k = ids.size(); k > 1; --k) std::swap(ids[k - 1], ids[static_cast<std::size_t>(rng() % k)]);
    const auto n = static_cast<double>(ids.size());
    const auto n_val = static_cast<std::size_t>(std::floor(validation_ratio * n));
    const auto n_test = static_cast<std::size_t>(std::floor(test_ratio * n));
    std::size_t k = 0;
    for (; k < n_val; ++k) split.validation.push_back(ids[k]);
    for (; k < n_val + n_test; ++k) split.test.push_back(ids[k]);
    for (; k < ids.size(); ++k) split.train.push_back(ids[k]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace vlk::community
