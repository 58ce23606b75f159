#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vlk/corpus.hpp"

namespace vlk::community {

struct AdPhones {
  std::string ad_id;
  std::vector<std::string> phones;
};

/// Phone co-occurrence graph: one node per distinct phone, edges between
/// phones that appear in the same ad. Edges are stored with first < second.
struct PhoneGraph {
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;
};

/// Label id used for the bucket that collects ads of small vendors.
inline constexpr int kOthersId = -1;
inline constexpr const char* kOthersLabel = "others";

struct Vendor {
  int id = 0;
  std::optional<std::string> name;   // set when built from vendor_label strings
  std::vector<std::string> phones;   // sorted
  std::vector<std::string> ad_ids;   // sorted
  std::size_t ad_count() const { return ad_ids.size(); }
};

struct VendorCatalog {
  /// ad_id -> vendor id; nullopt marks an unlabeled ad. kOthersId marks the
  /// "others" bucket.
  std::map<std::string, std::optional<int>> assignments;
  std::vector<Vendor> vendors;  // vendors[i].id == i
  std::optional<Vendor> others;

  /// ad_id -> class label ("0", "1", ..., "others"); unlabeled ads omitted.
  std::map<std::string, std::string> labels() const;
  std::vector<std::string> unlabeled() const;
};

PhoneGraph build_phone_graph(const std::vector<AdPhones>& ads);

/// Vendor ids follow connected components ordered by their smallest phone.
/// Throws Error if an ad references a phone missing from the graph or its
/// phones lie in different components.
VendorCatalog assign_vendors(const PhoneGraph& graph, const std::vector<AdPhones>& ads);

enum class FilterMode { drop, others_bucket };

/// Drops (or buckets into "others") vendors with fewer than min_ads ads.
/// Surviving vendors are renumbered 0.. in their original order.
VendorCatalog filter_vendors(const VendorCatalog& catalog, std::size_t min_ads, FilterMode mode);

/// Groups ads by lowercased vendor_label when labels are supplied directly.
/// Ids follow the sorted lowercased names.
VendorCatalog catalog_from_labels(const std::vector<AdRecord>& ads);

std::string catalog_to_json(const VendorCatalog& catalog);
VendorCatalog catalog_from_json(const std::string& text);

/// Loads ad_id -> label from either a catalog JSON or a flat {"ad": "label"}
/// object.
std::map<std::string, std::string> load_labels(const std::string& path);

struct Split {
  std::vector<std::string> train, validation, test;
};

/// Per-vendor stratified partition. Each vendor gets floor(0.05 n) validation
/// and floor(0.20 n) test ads; the remainder goes to training.
Split stratified_split(const std::map<std::string, std::string>& labels, std::uint64_t seed,
                       double train_ratio = 0.75, double validation_ratio = 0.05, double test_ratio = 0.20);

}  // namespace vlk::community
