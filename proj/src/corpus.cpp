#include "vlk/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "vlk/error.hpp"
#include "vlk/utf8.hpp"

namespace vlk {

namespace {

using nlohmann::json;

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void check_phones(const std::vector<std::string>& phones, const std::string& path, std::size_t line) {
  for (const auto& p : phones) {
    if (!all_digits(p)) throw ParseError(path, line, "phone \"" + p + "\" is not digits-only");
  }
}

std::string required_string(const json& obj, const char* key, const std::string& path, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw ParseError(path, line, std::string("missing required field \"") + key + "\"");
  }
  if (!it->is_string()) throw ParseError(path, line, std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& path,
                                           std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(path, line, std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

AdRecord parse_json_line(const std::string& raw, const std::string& path, std::size_t line) {
  json obj;
  try {
    obj = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ParseError(path, line, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(path, line, "expected a JSON object");

  AdRecord ad;
  ad.ad_id = required_string(obj, "ad_id", path, line);
  ad.title = required_string(obj, "title", path, line);
  ad.description = required_string(obj, "description", path, line);
  ad.market = optional_string(obj, "market", path, line);
  ad.region = optional_string(obj, "region", path, line);
  ad.vendor_label = optional_string(obj, "vendor_label", path, line);
  if (auto it = obj.find("phones"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(path, line, "field \"phones\" must be an array");
    std::vector<std::string> phones;
    for (const auto& p : *it) {
      if (!p.is_string()) throw ParseError(path, line, "phones must be strings");
      phones.push_back(p.get<std::string>());
    }
    check_phones(phones, path, line);
    ad.phones = std::move(phones);
  }
  return ad;
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Reads one logical CSV record, which may span lines inside quotes.
bool read_csv_record(std::istream& in, std::string& record, std::size_t& line_no) {
  record.clear();
  std::string line;
  bool in_quotes = false;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (any) record.push_back('\n');
    record += line;
    any = true;
    for (char c : line) {
      if (c == '"') in_quotes = !in_quotes;
    }
    if (!in_quotes) return true;
  }
  return any;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

AdFormat format_from_path(std::string_view path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return AdFormat::csv;
  return AdFormat::jsonl;
}

std::vector<AdRecord> load_ads(const std::string& path) { return load_ads(path, format_from_path(path)); }

std::vector<AdRecord> load_ads(const std::string& path, AdFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");

  std::vector<AdRecord> ads;
  std::unordered_set<std::string> seen;
  auto admit = [&](AdRecord ad, std::size_t line) {
    if (ad.ad_id.empty()) throw ParseError(path, line, "empty ad_id");
    if (!seen.insert(ad.ad_id).second) throw ParseError(path, line, "duplicate ad_id \"" + ad.ad_id + "\"");
    ads.push_back(std::move(ad));
  };

  if (format == AdFormat::jsonl) {
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (raw.find_first_not_of(" \t") == std::string::npos) continue;
      if (!utf8::is_valid(raw)) throw ParseError(path, line, "invalid UTF-8");
      admit(parse_json_line(raw, path, line), line);
    }
    return ads;
  }

  std::string record;
  std::size_t line = 0;
  if (!read_csv_record(in, record, line)) throw ParseError(path, 1, "missing CSV header");
  const auto header = split_csv_line(record);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  for (const char* key : {"ad_id", "title", "description"}) {
    if (!column(key)) throw ParseError(path, 1, std::string("missing required column \"") + key + "\"");
  }
  const auto c_id = *column("ad_id");
  const auto c_title = *column("title");
  const auto c_desc = *column("description");
  const auto c_market = column("market");
  const auto c_region = column("region");
  const auto c_phones = column("phones");
  const auto c_vendor = column("vendor_label");

  while (true) {
    const std::size_t start_line = line + 1;
    if (!read_csv_record(in, record, line)) break;
    if (record.empty()) continue;
    if (!utf8::is_valid(record)) throw ParseError(path, start_line, "invalid UTF-8");
    const auto fields = split_csv_line(record);
    if (fields.size() != header.size()) {
      throw ParseError(path, start_line,
                       "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    AdRecord ad;
    ad.ad_id = fields[c_id];
    ad.title = fields[c_title];
    ad.description = fields[c_desc];
    auto opt = [&](std::optional<std::size_t> c) -> std::optional<std::string> {
      if (!c || fields[*c].empty()) return std::nullopt;
      return fields[*c];
    };
    ad.market = opt(c_market);
    ad.region = opt(c_region);
    ad.vendor_label = opt(c_vendor);
    if (auto raw = opt(c_phones)) {
      auto phones = split_on(*raw, ';');
      check_phones(phones, path, start_line);
      ad.phones = std::move(phones);
    }
    admit(std::move(ad), start_line);
  }
  return ads;
}

PreparedText prepare_text(const AdRecord& ad) { return {ad.ad_id, ad.title + " [SEP] " + ad.description}; }

}  // namespace vlk
