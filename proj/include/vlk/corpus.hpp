#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vlk {

/// One advertisement: the unit every pipeline consumes.
struct AdRecord {
  std::string ad_id;
  std::string title;
  std::string description;
  std::optional<std::string> market;
  std::optional<std::string> region;
  std::optional<std::vector<std::string>> phones;  // digits-only when present
  std::optional<std::string> vendor_label;
};

struct PreparedText {
  std::string ad_id;
  std::string text;
};

enum class AdFormat { jsonl, csv };

/// Guesses the format from the extension (".csv" -> csv, anything else jsonl).
AdFormat format_from_path(std::string_view path);

/// Reads a corpus. Throws ParseError (file:line) on malformed rows, missing
/// required fields, non-digit phones, or duplicate ad_id.
std::vector<AdRecord> load_ads(const std::string& path, AdFormat format);
std::vector<AdRecord> load_ads(const std::string& path);

/// title + " [SEP] " + description, verbatim.
PreparedText prepare_text(const AdRecord& ad);

struct MaskOptions {
  bool mask_dates = true;
  bool mask_links = true;
  bool mask_emails = true;
  bool mask_post_ids = true;
  bool mask_phones = true;
  std::size_t first_email_id = 1;
};

/// Replaces phone digits with 'N', emails with <EMAILID-k> (k counts from
/// first_email_id per call), links with <LINK>, dates with <DATES> and "Post ID: 123" with
/// POST_ID:NNNNN. Already-masked placeholders are left untouched, so the
/// function is idempotent.
std::string mask_sensitive(std::string_view text, const MaskOptions& options = {});

/// Splits one CSV record honouring double-quoted fields ("" escapes a quote).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace vlk
