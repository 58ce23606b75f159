#include <algorithm>
#include <regex>

#include "vlk/corpus.hpp"
#include "vlk/phonex.hpp"

namespace vlk {

namespace {

enum class Region { keep, post_id, email, link, date };

struct Match {
  std::size_t begin;
  std::size_t end;
  Region kind;
};

const std::regex& placeholder_re() {
  static const std::regex re(R"(<EMAILID-[0-9]+>|<LINK>|<DATES>|POST_ID:N+)");
  return re;
}
const std::regex& post_id_re() {
  static const std::regex re(R"(post id:[ \t]*[0-9]+)", std::regex::icase);
  return re;
}
const std::regex& email_re() {
  static const std::regex re(R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,})");
  return re;
}
const std::regex& link_re() {
  static const std::regex re(
      R"((https?://|www\.)[^\s<>"']+|\b[A-Za-z0-9][A-Za-z0-9\-]*(\.[A-Za-z0-9\-]+)*\.(com|net|org|edu|gov|info|biz|io|co|us|uk|me|ly)\b(/[^\s<>"']*)?)",
      std::regex::icase);
  return re;
}
const std::vector<std::regex>& date_res() {
  static const std::vector<std::regex> res = {
      std::regex(R"(\b[0-9]{4}-[0-9]{2}-[0-9]{2}([T ][0-9]{2}:[0-9]{2}(:[0-9]{2})?)?\b)"),
      std::regex(R"(\b[0-9]{1,2}/[0-9]{1,2}/([0-9]{4}|[0-9]{2})\b)"),
      std::regex(R"(\b(jan(uary)?|feb(ruary)?|mar(ch)?|apr(il)?|may|june?|july?|aug(ust)?|sep(t(ember)?)?|oct(ober)?|nov(ember)?|dec(ember)?)\.? [0-9]{1,2}(st|nd|rd|th)?, [0-9]{4}\b)",
                 std::regex::icase),
  };
  return res;
}

bool overlaps(const std::vector<Match>& taken, std::size_t b, std::size_t e) {
  return std::any_of(taken.begin(), taken.end(), [&](const Match& m) { return b < m.end && m.begin < e; });
}

void collect(std::string_view text, const std::regex& re, Region kind, std::vector<Match>& taken) {
  using It = std::string_view::const_iterator;
  for (std::regex_iterator<It> it(text.begin(), text.end(), re), end; it != end; ++it) {
    std::size_t b = static_cast<std::size_t>(it->position(0));
    std::size_t e = b + static_cast<std::size_t>(it->length(0));
    if (kind == Region::link) {
      while (e > b && std::string_view(".,;:!?)").find(text[e - 1]) != std::string_view::npos) --e;
    }
    if (e > b && !overlaps(taken, b, e)) taken.push_back({b, e, kind});
  }
}

}  // namespace

std::string mask_sensitive(std::string_view text, const MaskOptions& options) {
  std::vector<Match> regions;
  collect(text, placeholder_re(), Region::keep, regions);
  if (options.mask_post_ids) collect(text, post_id_re(), Region::post_id, regions);
  if (options.mask_emails) collect(text, email_re(), Region::email, regions);
  if (options.mask_links) collect(text, link_re(), Region::link, regions);
  if (options.mask_dates) {
    for (const auto& re : date_res()) collect(text, re, Region::date, regions);
  }
  std::sort(regions.begin(), regions.end(), [](const Match& a, const Match& b) { return a.begin < b.begin; });

  // Phones are searched with every region blanked out, so placeholders and
  // emails never contribute digits.
  std::string out(text);
  if (options.mask_phones) {
    std::string blanked(text);
    for (const auto& r : regions) std::fill(blanked.begin() + r.begin, blanked.begin() + r.end, ' ');
    phonex::ExtractConfig cfg;
    cfg.masking = true;
    for (const auto& cand : phonex::extract_phones(blanked, cfg)) {
      for (std::size_t i = cand.span.begin; i < cand.span.end; ++i) {
        if (out[i] >= '0' && out[i] <= '9') out[i] = 'N';
      }
    }
  }

  std::string result;
  result.reserve(out.size());
  std::size_t cursor = 0;
  std::size_t email_id = options.first_email_id;
  for (const auto& r : regions) {
    result.append(out, cursor, r.begin - cursor);
    switch (r.kind) {
      case Region::keep: result.append(out, r.begin, r.end - r.begin); break;
      case Region::post_id: result += "POST_ID:NNNNN"; break;
      case Region::email: result += "<EMAILID-" + std::to_string(email_id++) + ">"; break;
      case Region::link: result += "<LINK>"; break;
      case Region::date: result += "<DATES>"; break;
    }
    cursor = r.end;
  }
  result.append(out, cursor, std::string::npos);
  return result;
}

}  // namespace vlk
