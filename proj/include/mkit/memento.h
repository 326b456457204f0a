#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mkit/datetime.h"
#include "mkit/http.h"
#include "mkit/uri.h"

namespace mkit {

// One link-value from an RFC 8288 Link header or an RFC 7089 link-format body.
struct LinkEntry {
  std::string uri;
  std::vector<std::string> rels;            // split on whitespace, lowercased
  std::map<std::string, std::string> params;  // lowercased names, unquoted values

  bool has_rel(std::string_view rel) const;
};

// Throws MalformedTimeMap on syntax errors.
std::vector<LinkEntry> parse_link_format(std::string_view text);

// How one rewrite is applied to a URI-M.
struct RewriteRule {
  enum class Kind { InsertAfterDatetime, Regex };
  Kind kind = Kind::InsertAfterDatetime;
  std::string token;        // InsertAfterDatetime: "im_", "if_", ...
  std::string pattern;      // Regex: ECMAScript pattern
  std::string replacement;  // Regex: $1-style replacement

  // Accepts "insert-after-datetime:im_" or "regex:<pattern> => <replacement>".
  static RewriteRule parse(std::string_view spec);
  std::optional<std::string> apply(std::string_view urim) const;
};

// What the service knows about one web archive's URI conventions.
struct ArchiveProfile {
  std::string name;
  std::string host_pattern = "*";  // glob over the URI-M host
  std::optional<RewriteRule> raw_rewrite;
  std::optional<RewriteRule> banner_free_rewrite;
  std::optional<std::string> display_name_override;
  // Archive-It style "/<collection id>/<datetime>/..." paths.
  bool collection_in_path = false;
  std::optional<std::string> collection_uri_template;  // "{id}" is substituted
  // Element ids/classes stripped from augmented content when no raw memento exists.
  std::vector<std::string> banner_markers;

  bool matches(const Uri& urim) const;
};

// Wayback-style defaults: Archive-It (collection-bearing), then a catch-all
// rule for any URI-M with a 14-digit datetime path segment.
std::vector<ArchiveProfile> default_archive_profiles();

// INI file, one [section] per archive, first match wins. Keys: host,
// raw_rewrite, banner_free_rewrite, display_name, collection_in_path,
// collection_uri, banner_markers (comma separated).
std::vector<ArchiveProfile> load_archive_profiles(const std::filesystem::path& file);

const ArchiveProfile* match_profile(std::string_view urim,
                                    const std::vector<ArchiveProfile>& profiles);

// Position of the Wayback datetime segment: offset of its 14 digits and the
// length of any modifier already attached ("im_").
struct DatetimeSegment {
  std::size_t offset = 0;
  std::size_t modifier_length = 0;
  std::string digits;
};
std::optional<DatetimeSegment> find_datetime_segment(std::string_view urim);

// Everything after the Wayback datetime segment, with "http:/x" repaired to "http://x".
std::optional<std::string> original_from_urim(std::string_view urim);

std::optional<std::string> derive_raw_urim(std::string_view urim,
                                           const std::vector<ArchiveProfile>& profiles);
std::optional<std::string> derive_banner_free_urim(std::string_view urim,
                                                   const std::vector<ArchiveProfile>& profiles);

struct MementoRecord {
  std::string urim;        // as submitted
  std::string final_urim;  // after redirects
  std::string uri_r;
  Timestamp memento_datetime;
  std::string archive_domain;
  std::optional<std::string> raw_urim;
  std::optional<std::string> timegate_uri;
  std::optional<std::string> timemap_uri;
  // Decoded to UTF-8. content_raw is null when no raw memento could be fetched.
  std::shared_ptr<const std::string> content_augmented;
  std::shared_ptr<const std::string> content_raw;

  // Raw content when available, otherwise augmented.
  const std::string& raw_or_augmented() const {
    return content_raw ? *content_raw : *content_augmented;
  }
  std::string archive_home() const;
};

// GETs the URI-M (following redirects) and reads Memento-Datetime and the
// Link header. Throws InvalidUri, NotAMemento, ConnectionFailed, FetchTimeout.
MementoRecord detect_memento(std::string_view uri, const Fetcher& fetcher);

// detect_memento plus raw-memento discovery. Falls back to augmented content
// with the profile's banner markup stripped when no raw URI-M is derivable.
MementoRecord load_memento(std::string_view uri, const Fetcher& fetcher,
                           const std::vector<ArchiveProfile>& profiles);

// Removes elements whose id or class matches one of the markers.
std::string strip_banner(std::string_view html, const std::vector<std::string>& markers);

// Sends Accept-Datetime to <timegate_base><uri_r>, follows redirects and
// returns the URI-M the gate selected, or nullopt when the gate has none.
std::optional<std::string> negotiate_datetime(std::string_view uri_r, Timestamp target,
                                              std::string_view timegate_base,
                                              const Fetcher& fetcher);

// TimeGate prefix for a record: its rel="timegate" link with the URI-R suffix removed.
std::optional<std::string> timegate_base_of(const MementoRecord& record);

// True when the URI answers 200 with a Memento-Datetime header.
bool is_memento(std::string_view uri, const Fetcher& fetcher);

struct TimeMapStats {
  std::string uri_t;
  std::string uri_r;
  std::size_t memento_count = 0;
  std::optional<Timestamp> first_memento_datetime;
  std::optional<Timestamp> last_memento_datetime;
  std::optional<std::string> first_urim;
  std::optional<std::string> last_urim;
};

TimeMapStats parse_timemap(std::string_view body);

// <base>/list/<YYYYMMDDHHMMSS>Z/<uri_r>
std::string build_timetravel_uri(std::string_view uri_r, Timestamp memento_datetime,
                                 std::string_view aggregator_base);

// Charset resolution: declared header charset, then <meta charset>, then
// UTF-8 with U+FFFD replacement.
std::string decode_to_utf8(std::string_view bytes, const std::optional<std::string>& charset);

}  // namespace mkit
