#include "mkit/memento.h"

#include <unicode/ucnv.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <regex>

#include "mkit/errors.h"
#include "mkit/html.h"
#include "mkit/text.h"

namespace mkit {

namespace {

bool glob_match(std::string_view pattern, std::string_view s) {
  // Iterative '*' / '?' matcher.
  std::size_t p = 0, i = 0, star = std::string_view::npos, mark = 0;
  while (i < s.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == s[i])) {
      ++p;
      ++i;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = i;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      i = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::string unquote(std::string_view v) {
  v = text::trim(v);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) ++i;
      out += v[i];
    }
    return out;
  }
  return std::string(v);
}

bool is_ok(int status) { return status >= 200 && status < 300; }

std::string join_path(std::string_view base, std::string_view tail) {
  std::string out(base);
  if (!out.empty() && out.back() != '/') out += '/';
  out += tail;
  return out;
}

}  // namespace

bool LinkEntry::has_rel(std::string_view rel) const {
  return std::find(rels.begin(), rels.end(), rel) != rels.end();
}

std::vector<LinkEntry> parse_link_format(std::string_view s) {
  std::vector<LinkEntry> out;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  };
  while (true) {
    skip_ws();
    if (pos >= s.size()) break;
    if (s[pos] == ',') {
      ++pos;
      continue;
    }
    if (s[pos] != '<')
      throw MalformedTimeMap("expected '<' at offset " + std::to_string(pos));
    const auto close = s.find('>', pos);
    if (close == std::string_view::npos)
      throw MalformedTimeMap("unterminated URI reference at offset " + std::to_string(pos));
    LinkEntry entry;
    entry.uri = std::string(text::trim(s.substr(pos + 1, close - pos - 1)));
    pos = close + 1;
    while (true) {
      skip_ws();
      if (pos >= s.size() || s[pos] == ',') break;
      if (s[pos] != ';')
        throw MalformedTimeMap("expected ';' or ',' at offset " + std::to_string(pos));
      ++pos;
      skip_ws();
      const std::size_t name_start = pos;
      while (pos < s.size() && s[pos] != '=' && s[pos] != ';' && s[pos] != ',' &&
             !std::isspace(static_cast<unsigned char>(s[pos])))
        ++pos;
      std::string name = to_lower_ascii(s.substr(name_start, pos - name_start));
      skip_ws();
      std::string value;
      if (pos < s.size() && s[pos] == '=') {
        ++pos;
        skip_ws();
        if (pos < s.size() && s[pos] == '"') {
          std::size_t end = pos + 1;
          while (end < s.size() && s[end] != '"') end += s[end] == '\\' ? 2 : 1;
          if (end >= s.size())
            throw MalformedTimeMap("unterminated quoted string at offset " + std::to_string(pos));
          value = unquote(s.substr(pos, end - pos + 1));
          pos = end + 1;
        } else {
          const std::size_t vstart = pos;
          while (pos < s.size() && s[pos] != ';' && s[pos] != ',') ++pos;
          value = std::string(text::trim(s.substr(vstart, pos - vstart)));
        }
      }
      if (name.empty()) throw MalformedTimeMap("empty parameter name");
      if (name == "rel") {
        for (const auto& r : text::split(to_lower_ascii(value), ' '))
          if (!r.empty()) entry.rels.push_back(r);
      }
      entry.params.emplace(std::move(name), std::move(value));
    }
    out.push_back(std::move(entry));
  }
  return out;
}

RewriteRule RewriteRule::parse(std::string_view spec) {
  spec = text::trim(spec);
  RewriteRule rule;
  if (text::starts_with_icase(spec, "insert-after-datetime:")) {
    rule.kind = Kind::InsertAfterDatetime;
    rule.token = std::string(text::trim(spec.substr(22)));
    return rule;
  }
  if (text::starts_with_icase(spec, "regex:")) {
    const std::string_view body = spec.substr(6);
    const auto arrow = body.find("=>");
    if (arrow == std::string_view::npos) throw ConfigError("regex rewrite needs '=>'");
    rule.kind = Kind::Regex;
    rule.pattern = std::string(text::trim(body.substr(0, arrow)));
    rule.replacement = std::string(text::trim(body.substr(arrow + 2)));
    try {
      std::regex check(rule.pattern);
    } catch (const std::regex_error& e) {
      throw ConfigError("bad rewrite pattern '" + rule.pattern + "': " + e.what());
    }
    return rule;
  }
  throw ConfigError("unknown rewrite rule '" + std::string(spec) + "'");
}

std::optional<std::string> RewriteRule::apply(std::string_view urim) const {
  if (kind == Kind::InsertAfterDatetime) {
    const auto seg = find_datetime_segment(urim);
    if (!seg) return std::nullopt;
    std::string out(urim);
    out.replace(seg->offset + 14, seg->modifier_length, token);
    return out;
  }
  const std::regex re(pattern);
  const std::string in(urim);
  if (!std::regex_search(in, re)) return std::nullopt;
  return std::regex_replace(in, re, replacement, std::regex_constants::format_first_only);
}

bool ArchiveProfile::matches(const Uri& urim) const {
  if (!glob_match(host_pattern, urim.host)) return false;
  return find_datetime_segment(urim.str()).has_value();
}

std::vector<ArchiveProfile> default_archive_profiles() {
  std::vector<ArchiveProfile> profiles;

  ArchiveProfile archive_it;
  archive_it.name = "archive-it";
  archive_it.host_pattern = "wayback.archive-it.org";
  archive_it.raw_rewrite = RewriteRule::parse("insert-after-datetime:id_");
  archive_it.banner_free_rewrite = RewriteRule::parse("insert-after-datetime:if_");
  archive_it.collection_in_path = true;
  archive_it.collection_uri_template = "https://archive-it.org/collections/{id}";
  archive_it.banner_markers = {"wm-ipp-base", "wm-ipp", "wm-banner", "archive-banner"};
  profiles.push_back(archive_it);

  ArchiveProfile wayback;
  wayback.name = "wayback";
  wayback.host_pattern = "*";
  wayback.raw_rewrite = RewriteRule::parse("insert-after-datetime:im_");
  wayback.banner_free_rewrite = RewriteRule::parse("insert-after-datetime:if_");
  wayback.banner_markers = {"wm-ipp-base", "wm-ipp", "wm-banner", "archive-banner"};
  profiles.push_back(wayback);
  return profiles;
}

std::vector<ArchiveProfile> load_archive_profiles(const std::filesystem::path& file) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(file.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("archive profiles: ") + e.what());
  }
  std::vector<ArchiveProfile> profiles;
  for (const auto& [section, values] : tree) {
    ArchiveProfile p;
    p.name = section;
    p.host_pattern = values.get<std::string>("host", "*");
    if (auto v = values.get_optional<std::string>("raw_rewrite"); v && !v->empty())
      p.raw_rewrite = RewriteRule::parse(*v);
    if (auto v = values.get_optional<std::string>("banner_free_rewrite"); v && !v->empty())
      p.banner_free_rewrite = RewriteRule::parse(*v);
    if (auto v = values.get_optional<std::string>("display_name"); v && !v->empty())
      p.display_name_override = *v;
    const std::string coll = to_lower_ascii(values.get<std::string>("collection_in_path", "no"));
    p.collection_in_path = coll == "yes" || coll == "true" || coll == "1";
    if (auto v = values.get_optional<std::string>("collection_uri"); v && !v->empty())
      p.collection_uri_template = *v;
    if (auto v = values.get_optional<std::string>("banner_markers")) {
      for (const auto& m : text::split(*v, ','))
        if (auto t = text::trim(m); !t.empty()) p.banner_markers.emplace_back(t);
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

const ArchiveProfile* match_profile(std::string_view urim,
                                    const std::vector<ArchiveProfile>& profiles) {
  const auto uri = parse_absolute_uri(urim);
  if (!uri) return nullptr;
  for (const auto& p : profiles)
    if (p.matches(*uri)) return &p;
  return nullptr;
}

std::optional<DatetimeSegment> find_datetime_segment(std::string_view urim) {
  const auto scheme_end = urim.find("://");
  if (scheme_end == std::string_view::npos) return std::nullopt;
  const auto path_start = urim.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return std::nullopt;
  std::size_t pos = path_start + 1;
  while (pos < urim.size()) {
    auto end = urim.find('/', pos);
    if (end == std::string_view::npos) end = urim.size();
    const std::string_view seg = urim.substr(pos, end - pos);
    if (seg.size() >= 14 &&
        std::all_of(seg.begin(), seg.begin() + 14,
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const std::string_view mod = seg.substr(14);
      const bool mod_ok =
          mod.empty() || (mod.back() == '_' &&
                          std::all_of(mod.begin(), mod.end() - 1, [](char c) {
                            return std::isalpha(static_cast<unsigned char>(c));
                          }));
      if (mod_ok) return DatetimeSegment{pos, mod.size(), std::string(seg.substr(0, 14))};
    }
    // The embedded original URI starts at the first segment containing ':'.
    if (seg.find(':') != std::string_view::npos) break;
    pos = end + 1;
  }
  return std::nullopt;
}

std::optional<std::string> original_from_urim(std::string_view urim) {
  const auto seg = find_datetime_segment(urim);
  if (!seg) return std::nullopt;
  const std::size_t start = seg->offset + 14 + seg->modifier_length + 1;
  if (start >= urim.size()) return std::nullopt;
  std::string rest(urim.substr(start));
  static const std::regex kOneSlash(R"(^(https?):/([^/]))", std::regex::icase);
  rest = std::regex_replace(rest, kOneSlash, "$1://$2");
  if (rest.find("://") == std::string::npos) rest = "http://" + rest;
  if (!is_absolute_uri(rest)) return std::nullopt;
  return rest;
}

std::optional<std::string> derive_raw_urim(std::string_view urim,
                                           const std::vector<ArchiveProfile>& profiles) {
  const ArchiveProfile* p = match_profile(urim, profiles);
  if (!p || !p->raw_rewrite) return std::nullopt;
  return p->raw_rewrite->apply(urim);
}

std::optional<std::string> derive_banner_free_urim(std::string_view urim,
                                                   const std::vector<ArchiveProfile>& profiles) {
  const ArchiveProfile* p = match_profile(urim, profiles);
  if (!p || !p->banner_free_rewrite) return std::nullopt;
  return p->banner_free_rewrite->apply(urim);
}

std::string MementoRecord::archive_home() const {
  const auto uri = parse_absolute_uri(final_urim.empty() ? urim : final_urim);
  return uri ? uri->origin() + "/" : std::string();
}

MementoRecord detect_memento(std::string_view uri, const Fetcher& fetcher) {
  const auto parsed = parse_absolute_uri(uri);
  if (!parsed || (parsed->scheme != "http" && parsed->scheme != "https"))
    throw InvalidUri("'" + std::string(uri) + "' is not an absolute http(s) URI");

  HttpRequest req;
  req.url = std::string(uri);
  const HttpResponse res = fetch_following(fetcher, req);
  if (res.status >= 500)
    throw ConnectionFailed("archive answered " + std::to_string(res.status) + " for " +
                           std::string(uri));
  const auto md = res.headers.get("Memento-Datetime");
  if (!md) throw NotAMemento("'" + std::string(uri) + "' does not identify a memento");
  const auto when = Timestamp::parse_http(*md);
  if (!when) throw NotAMemento("unparseable Memento-Datetime '" + *md + "'");
  if (!is_ok(res.status))
    throw NotAMemento("archive answered " + std::to_string(res.status) + " for " +
                      std::string(uri));

  MementoRecord rec;
  rec.urim = std::string(uri);
  rec.final_urim = res.url.empty() ? rec.urim : res.url;
  rec.memento_datetime = *when;

  std::string links;
  for (const auto& v : res.headers.get_all("Link")) links += (links.empty() ? "" : ",") + v;
  if (!links.empty()) {
    try {
      for (const auto& e : parse_link_format(links)) {
        const std::string target = resolve_reference(rec.final_urim, e.uri);
        if (e.has_rel("original") && rec.uri_r.empty()) rec.uri_r = target;
        if (e.has_rel("timegate") && !rec.timegate_uri) rec.timegate_uri = target;
        if (e.has_rel("timemap") && !rec.timemap_uri) rec.timemap_uri = target;
      }
    } catch (const MalformedTimeMap&) {
      // A broken Link header only costs us the optional relations.
    }
  }
  if (rec.uri_r.empty()) {
    if (auto original = original_from_urim(rec.final_urim)) rec.uri_r = *original;
    else throw NotAMemento("memento lacks a rel=\"original\" link");
  }
  rec.archive_domain = registered_domain(parse_absolute_uri(rec.final_urim)->host);
  rec.content_augmented = std::make_shared<const std::string>(decode_to_utf8(res.body, res.charset()));
  return rec;
}

std::string strip_banner(std::string_view html_text, const std::vector<std::string>& markers) {
  std::string cleaned(html_text);
  // Wayback toolbar comments bracket the whole insert.
  static constexpr std::string_view kBegin = "<!-- BEGIN WAYBACK TOOLBAR INSERT -->";
  static constexpr std::string_view kEnd = "<!-- END WAYBACK TOOLBAR INSERT -->";
  for (auto b = cleaned.find(kBegin); b != std::string::npos; b = cleaned.find(kBegin, b)) {
    const auto e = cleaned.find(kEnd, b);
    if (e == std::string::npos) break;
    cleaned.erase(b, e + kEnd.size() - b);
  }
  if (markers.empty()) return cleaned;
  const auto doc = html::Document::parse(cleaned);
  return html::serialize(doc.root(), [&](const html::Node& n) {
    if (const auto* id = n.attr("id");
        id && std::find(markers.begin(), markers.end(), *id) != markers.end())
      return true;
    if (const auto* cls = n.attr("class")) {
      for (const auto& c : text::split(*cls, ' '))
        if (std::find(markers.begin(), markers.end(), c) != markers.end()) return true;
    }
    return false;
  });
}

MementoRecord load_memento(std::string_view uri, const Fetcher& fetcher,
                           const std::vector<ArchiveProfile>& profiles) {
  MementoRecord rec = detect_memento(uri, fetcher);
  rec.raw_urim = derive_raw_urim(rec.final_urim, profiles);
  if (rec.raw_urim) {
    try {
      const HttpResponse raw = http_get(fetcher, *rec.raw_urim);
      if (is_ok(raw.status))
        rec.content_raw = std::make_shared<const std::string>(decode_to_utf8(raw.body, raw.charset()));
    } catch (const Error&) {
      // Raw content is an optimisation; augmented content still works.
    }
  }
  if (!rec.content_raw) {
    const ArchiveProfile* p = match_profile(rec.final_urim, profiles);
    static const std::vector<std::string> kNone;
    rec.content_raw = std::make_shared<const std::string>(
        strip_banner(*rec.content_augmented, p ? p->banner_markers : kNone));
  }
  return rec;
}

std::optional<std::string> negotiate_datetime(std::string_view uri_r, Timestamp target,
                                              std::string_view timegate_base,
                                              const Fetcher& fetcher) {
  HttpRequest req;
  req.url = join_path(timegate_base, uri_r);
  req.headers.set("Accept-Datetime", target.to_http());
  for (int hop = 0; hop <= 10; ++hop) {
    const HttpResponse res = fetcher.fetch(req);
    if (res.status >= 300 && res.status < 400) {
      const auto location = res.headers.get("Location");
      if (!location) return std::nullopt;
      req.url = resolve_reference(req.url, *location);
      continue;
    }
    if (is_ok(res.status) && res.headers.has("Memento-Datetime")) return req.url;
    return std::nullopt;
  }
  return std::nullopt;
}

std::optional<std::string> timegate_base_of(const MementoRecord& record) {
  if (!record.timegate_uri) return std::nullopt;
  const std::string& tg = *record.timegate_uri;
  if (tg.size() > record.uri_r.size() &&
      tg.compare(tg.size() - record.uri_r.size(), record.uri_r.size(), record.uri_r) == 0)
    return tg.substr(0, tg.size() - record.uri_r.size());
  return std::nullopt;
}

bool is_memento(std::string_view uri, const Fetcher& fetcher) {
  try {
    const HttpResponse res = http_get(fetcher, std::string(uri));
    return res.status == 200 && res.headers.has("Memento-Datetime");
  } catch (const Error&) {
    return false;
  }
}

TimeMapStats parse_timemap(std::string_view body) {
  const auto entries = parse_link_format(body);
  if (entries.empty()) throw MalformedTimeMap("TimeMap contains no links");
  TimeMapStats stats;
  struct Capture {
    Timestamp when;
    std::string urim;
  };
  std::vector<Capture> captures;
  for (const auto& e : entries) {
    if (e.has_rel("original") && stats.uri_r.empty()) stats.uri_r = e.uri;
    if (e.has_rel("self") && stats.uri_t.empty()) stats.uri_t = e.uri;
    if (e.has_rel("memento")) {
      const auto it = e.params.find("datetime");
      if (it == e.params.end()) throw MalformedTimeMap("memento link without datetime: " + e.uri);
      const auto when = Timestamp::parse_http(it->second);
      if (!when) throw MalformedTimeMap("bad memento datetime '" + it->second + "'");
      captures.push_back({*when, e.uri});
    }
  }
  std::stable_sort(captures.begin(), captures.end(),
                   [](const Capture& a, const Capture& b) { return a.when < b.when; });
  stats.memento_count = captures.size();
  if (!captures.empty()) {
    stats.first_memento_datetime = captures.front().when;
    stats.first_urim = captures.front().urim;
    stats.last_memento_datetime = captures.back().when;
    stats.last_urim = captures.back().urim;
  }
  return stats;
}

std::string build_timetravel_uri(std::string_view uri_r, Timestamp memento_datetime,
                                 std::string_view aggregator_base) {
  std::string base(aggregator_base);
  while (!base.empty() && base.back() == '/') base.pop_back();
  return base + "/list/" + memento_datetime.to_14digit() + "Z/" + std::string(uri_r);
}

std::string decode_to_utf8(std::string_view bytes, const std::optional<std::string>& declared) {
  std::string charset = declared.value_or("");
  if (charset.empty()) {
    static const std::regex kMeta(R"(<meta[^>]*charset\s*=\s*["']?\s*([A-Za-z0-9_:.\-]+))",
                                  std::regex::icase);
    const std::string head(bytes.substr(0, 4096));
    std::smatch m;
    if (std::regex_search(head, m, kMeta)) charset = to_lower_ascii(m[1].str());
  }
  if (charset.empty() || charset == "utf-8" || charset == "utf8") {
    return text::from_code_points(text::to_code_points(bytes));
  }
  if (charset == "iso-8859-1" || charset == "latin1" || charset == "us-ascii" ||
      charset == "ascii")
    charset = "windows-1252";

  UErrorCode status = U_ZERO_ERROR;
  std::string out(bytes.size() * 4 + 16, '\0');
  const int32_t n = ucnv_convert("UTF-8", charset.c_str(), out.data(),
                                 static_cast<int32_t>(out.size()), bytes.data(),
                                 static_cast<int32_t>(bytes.size()), &status);
  if (U_FAILURE(status)) return text::from_code_points(text::to_code_points(bytes));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace mkit
