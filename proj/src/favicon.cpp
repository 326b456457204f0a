#include "mkit/favicon.h"

#include "mkit/errors.h"
#include "mkit/html.h"
#include "mkit/image.h"
#include "mkit/text.h"
#include "mkit/uri.h"

namespace mkit {

std::string to_string(FaviconSource source) {
  switch (source) {
    case FaviconSource::LinkElement:
      return "link_element";
    case FaviconSource::WellKnownPath:
      return "well_known_path";
    case FaviconSource::NegotiatedMemento:
      return "negotiated_memento";
    case FaviconSource::LiveOriginal:
      return "live_original";
    case FaviconSource::ExternalService:
      return "external_service";
    case FaviconSource::None:
      return "none";
  }
  return "none";
}

std::optional<std::string> find_link_favicon(std::string_view page, std::string_view base_uri) {
  const auto doc = html::Document::parse(page);
  for (const html::Node* link : doc.elements_by_tag("link")) {
    const std::string* rel = link->attr("rel");
    const std::string* href = link->attr("href");
    if (!rel || !href || text::trim(*href).empty()) continue;
    bool icon = false;
    for (const auto& token : text::split(to_lower_ascii(*rel), ' '))
      if (token == "icon" || token == "shortcut") icon = true;
    if (!icon) continue;
    std::string resolved = resolve_reference(base_uri, text::trim(*href));
    if (!resolved.empty()) return resolved;
  }
  return std::nullopt;
}

bool favicon_resolves(std::string_view uri, const Fetcher& fetcher) {
  try {
    const auto res = http_get(fetcher, std::string(uri));
    if (res.status != 200 || res.body.empty()) return false;
    const auto type = res.media_type();
    if (type.rfind("image/", 0) == 0) return true;
    if (type.empty() || type == "application/octet-stream") return !sniff_image_type(res.body).empty();
    return false;
  } catch (const Error&) {
    return false;
  }
}

namespace {

FaviconResult external(const FaviconResolver& fallback, std::string_view domain) {
  if (fallback)
    if (auto uri = fallback(domain)) return {std::move(uri), FaviconSource::ExternalService};
  return {};
}

std::string site_root(std::string_view uri) {
  const auto u = parse_absolute_uri(uri);
  return u ? u->origin() + "/" : std::string{};
}

}  // namespace

FaviconResult discover_archive_favicon(std::string_view archive_home_uri, const Fetcher& fetcher,
                                       const FaviconResolver& fallback) {
  const auto home = parse_absolute_uri(archive_home_uri);
  if (!home) return {};
  try {
    const auto res = http_get(fetcher, std::string(archive_home_uri));
    if (res.status == 200)
      if (auto link = find_link_favicon(res.body, res.url.empty() ? archive_home_uri : res.url);
          link && favicon_resolves(*link, fetcher))
        return {std::move(link), FaviconSource::LinkElement};
  } catch (const Error&) {
  }
  const std::string well_known = home->origin() + "/favicon.ico";
  if (favicon_resolves(well_known, fetcher)) return {well_known, FaviconSource::WellKnownPath};
  return external(fallback, registered_domain(home->host));
}

FaviconResult discover_original_favicon(const MementoRecord& record, const Fetcher& fetcher,
                                        const FaviconResolver& fallback) {
  const auto gate = timegate_base_of(record);
  auto negotiate = [&](const std::string& uri_r) -> std::optional<std::string> {
    if (!gate) return std::nullopt;
    try {
      auto urim = negotiate_datetime(uri_r, record.memento_datetime, *gate, fetcher);
      if (urim && favicon_resolves(*urim, fetcher)) return urim;
    } catch (const Error&) {
    }
    return std::nullopt;
  };

  const std::string base = record.final_urim.empty() ? record.urim : record.final_urim;
  if (record.content_augmented) {
    if (auto link = find_link_favicon(*record.content_augmented, base)) {
      bool memento = false;
      try {
        memento = is_memento(*link, fetcher);
      } catch (const Error&) {
      }
      if (memento && favicon_resolves(*link, fetcher)) return {std::move(link), FaviconSource::LinkElement};
      if (!memento) {
        const std::string original = original_from_urim(*link).value_or(*link);
        if (auto urim = negotiate(original)) return {std::move(urim), FaviconSource::NegotiatedMemento};
      }
    }
  }

  const std::string root = site_root(record.uri_r);
  if (root.empty()) return external(fallback, {});
  const std::string ico = root + "favicon.ico";
  if (auto urim = negotiate(ico)) return {std::move(urim), FaviconSource::NegotiatedMemento};
  if (favicon_resolves(ico, fetcher)) return {ico, FaviconSource::LiveOriginal};
  return external(fallback, parse_absolute_uri(record.uri_r)->host);
}

}  // namespace mkit
