#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "mkit/http.h"
#include "mkit/memento.h"

namespace mkit {

enum class FaviconSource {
  LinkElement,
  WellKnownPath,
  NegotiatedMemento,
  LiveOriginal,
  ExternalService,
  None
};
std::string to_string(FaviconSource source);

struct FaviconResult {
  std::optional<std::string> uri;
  FaviconSource source = FaviconSource::None;
};

// Domain in, favicon URI out. The default resolver knows nothing.
using FaviconResolver = std::function<std::optional<std::string>(std::string_view domain)>;

// First LINK whose rel is icon, shortcut or "shortcut icon", resolved against base.
std::optional<std::string> find_link_favicon(std::string_view html, std::string_view base_uri);

// GET answers 200 with an image media type (or image bytes when the type is generic).
bool favicon_resolves(std::string_view uri, const Fetcher& fetcher);

// LINK on the archive home page, then <home>/favicon.ico, then the resolver.
FaviconResult discover_archive_favicon(std::string_view archive_home_uri, const Fetcher& fetcher,
                                       const FaviconResolver& fallback = {});

// LINK in the memento (negotiated when not already a memento), then a memento
// of <original>/favicon.ico, then the live favicon.ico, then the resolver.
FaviconResult discover_original_favicon(const MementoRecord& record, const Fetcher& fetcher,
                                        const FaviconResolver& fallback = {});

}  // namespace mkit
