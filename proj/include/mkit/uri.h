#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace mkit {

// Components of an absolute hierarchical URI (RFC 3986). The query and
// fragment keep their raw, undecoded form.
struct Uri {
  std::string scheme;  // lowercased
  std::string userinfo;
  std::string host;  // lowercased
  std::string port;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  std::string str() const;
  // scheme://host[:port]
  std::string origin() const;
  // Path plus query: the request target sent on the wire.
  std::string target() const;
  int effective_port() const;
};

// Parses an absolute URI that has a scheme and a non-empty authority host.
// Rejects whitespace, control characters and malformed ports.
std::optional<Uri> parse_absolute_uri(std::string_view text);

inline bool is_absolute_uri(std::string_view text) {
  return parse_absolute_uri(text).has_value();
}

// RFC 3986 section 5.2 reference resolution. Returns `reference` unchanged
// when it already carries a scheme. Returns empty when base is not absolute.
std::string resolve_reference(std::string_view base, std::string_view reference);

// Registered (public-suffix + 1) domain of a host. Uses a bundled list of
// common multi-label public suffixes; IP literals are returned unchanged.
std::string registered_domain(std::string_view host);

std::string to_lower_ascii(std::string_view text);
std::string to_upper_ascii(std::string_view text);

}  // namespace mkit
