#include "mkit/uri.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

namespace mkit {

namespace {

bool is_scheme_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

bool has_forbidden_chars(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u <= 0x20 || u == 0x7f || c == '<' || c == '>' || c == '"' || c == '\\' ||
           c == '^' || c == '`' || c == '{' || c == '|' || c == '}';
  });
}

bool valid_host(std::string_view host) {
  if (host.empty()) return false;
  if (host.front() == '[') return host.back() == ']' && host.size() > 2;
  return std::all_of(host.begin(), host.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '-' || c == '.' || c == '_' || c == '%' || c == '~' ||
           u >= 0x80;
  }) && host.front() != '.' && host.find("..") == std::string_view::npos;
}

std::string remove_dot_segments(std::string_view input) {
  std::string in(input);
  std::string out;
  while (!in.empty()) {
    if (in.rfind("../", 0) == 0) {
      in.erase(0, 3);
    } else if (in.rfind("./", 0) == 0) {
      in.erase(0, 2);
    } else if (in.rfind("/./", 0) == 0) {
      in.replace(0, 3, "/");
    } else if (in == "/.") {
      in = "/";
    } else if (in.rfind("/../", 0) == 0 || in == "/..") {
      in = in == "/.." ? std::string("/") : in.substr(3);
      const auto slash = out.rfind('/');
      out.erase(slash == std::string::npos ? 0 : slash);
    } else if (in == "." || in == "..") {
      in.clear();
    } else {
      std::size_t next = in.find('/', in.front() == '/' ? 1 : 0);
      if (next == std::string::npos) next = in.size();
      out += in.substr(0, next);
      in.erase(0, next);
    }
  }
  return out;
}

// Parts of a (possibly relative) reference.
struct RefParts {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

RefParts split_reference(std::string_view ref) {
  RefParts parts;
  std::size_t pos = 0;
  if (const auto colon = ref.find(':'); colon != std::string_view::npos && colon > 0) {
    const auto first_delim = ref.find_first_of("/?#");
    if ((first_delim == std::string_view::npos || colon < first_delim) &&
        std::isalpha(static_cast<unsigned char>(ref[0])) &&
        std::all_of(ref.begin(), ref.begin() + static_cast<std::ptrdiff_t>(colon),
                    is_scheme_char)) {
      parts.scheme = to_lower_ascii(ref.substr(0, colon));
      pos = colon + 1;
    }
  }
  if (ref.substr(pos, 2) == "//") {
    const auto end = ref.find_first_of("/?#", pos + 2);
    parts.authority = std::string(ref.substr(pos + 2, end == std::string_view::npos
                                                          ? std::string_view::npos
                                                          : end - pos - 2));
    pos = end == std::string_view::npos ? ref.size() : end;
  }
  auto end = ref.find_first_of("?#", pos);
  parts.path = std::string(ref.substr(pos, end == std::string_view::npos ? std::string_view::npos
                                                                         : end - pos));
  pos = end == std::string_view::npos ? ref.size() : end;
  if (pos < ref.size() && ref[pos] == '?') {
    end = ref.find('#', pos);
    parts.query = std::string(
        ref.substr(pos + 1, end == std::string_view::npos ? std::string_view::npos : end - pos - 1));
    pos = end == std::string_view::npos ? ref.size() : end;
  }
  if (pos < ref.size() && ref[pos] == '#') parts.fragment = std::string(ref.substr(pos + 1));
  return parts;
}

std::string compose(const RefParts& p) {
  std::string out;
  if (p.scheme) out += *p.scheme + ":";
  if (p.authority) out += "//" + *p.authority;
  out += p.path;
  if (p.query) out += "?" + *p.query;
  if (p.fragment) out += "#" + *p.fragment;
  return out;
}

// Second-level labels that act as public suffixes under these ccTLDs.
constexpr std::array<std::string_view, 13> kCcSecondLevel = {
    "co", "com", "org", "net", "ac", "gov", "edu", "ltd", "plc", "sch", "nhs", "or", "ne"};
constexpr std::array<std::string_view, 14> kCcWithSecondLevel = {
    "uk", "au", "nz", "jp", "br", "za", "in", "kr", "il", "tr", "mx", "ar", "sg", "hk"};

}  // namespace

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string to_upper_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string Uri::origin() const {
  std::string out = scheme + "://" + host;
  if (!port.empty()) out += ":" + port;
  return out;
}

std::string Uri::target() const {
  std::string out = path.empty() ? "/" : path;
  if (query) out += "?" + *query;
  return out;
}

std::string Uri::str() const {
  std::string out = scheme + "://";
  if (!userinfo.empty()) out += userinfo + "@";
  out += host;
  if (!port.empty()) out += ":" + port;
  out += path;
  if (query) out += "?" + *query;
  if (fragment) out += "#" + *fragment;
  return out;
}

int Uri::effective_port() const {
  if (!port.empty()) return std::stoi(port);
  return scheme == "https" ? 443 : 80;
}

std::optional<Uri> parse_absolute_uri(std::string_view text) {
  if (text.empty() || text.size() > 8192 || has_forbidden_chars(text)) return std::nullopt;
  RefParts parts = split_reference(text);
  if (!parts.scheme || !parts.authority) return std::nullopt;
  Uri uri;
  uri.scheme = *parts.scheme;
  std::string_view authority = *parts.authority;
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    uri.userinfo = std::string(authority.substr(0, at));
    authority.remove_prefix(at + 1);
  }
  std::string_view host = authority;
  const auto bracket = authority.rfind(']');
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && (bracket == std::string_view::npos || colon > bracket)) {
    const std::string_view port = authority.substr(colon + 1);
    if (port.size() > 5 || !std::all_of(port.begin(), port.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c));
        }))
      return std::nullopt;
    if (!port.empty() && std::stoi(std::string(port)) > 65535) return std::nullopt;
    uri.port = std::string(port);
    host = authority.substr(0, colon);
  }
  if (!valid_host(host)) return std::nullopt;
  uri.host = to_lower_ascii(host);
  uri.path = parts.path;
  uri.query = parts.query;
  uri.fragment = parts.fragment;
  return uri;
}

std::string resolve_reference(std::string_view base, std::string_view reference) {
  const RefParts b = split_reference(base);
  if (!b.scheme) return {};
  RefParts r = split_reference(reference);
  RefParts t;
  if (r.scheme) {
    t = r;
    t.path = remove_dot_segments(r.path);
  } else {
    if (r.authority) {
      t.authority = r.authority;
      t.path = remove_dot_segments(r.path);
      t.query = r.query;
    } else {
      if (r.path.empty()) {
        t.path = b.path;
        t.query = r.query ? r.query : b.query;
      } else {
        if (r.path.front() == '/') {
          t.path = remove_dot_segments(r.path);
        } else {
          std::string merged;
          if (b.authority && b.path.empty()) {
            merged = "/" + r.path;
          } else {
            const auto slash = b.path.rfind('/');
            merged = (slash == std::string::npos ? std::string() : b.path.substr(0, slash + 1)) +
                     r.path;
          }
          t.path = remove_dot_segments(merged);
        }
        t.query = r.query;
      }
      t.authority = b.authority;
    }
    t.scheme = b.scheme;
  }
  t.fragment = r.fragment;
  return compose(t);
}

std::string registered_domain(std::string_view host_in) {
  std::string host = to_lower_ascii(host_in);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty() || host.front() == '[' ||
      std::all_of(host.begin(), host.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; }))
    return host;
  std::vector<std::string_view> labels;
  std::string_view rest = host;
  while (true) {
    const auto dot = rest.find('.');
    labels.push_back(rest.substr(0, dot));
    if (dot == std::string_view::npos) break;
    rest.remove_prefix(dot + 1);
  }
  if (labels.size() <= 2) return host;
  std::size_t suffix_labels = 1;
  const std::string_view tld = labels.back();
  const std::string_view sld = labels[labels.size() - 2];
  if (std::find(kCcWithSecondLevel.begin(), kCcWithSecondLevel.end(), tld) !=
          kCcWithSecondLevel.end() &&
      std::find(kCcSecondLevel.begin(), kCcSecondLevel.end(), sld) != kCcSecondLevel.end())
    suffix_labels = 2;
  const std::size_t keep = std::min(labels.size(), suffix_labels + 1);
  std::string out;
  for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out += '.';
    out += labels[i];
  }
  return out;
}

}  // namespace mkit
