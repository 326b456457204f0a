#include "mkit/http.h"

#include <httplib.h>

#include <algorithm>

#include "mkit/errors.h"
#include "mkit/text.h"
#include "mkit/uri.h"

namespace mkit {

std::optional<std::string> HttpHeaders::get(std::string_view name) const {
  for (const auto& [k, v] : entries_)
    if (text::iequals(k, name)) return v;
  return std::nullopt;
}

std::vector<std::string> HttpHeaders::get_all(std::string_view name) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (text::iequals(k, name)) out.push_back(v);
  return out;
}

void HttpHeaders::set(std::string name, std::string value) {
  remove(name);
  entries_.emplace_back(std::move(name), std::move(value));
}

void HttpHeaders::add(std::string name, std::string value) {
  entries_.emplace_back(std::move(name), std::move(value));
}

void HttpHeaders::remove(std::string_view name) {
  std::erase_if(entries_, [&](const auto& e) { return text::iequals(e.first, name); });
}

std::string HttpResponse::media_type() const {
  const auto ct = headers.get("Content-Type");
  if (!ct) return {};
  const auto semi = ct->find(';');
  return to_lower_ascii(text::trim(std::string_view(*ct).substr(0, semi)));
}

std::optional<std::string> HttpResponse::charset() const {
  const auto ct = headers.get("Content-Type");
  if (!ct) return std::nullopt;
  for (const auto& param : text::split(*ct, ';')) {
    const auto eq = param.find('=');
    if (eq == std::string::npos) continue;
    if (!text::iequals(text::trim(std::string_view(param).substr(0, eq)), "charset")) continue;
    std::string value(text::trim(std::string_view(param).substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (!value.empty()) return to_lower_ascii(value);
  }
  return std::nullopt;
}

HttpResponse fetch_following(const Fetcher& fetcher, HttpRequest request, int max_redirects) {
  for (int hop = 0;; ++hop) {
    HttpResponse res = fetcher.fetch(request);
    const bool redirect = res.status == 301 || res.status == 302 || res.status == 303 ||
                          res.status == 307 || res.status == 308;
    const auto location = res.headers.get("Location");
    if (!redirect || !location || hop >= max_redirects) return res;
    request.url = resolve_reference(request.url, *location);
    if (res.status == 303) request.method = "GET";
  }
}

HttplibFetcher::HttplibFetcher(FetcherOptions options) : options_(std::move(options)) {}

HttpResponse HttplibFetcher::fetch(const HttpRequest& request) const {
  const auto uri = parse_absolute_uri(request.url);
  if (!uri || (uri->scheme != "http" && uri->scheme != "https"))
    throw InvalidUri("cannot fetch '" + request.url + "'");

  const std::string authority = uri->port.empty() ? uri->host : uri->host + ":" + uri->port;
  std::string origin = uri->origin();
  bool overridden = false;
  for (const auto& key : {authority, uri->host}) {
    if (auto it = options_.host_overrides.find(key); it != options_.host_overrides.end()) {
      origin = it->second;
      overridden = true;
      break;
    }
  }
  if (!overridden && !options_.allow_unmapped_hosts)
    throw ConnectionFailed("no route to " + authority + " (unmapped host)");

  httplib::Client client(origin);
  if (!client.is_valid()) throw ConnectionFailed("cannot create client for " + origin);
  const auto ms = options_.timeout.count();
  const time_t secs = static_cast<time_t>(ms / 1000);
  const time_t usecs = static_cast<time_t>((ms % 1000) * 1000);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_follow_location(false);
  client.set_url_encode(false);
  client.set_keep_alive(false);
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
  client.enable_server_certificate_verification(true);
#endif

  httplib::Request req;
  req.method = request.method;
  req.path = uri->target();
  for (const auto& [k, v] : request.headers.entries()) req.headers.emplace(k, v);
  if (!request.headers.has("User-Agent")) req.headers.emplace("User-Agent", options_.user_agent);
  if (overridden && !request.headers.has("Host")) req.headers.emplace("Host", authority);

  const auto started = std::chrono::steady_clock::now();
  auto result = client.send(req);
  if (!result) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const auto err = result.error();
    const bool slow = elapsed >= options_.timeout * 9 / 10;
    if (err == httplib::Error::ConnectionTimeout ||
        ((err == httplib::Error::Read || err == httplib::Error::Write) && slow))
      throw FetchTimeout("timed out fetching " + request.url);
    throw ConnectionFailed("connection to " + authority + " failed: " + httplib::to_string(err));
  }

  HttpResponse out;
  out.status = result->status;
  out.body = std::move(result->body);
  out.url = request.url;
  for (const auto& [k, v] : result->headers) out.headers.add(k, v);
  return out;
}

}  // namespace mkit
