#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mkit {

// Ordered, case-insensitive header list.
class HttpHeaders {
 public:
  HttpHeaders() = default;
  HttpHeaders(std::initializer_list<std::pair<std::string, std::string>> init)
      : entries_(init) {}

  std::optional<std::string> get(std::string_view name) const;
  std::vector<std::string> get_all(std::string_view name) const;
  bool has(std::string_view name) const { return get(name).has_value(); }
  void set(std::string name, std::string value);
  void add(std::string name, std::string value);
  void remove(std::string_view name);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct HttpRequest {
  std::string method = "GET";
  std::string url;
  HttpHeaders headers;
};

struct HttpResponse {
  int status = 0;
  HttpHeaders headers;
  std::string body;
  std::string url;  // URL that produced this response (after redirects)

  // Lowercased media type without parameters, e.g. "image/png".
  std::string media_type() const;
  std::optional<std::string> charset() const;
};

// Every outbound request goes through one of these. Implementations do not
// follow redirects and must be safe to call concurrently. Network failures
// surface as ConnectionFailed or FetchTimeout; a malformed URL as InvalidUri.
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual HttpResponse fetch(const HttpRequest& request) const = 0;
};

// Follows 3xx Location headers up to `max_redirects` hops.
HttpResponse fetch_following(const Fetcher& fetcher, HttpRequest request, int max_redirects = 10);

inline HttpResponse http_get(const Fetcher& fetcher, std::string url, bool follow = true) {
  HttpRequest req;
  req.url = std::move(url);
  return follow ? fetch_following(fetcher, std::move(req)) : fetcher.fetch(req);
}

struct FetcherOptions {
  std::chrono::milliseconds timeout{30000};
  std::string user_agent = "mementokit/1.0 (+archive-aware surrogate generator)";
  // host or host:port -> replacement origin such as "http://127.0.0.1:8080".
  // The original Host header is preserved, like curl --resolve.
  std::map<std::string, std::string> host_overrides;
  // When false, hosts without an override fail with ConnectionFailed.
  bool allow_unmapped_hosts = true;
};

class HttplibFetcher final : public Fetcher {
 public:
  explicit HttplibFetcher(FetcherOptions options = {});
  HttpResponse fetch(const HttpRequest& request) const override;
  const FetcherOptions& options() const { return options_; }

 private:
  FetcherOptions options_;
};

class FunctionFetcher final : public Fetcher {
 public:
  using Handler = std::function<HttpResponse(const HttpRequest&)>;
  explicit FunctionFetcher(Handler handler) : handler_(std::move(handler)) {}
  HttpResponse fetch(const HttpRequest& request) const override { return handler_(request); }

 private:
  Handler handler_;
};

}  // namespace mkit
