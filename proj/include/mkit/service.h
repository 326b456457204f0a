#pragma once

#include <chrono>
#include <exception>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "mkit/analysis.h"
#include "mkit/http.h"
#include "mkit/products.h"

namespace mkit::service {

struct ServiceConfig {
  std::shared_ptr<const Fetcher> fetcher;
  std::shared_ptr<const AnalysisConfig> analysis;
  std::shared_ptr<const Renderer> renderer;  // thumbnails answer 500 without one
  // Public base URI of this service; used for the card script and default image.
  std::string service_base = "http://localhost:5550";
  std::size_t cache_capacity = 256;
  std::chrono::seconds cache_ttl{600};
  // Upper bound for imagereel, docreel and word cloud builds.
  std::chrono::seconds product_timeout{300};
  // Served under / when set (the card builder UI).
  std::optional<std::filesystem::path> static_dir;
};

// Status code for an exception escaping an endpoint.
int status_for(const std::exception& e);

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  HttpHeaders headers;
  std::string body;
};

// LRU with expiry of per-URI-M analyses. Only analyses whose memento loaded
// are kept.
class AnalysisCache {
 public:
  AnalysisCache(std::size_t capacity, std::chrono::seconds ttl);
  ~AnalysisCache();
  // Returns the cached analysis or builds one; build failures propagate.
  std::shared_ptr<MementoAnalysis> get(const std::string& urim, const std::shared_ptr<const Fetcher>& fetcher,
                                       const std::shared_ptr<const AnalysisConfig>& config);
  std::size_t size() const;
  std::size_t loads() const;  // analyses built, hits excluded

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class Service {
 public:
  explicit Service(ServiceConfig config);

  // `target` is the raw request target: everything after the endpoint
  // prefix is taken verbatim as the URI-M.
  Response handle(std::string_view method, std::string_view target, const HttpHeaders& headers) const;

  const ServiceConfig& config() const { return config_; }
  const AnalysisCache& cache() const { return *cache_; }

 private:
  Response memento_endpoint(std::string_view endpoint, const std::string& urim, const HttpHeaders& headers) const;
  Response product_endpoint(std::string_view endpoint, const std::string& urim, const HttpHeaders& headers) const;
  Response static_file(std::string_view path) const;

  ServiceConfig config_;
  std::shared_ptr<AnalysisCache> cache_;
};

// HTTP/1.1 front end.
class Server {
 public:
  explicit Server(std::shared_ptr<const Service> service);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds (port 0 picks a free one) and serves on a background thread.
  int start(const std::string& address = "127.0.0.1", int port = 0);
  void listen(const std::string& address, int port);
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace mkit::service
