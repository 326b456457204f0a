#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mkit/datetime.h"
#include "mkit/http.h"

namespace mkit::mock {

// Marker carried by every augmented HTML memento and never by a raw one.
inline constexpr std::string_view kBannerMarker = "wm-banner";

struct StaticFile {
  int status = 200;
  std::string content_type = "text/html; charset=utf-8";
  std::string body;
};

struct ArchiveSettings {
  std::string scheme = "http";
  // Path before the datetime; "{collection}" is replaced per capture.
  std::string prefix = "/web/";
  std::string timegate_prefix = "/timegate/";
  std::string timemap_prefix = "/timemap/link/";
};

struct HostEntry {
  std::optional<ArchiveSettings> archive;
  std::map<std::string, StaticFile> files;  // exact request target -> file
};

struct Capture {
  std::string host;
  std::string uri_r;
  Timestamp datetime;
  std::string collection;
  std::string content_type = "text/html; charset=utf-8";
  std::string body;  // raw bytes as originally captured
};

struct Fault {
  std::string host;         // empty matches every host
  std::string path_prefix;  // prefix of the request target
  int delay_ms = 0;
  bool reset = false;
  std::optional<int> status;
};

// JSON manifest. See README for the schema.
struct Manifest {
  std::map<std::string, HostEntry> hosts;
  std::vector<Capture> captures;
  std::vector<Fault> faults;
  // Serves requests whose Host header names no known host.
  std::string default_host;

  static Manifest parse(std::string_view json, const std::filesystem::path& base_dir);
  static Manifest load(const std::filesystem::path& file);
};

struct Reply {
  HttpResponse response;
  int delay_ms = 0;
  bool reset = false;
};

class Archive {
 public:
  explicit Archive(Manifest manifest);

  Reply handle(std::string_view host, const HttpRequest& request, std::string_view target) const;

  // Absolute URI-M of a capture, with an optional modifier such as "im_".
  std::string urim(const Capture& capture, std::string_view modifier = {}) const;
  std::string timegate_uri(std::string_view host, std::string_view uri_r) const;
  std::string timemap_uri(std::string_view host, std::string_view uri_r) const;
  const Manifest& manifest() const { return manifest_; }

  // Augmented body: sub-resource URIs rewritten into the archive, banner added.
  std::string augment(const Capture& capture, bool with_banner) const;

 private:
  const HostEntry* host_entry(std::string_view host, std::string* resolved) const;
  std::vector<const Capture*> captures_of(std::string_view host, std::string_view uri_r) const;
  HttpResponse memento_response(const Capture& c, std::string_view modifier) const;
  HttpResponse serve_archive(const std::string& host, const ArchiveSettings& a, const HttpRequest& request,
                             std::string_view target) const;

  Manifest manifest_;
};

// Fetcher that answers from an Archive without sockets. Delays at or beyond
// `timeout` raise FetchTimeout; resets raise ConnectionFailed.
class InProcessFetcher final : public Fetcher {
 public:
  InProcessFetcher(std::shared_ptr<const Archive> archive, std::chrono::milliseconds timeout = std::chrono::seconds(30))
      : archive_(std::move(archive)), timeout_(timeout) {}
  HttpResponse fetch(const HttpRequest& request) const override;

 private:
  std::shared_ptr<const Archive> archive_;
  std::chrono::milliseconds timeout_;
};

// HTTP front end. Routes on the Host header.
class Server {
 public:
  explicit Server(std::shared_ptr<const Archive> archive);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds (port 0 picks a free one) and serves on a background thread.
  // Throws ConfigError when the address is unavailable.
  int start(const std::string& address = "127.0.0.1", int port = 0);
  // Blocks serving on the calling thread.
  void listen(const std::string& address, int port);
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = 0;
};

// host -> "http://127.0.0.1:<port>" for every host in the manifest.
std::map<std::string, std::string> host_overrides(const Manifest& manifest, int port);

}  // namespace mkit::mock
