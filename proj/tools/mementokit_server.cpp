// The memento and product API over HTTP.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mkit/errors.h"
#include "mkit/memento.h"
#include "mkit/mock_archive.h"
#include "mkit/products.h"
#include "mkit/service.h"
#include "signals.h"

namespace {

std::vector<std::string> split_command(const std::string& cmd) {
  std::istringstream in(cmd);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const sigset_t stop = block_stop_signals();
  CLI::App app{"Surrogate service for archived web pages"};
  std::string bind = "127.0.0.1";
  int port = 5550;
  std::string port_file;
  std::size_t cache_size = 256;
  int cache_ttl = 600;
  int fetch_timeout = 30;
  int product_timeout = 300;
  std::string profiles;
  std::string renderer = "stub";
  std::string timetravel = "http://timetravel.mementoweb.org";
  std::string service_base;
  std::string static_dir;
  std::string manifest;
  std::string archive_origin;

  app.add_option("--bind", bind, "Address to listen on");
  app.add_option("--port", port, "Port; 0 picks a free one");
  app.add_option("--port-file", port_file, "Write the bound port here once listening");
  app.add_option("--cache-size", cache_size, "Analyses kept in memory")->check(CLI::PositiveNumber);
  app.add_option("--cache-ttl", cache_ttl, "Seconds an analysis stays cached")->check(CLI::NonNegativeNumber);
  app.add_option("--fetch-timeout", fetch_timeout, "Seconds per outbound request")->check(CLI::PositiveNumber);
  app.add_option("--product-timeout", product_timeout, "Seconds per reel or word cloud")->check(CLI::PositiveNumber);
  app.add_option("--profiles", profiles, "Archive profiles (YAML)")->check(CLI::ExistingFile);
  app.add_option("--renderer", renderer, "Screenshot command, 'stub' or 'none'");
  app.add_option("--timetravel", timetravel, "Memento aggregator base URI");
  app.add_option("--service-base", service_base, "Public base URI (default http://<bind>:<port>)");
  app.add_option("--static-dir", static_dir, "Files served under /")->check(CLI::ExistingDirectory);
  app.add_option("--manifest", manifest, "Route the hosts of this fixture manifest to --archive-origin")
      ->check(CLI::ExistingFile);
  app.add_option("--archive-origin", archive_origin, "Origin of a running mock archive, e.g. http://127.0.0.1:8080");
  CLI11_PARSE(app, argc, argv);
  if (!manifest.empty() && archive_origin.empty()) {
    std::cerr << "mementokit-server: --manifest needs --archive-origin\n";
    return 2;
  }

  try {
    mkit::FetcherOptions fo;
    fo.timeout = std::chrono::seconds(fetch_timeout);
    if (!manifest.empty()) {
      const auto m = mkit::mock::Manifest::load(manifest);
      for (const auto& [host, entry] : m.hosts) fo.host_overrides[host] = archive_origin;
      fo.allow_unmapped_hosts = false;
    }
    mkit::service::ServiceConfig config;
    config.fetcher = std::make_shared<mkit::HttplibFetcher>(fo);
    config.cache_capacity = cache_size;
    config.cache_ttl = std::chrono::seconds(cache_ttl);
    config.product_timeout = std::chrono::seconds(product_timeout);
    if (!static_dir.empty()) config.static_dir = static_dir;
    if (renderer == "stub")
      config.renderer = std::make_shared<mkit::StubRenderer>();
    else if (renderer != "none")
      config.renderer = std::make_shared<mkit::CommandRenderer>(split_command(renderer));

    auto start = [&](const std::string& base) {
      config.service_base = base;
      auto analysis = std::make_shared<mkit::AnalysisConfig>();
      if (!profiles.empty()) analysis->profiles = mkit::load_archive_profiles(profiles);
      analysis->timetravel_base = timetravel;
      analysis->default_image_uri = base + mkit::kDefaultImagePath;
      config.analysis = analysis;
      return std::make_shared<const mkit::service::Service>(config);
    };

    // With --port 0 the public base is only known after binding, so the
    // service is rebuilt once for the chosen port.
    const std::string base = service_base.empty() ? "http://" + bind + ":" + std::to_string(port) : service_base;
    auto server = std::make_unique<mkit::service::Server>(start(base));
    int bound = server->start(bind, port);
    if (port == 0 && service_base.empty()) {
      server->stop();
      server = std::make_unique<mkit::service::Server>(start("http://" + bind + ":" + std::to_string(bound)));
      bound = server->start(bind, bound);
    }
    std::cout << "mementokit-server listening on http://" << bind << ":" << bound << std::endl;
    if (!port_file.empty()) {
      const std::string tmp = port_file + ".tmp";
      std::ofstream(tmp) << bound << "\n";
      std::rename(tmp.c_str(), port_file.c_str());
    }
    wait_for_stop(stop);
    server->stop();
  } catch (const std::exception& e) {
    std::cerr << "mementokit-server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
