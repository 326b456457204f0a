// Serves a fixture manifest as a set of web archives and live sites.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "mkit/errors.h"
#include "mkit/mock_archive.h"
#include "signals.h"

int main(int argc, char** argv) {
  const sigset_t stop = block_stop_signals();
  CLI::App app{"Replay fixture captures over HTTP, routing on the Host header"};
  std::string manifest;
  std::string bind = "127.0.0.1";
  int port = 0;
  std::string port_file;
  app.add_option("--manifest", manifest, "Fixture manifest (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--bind", bind, "Address to listen on");
  app.add_option("--port", port, "Port; 0 picks a free one");
  app.add_option("--port-file", port_file, "Write the bound port here once listening");
  CLI11_PARSE(app, argc, argv);

  try {
    auto archive = std::make_shared<const mkit::mock::Archive>(mkit::mock::Manifest::load(manifest));
    mkit::mock::Server server(archive);
    const int bound = server.start(bind, port);
    std::cout << "mock archive listening on http://" << bind << ":" << bound << std::endl;
    if (!port_file.empty()) {
      const std::string tmp = port_file + ".tmp";
      std::ofstream(tmp) << bound << "\n";
      std::rename(tmp.c_str(), port_file.c_str());
    }
    wait_for_stop(stop);
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "mock-archive: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
