// Renderer command stand-in: writes a deterministic PNG for the URL to stdout.
#include <CLI11.hpp>

#include <iostream>

#include "mkit/image.h"
#include "mkit/products.h"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic screenshot stand-in for the thumbnail renderer"};
  std::string url;
  int width = 1024;
  int height = 768;
  int timeout = 60;
  app.add_option("--url", url, "Page to render")->required();
  app.add_option("--width", width)->check(CLI::Range(1, 5120));
  app.add_option("--height", height)->check(CLI::Range(1, 2880));
  app.add_option("--timeout", timeout, "Ignored");
  CLI11_PARSE(app, argc, argv);

  const std::string png = mkit::encode_png(mkit::test_pattern(url, width, height));
  std::cout.write(png.data(), static_cast<std::streamsize>(png.size()));
  return std::cout ? 0 : 1;
}
