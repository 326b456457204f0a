#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <functional>

#include "mkit/draw.h"
#include "mkit/errors.h"
#include "mkit/products.h"

extern char** environ;

namespace mkit {

namespace {

struct Pipe {
  int fd[2] = {-1, -1};
  ~Pipe() {
    for (int f : fd)
      if (f >= 0) close(f);
  }
};

}  // namespace

std::string CommandRenderer::render(const RenderRequest& request) const {
  if (argv_.empty()) throw RendererUnavailable("no renderer command configured");
  std::vector<std::string> args = argv_;
  args.insert(args.end(), {"--url", request.uri, "--width", std::to_string(request.viewport_width), "--height",
                           std::to_string(request.viewport_height), "--timeout",
                           std::to_string(request.timeout.count())});
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  Pipe out;
  if (pipe(out.fd) != 0) throw RendererUnavailable(std::string("pipe: ") + std::strerror(errno));
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, out.fd[0]);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw RendererUnavailable("cannot start renderer '" + args[0] + "': " + std::strerror(rc));
  close(out.fd[1]);
  out.fd[1] = -1;

  const auto deadline = std::chrono::steady_clock::now() + request.timeout;
  std::string png;
  char buf[65536];
  bool timed_out = false;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{out.fd[0], POLLIN, 0};
    const int r = poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) continue;
    const ssize_t n = read(out.fd[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    png.append(buf, static_cast<std::size_t>(n));
  }
  if (timed_out) kill(pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out)
    throw RenderTimeout("renderer exceeded " + std::to_string(request.timeout.count()) + " s for " + request.uri);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw RendererUnavailable("renderer failed for " + request.uri + " (status " +
                              std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) + ")");
  if (sniff_image_type(png) != "image/png") throw RendererUnavailable("renderer did not produce a PNG");
  return png;
}

RgbImage test_pattern(std::string_view uri, int width, int height) {
  const std::size_t h = std::hash<std::string_view>{}(uri);
  const Rgb base{static_cast<std::uint8_t>(64 + (h & 0x7f)), static_cast<std::uint8_t>(64 + ((h >> 8) & 0x7f)),
                 static_cast<std::uint8_t>(64 + ((h >> 16) & 0x7f))};
  RgbImage img(width, height, {255, 255, 255});
  // Eight vertical bars, a header band and the URI.
  for (int i = 0; i < 8; ++i) {
    const Rgb c{static_cast<std::uint8_t>(base[0] * (i + 1) / 8), static_cast<std::uint8_t>(base[1] * (8 - i) / 8),
                static_cast<std::uint8_t>(base[2])};
    draw::fill_rect(img, i * width / 8, height / 6, width / 8 + 1, height * 5 / 6, c);
  }
  draw::fill_rect(img, 0, 0, width, height / 6, {20, 20, 20});
  const double scale = std::max(0.3, height / 1200.0);
  draw::draw_text(img, draw::ascii_fold(uri), 8, height / 12 + 6, scale, {240, 240, 240}, 1);
  return img;
}

std::string StubRenderer::render(const RenderRequest& request) const {
  if (request.viewport_width <= 0 || request.viewport_height <= 0) throw RendererUnavailable("empty viewport");
  return encode_png(test_pattern(request.uri, request.viewport_width, request.viewport_height));
}

std::string render_thumbnail(MementoAnalysis& analysis, PreferenceSet& prefs, const Renderer& renderer) {
  const MementoRecord& rec = analysis.record();
  RenderRequest req;
  req.uri = rec.urim;
  req.viewport_width = static_cast<int>(prefs.get_int("viewport_width"));
  req.viewport_height = static_cast<int>(prefs.get_int("viewport_height"));
  req.timeout = std::chrono::seconds(prefs.get_int("timeout"));
  if (prefs.get_flag("remove_banner")) {
    if (auto banner_free = derive_banner_free_urim(rec.urim, analysis.config().profiles))
      req.uri = *banner_free;
    else
      prefs.set_applied("remove_banner", "no");
  }
  const std::string shot = renderer.render(req);
  RgbImage img;
  try {
    img = decode_image(shot);
  } catch (const UndecodableImage&) {
    throw RendererUnavailable("renderer output is not an image");
  }
  return encode_png(cover_image(img, static_cast<int>(prefs.get_int("thumbnail_width")),
                                static_cast<int>(prefs.get_int("thumbnail_height"))));
}

}  // namespace mkit
