#include <algorithm>
#include <cmath>

#include "mkit/draw.h"
#include "mkit/errors.h"
#include "mkit/gif.h"
#include "mkit/products.h"
#include "mkit/text.h"

namespace mkit {

std::size_t FramePlan::frame_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += static_cast<std::size_t>(e.frames());
  return n;
}

double FramePlan::alpha(const FramePlanEntry& e, int frame) {
  if (frame < e.fade_in) return static_cast<double>(frame) / e.fade_in;
  frame -= e.fade_in;
  if (frame < e.hold) return 1.0;
  frame -= e.hold;
  return 1.0 - static_cast<double>(frame + 1) / e.fade_out;
}

int frame_delay_for(int duration_cs, const FramePlanEntry& entry) {
  const int frames = std::max(1, entry.frames());
  return std::max(2, static_cast<int>(std::lround(static_cast<double>(duration_cs) / frames)));
}

namespace {

struct LoadedImage {
  std::string uri;
  RgbImage image;
};

// Best-scored images that still download and decode, at most `limit`.
std::vector<LoadedImage> top_images(MementoAnalysis& analysis, std::size_t limit,
                                    const std::optional<Deadline>& deadline, std::size_t* scored) {
  const ImageSelection& sel = analysis.images();
  if (scored) *scored = sel.ranking.size();
  std::vector<LoadedImage> out;
  for (std::size_t idx : sel.ranking) {
    if (out.size() >= limit) break;
    check_deadline(deadline, "image download");
    const ImageCandidate& c = sel.candidates[idx];
    try {
      const auto res = http_get(analysis.fetcher(), c.fetched_uri);
      if (res.status != 200) continue;
      out.push_back({c.urim, decode_image(res.body)});
    } catch (const Error&) {
    }
  }
  return out;
}

gif::Palette scaled(const gif::Palette& p, double alpha) {
  gif::Palette out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (int k = 0; k < 3; ++k) out[i][k] = static_cast<std::uint8_t>(std::lround(p[i][k] * alpha));
  return out;
}

// Frames of one entry: shared indices, palette scaled by the fade alpha.
// Overlay pixels (mask set) keep their own unscaled palette slots.
void append_entry_frames(std::vector<gif::Frame>& frames, const FramePlanEntry& entry, const RgbImage& canvas,
                         const FramePlan& plan, const RgbImage* overlay, const std::vector<bool>* mask,
                         const std::optional<Deadline>& deadline) {
  constexpr std::size_t kOverlayColors = 32;
  gif::Palette content_palette;
  gif::Palette overlay_palette;
  std::vector<std::uint8_t> indices;
  if (!overlay) {
    content_palette = gif::median_cut(canvas, 256);
    indices = gif::map_to_palette(canvas, content_palette);
  } else {
    content_palette = gif::median_cut(canvas, 256 - kOverlayColors);
    overlay_palette = gif::median_cut(*overlay, kOverlayColors);
    indices = gif::map_to_palette(canvas, content_palette);
    const auto overlay_indices = gif::map_to_palette(*overlay, overlay_palette);
    for (std::size_t i = 0; i < indices.size(); ++i)
      if ((*mask)[i]) indices[i] = static_cast<std::uint8_t>(content_palette.size() + overlay_indices[i]);
  }
  for (int f = 0; f < entry.frames(); ++f) {
    check_deadline(deadline, "reel");
    gif::Frame frame;
    frame.indices = indices;
    frame.palette = scaled(content_palette, FramePlan::alpha(entry, f));
    frame.palette.insert(frame.palette.end(), overlay_palette.begin(), overlay_palette.end());
    frame.delay_cs = plan.frame_delay_cs;
    frames.push_back(std::move(frame));
  }
}

// Greedy word wrap into lines no wider than `width` at `scale`.
std::vector<std::string> wrap(const std::string& ascii, int width, double scale, int thickness) {
  std::vector<std::string> lines;
  std::string line;
  for (const auto& word : text::split(ascii, ' ')) {
    if (word.empty()) continue;
    const std::string candidate = line.empty() ? word : line + " " + word;
    if (!line.empty() && draw::measure_text(candidate, scale, thickness).width > width) {
      lines.push_back(line);
      line = word;
    } else {
      line = candidate;
    }
  }
  if (!line.empty()) lines.push_back(line);
  return lines;
}

RgbImage sentence_card(const std::string& sentence, int width, int height) {
  RgbImage img(width, height, {0, 0, 0});
  const std::string ascii = draw::ascii_fold(sentence);
  const int margin = std::max(4, width / 20);
  const int usable_w = width - 2 * margin;
  const int usable_h = height - 2 * margin;
  double scale = std::max(0.3, height / 240.0 * 0.7);
  std::vector<std::string> lines;
  int line_h = 0;
  for (;; scale *= 0.9) {
    const int thickness = scale >= 1.0 ? 2 : 1;
    lines = wrap(ascii, usable_w, scale, thickness);
    const auto m = draw::measure_text("Ag", scale, thickness);
    line_h = static_cast<int>((m.height + m.baseline) * 1.35);
    bool fits = static_cast<int>(lines.size()) * line_h <= usable_h;
    for (const auto& l : lines) fits = fits && draw::measure_text(l, scale, thickness).width <= usable_w;
    if (fits || scale < 0.2) break;
  }
  const int thickness = scale >= 1.0 ? 2 : 1;
  int y = margin + (usable_h - static_cast<int>(lines.size()) * line_h) / 2 + line_h * 3 / 4;
  for (const auto& l : lines) {
    const int w = draw::measure_text(l, scale, thickness).width;
    draw::draw_text(img, l, (width - w) / 2, y, scale, {255, 255, 255}, thickness);
    y += line_h;
  }
  return img;
}

std::optional<RgbImage> fetch_icon(const std::optional<std::string>& uri, const Fetcher& fetcher, int size) {
  if (!uri) return std::nullopt;
  try {
    const auto res = http_get(fetcher, *uri);
    if (res.status != 200) return std::nullopt;
    return resize_image(decode_image(res.body), size, size);
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct Overlay {
  RgbImage image;  // full canvas; only masked pixels matter
  std::vector<bool> mask;
  std::vector<DrawRecord> records;
  int band_height = 0;
};

Overlay build_overlay(const SurrogateBundle& b, MementoAnalysis& analysis, int width, int height) {
  Overlay o;
  o.band_height = std::max(28, height / 6);
  const int band_top = height - o.band_height;
  o.image = RgbImage(width, height, {0, 0, 0});
  o.mask.assign(static_cast<std::size_t>(width) * height, false);
  for (int y = band_top; y < height; ++y)
    for (int x = 0; x < width; ++x) o.mask[static_cast<std::size_t>(y) * width + x] = true;
  draw::fill_rect(o.image, 0, band_top, width, o.band_height, {24, 24, 24});

  const int line_h = o.band_height / 2;
  const int icon = std::max(8, line_h - 4);
  const double scale = std::max(0.25, line_h * 0.5 / draw::measure_text("Ag", 1.0, 1).height);
  const Rgb fg{235, 235, 235};
  auto line = [&](int row, const std::optional<std::string>& favicon_uri, const std::string& label,
                  const std::string& right) {
    const int top = band_top + row * line_h;
    int x = 4;
    if (auto fav = fetch_icon(favicon_uri, analysis.fetcher(), icon)) {
      draw::blit(o.image, *fav, x, top + (line_h - icon) / 2);
      o.records.push_back({DrawRecord::Kind::Image, *favicon_uri, x, top + (line_h - icon) / 2, icon, icon, 0, {}, 0});
    }
    x += icon + 4;
    const std::string ascii = draw::ascii_fold(label);
    const auto m = draw::measure_text(ascii, scale, 1);
    const int baseline = top + (line_h + m.height) / 2;
    draw::draw_text(o.image, ascii, x, baseline, scale, fg, 1);
    o.records.push_back({DrawRecord::Kind::Text, label, x, baseline - m.height, m.width, m.height, scale, fg, 0});
    if (!right.empty()) {
      const auto rm = draw::measure_text(right, scale, 1);
      const int rx = width - rm.width - 4;
      draw::draw_text(o.image, right, rx, baseline, scale, fg, 1);
      o.records.push_back({DrawRecord::Kind::Text, right, rx, baseline - rm.height, rm.width, rm.height, scale, fg, 0});
    }
  };
  const std::string when = b.memento_datetime.to_iso8601();
  line(0, b.original_favicon, b.original_domain, "");
  line(1, b.archive_favicon, b.archive_name, when.substr(0, 10) + " " + when.substr(11, 8));
  return o;
}

}  // namespace

Reel build_imagereel(MementoAnalysis& analysis, const PreferenceSet& prefs, std::optional<Deadline> deadline) {
  analysis.record();
  const auto count = static_cast<std::size_t>(prefs.get_int("imagecount"));
  std::size_t scored = 0;
  const auto images = top_images(analysis, count, deadline, &scored);
  if (scored < 2 || images.empty())
    throw ProductUnsupported("an imagereel needs at least two scored images; this memento has " +
                             std::to_string(scored));
  Reel reel;
  reel.plan.width = static_cast<int>(prefs.get_int("width"));
  reel.plan.height = static_cast<int>(prefs.get_int("height"));
  for (const auto& img : images) reel.plan.entries.push_back({FramePlanEntry::Kind::Image, img.uri});
  reel.plan.frame_delay_cs = frame_delay_for(static_cast<int>(prefs.get_int("duration")), reel.plan.entries.front());

  std::vector<gif::Frame> frames;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const RgbImage canvas = fit_image(images[i].image, reel.plan.width, reel.plan.height, {0, 0, 0});
    append_entry_frames(frames, reel.plan.entries[i], canvas, reel.plan, nullptr, nullptr, deadline);
  }
  reel.gif = gif::encode(reel.plan.width, reel.plan.height, frames, 0);
  return reel;
}

Reel build_docreel(MementoAnalysis& analysis, const PreferenceSet& prefs, std::optional<Deadline> deadline) {
  const SurrogateBundle bundle = build_bundle(analysis);
  const auto image_count = static_cast<std::size_t>(prefs.get_int("imagecount"));
  const auto sentence_count = static_cast<std::size_t>(prefs.get_int("sentencecount"));
  const auto images = image_count ? top_images(analysis, image_count, deadline, nullptr) : std::vector<LoadedImage>{};
  std::vector<std::string> sentences;
  if (sentence_count) {
    for (const auto& s : analysis.sentences("readability/textrank").sentences) {
      if (sentences.size() >= sentence_count) break;
      sentences.push_back(s.text);
    }
  }
  if (images.size() + sentences.size() < 2)
    throw ProductUnsupported("a docreel needs at least two images or sentences");

  Reel reel;
  reel.plan.width = static_cast<int>(prefs.get_int("width"));
  reel.plan.height = static_cast<int>(prefs.get_int("height"));
  std::vector<const RgbImage*> sources;
  for (std::size_t i = 0; i < std::max(images.size(), sentences.size()); ++i) {
    if (i < images.size()) {
      reel.plan.entries.push_back({FramePlanEntry::Kind::Image, images[i].uri});
      sources.push_back(&images[i].image);
    }
    if (i < sentences.size()) {
      reel.plan.entries.push_back({FramePlanEntry::Kind::Sentence, sentences[i]});
      sources.push_back(nullptr);
    }
  }
  reel.plan.frame_delay_cs = frame_delay_for(static_cast<int>(prefs.get_int("duration")), reel.plan.entries.front());

  check_deadline(deadline, "docreel");
  Overlay overlay = build_overlay(bundle, analysis, reel.plan.width, reel.plan.height);
  reel.overlay = overlay.records;
  const int content_h = reel.plan.height - overlay.band_height;

  std::vector<gif::Frame> frames;
  for (std::size_t i = 0; i < reel.plan.entries.size(); ++i) {
    const auto& entry = reel.plan.entries[i];
    const RgbImage content = sources[i] ? fit_image(*sources[i], reel.plan.width, content_h, {0, 0, 0})
                                        : sentence_card(entry.source, reel.plan.width, content_h);
    RgbImage canvas(reel.plan.width, reel.plan.height, {0, 0, 0});
    draw::blit(canvas, content, 0, 0);
    append_entry_frames(frames, entry, canvas, reel.plan, &overlay.image, &overlay.mask, deadline);
  }
  reel.gif = gif::encode(reel.plan.width, reel.plan.height, frames, 0);
  return reel;
}

}  // namespace mkit
