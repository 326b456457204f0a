#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "mkit/draw.h"
#include "mkit/errors.h"
#include "mkit/products.h"

namespace mkit {

namespace {

constexpr double kMinFontScale = 0.3;
constexpr int kShrinkAttempts = 30;

int thickness_for(double scale) { return std::max(1, static_cast<int>(std::lround(scale * 1.5))); }

bool overlaps(const DrawRecord& a, const DrawRecord& b) {
  return a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height && b.y < a.y + a.height;
}

// Archimedean spiral out from the centre; first free spot wins.
bool place(DrawRecord& r, const std::vector<DrawRecord>& placed, int width, int height) {
  const double cx = (width - r.width) / 2.0;
  const double cy = (height - r.height) / 2.0;
  const double max_radius = std::hypot(width, height);
  for (double t = 0;; t += 0.05) {
    const double radius = 1.5 * t;
    if (radius > max_radius) return false;
    r.x = static_cast<int>(std::lround(cx + radius * std::cos(t)));
    r.y = static_cast<int>(std::lround(cy + radius * std::sin(t) * height / width));
    if (r.x < 0 || r.y < 0 || r.x + r.width > width || r.y + r.height > height) continue;
    if (std::none_of(placed.begin(), placed.end(), [&](const DrawRecord& p) { return overlaps(r, p); }))
      return true;
  }
}

}  // namespace

std::vector<DrawRecord> layout_wordcloud(const std::vector<std::pair<std::string, std::size_t>>& terms, int width,
                                         int height, std::string_view colormap) {
  std::vector<std::pair<std::string, std::size_t>> top;
  for (const auto& [word, count] : terms) {
    if (top.size() >= kWordCloudTerms) break;
    if (count == 0) continue;
    std::string ascii = draw::ascii_fold(word);
    if (!ascii.empty()) top.emplace_back(std::move(ascii), count);
  }
  if (top.empty()) return {};
  sample_colormap(colormap, 0);  // validates the name

  const double max_count = static_cast<double>(top.front().second);
  const double unit_height = draw::measure_text("Ag", 1.0, 1).height;
  double factor = (height / 4.0) / unit_height / max_count;

  std::vector<DrawRecord> placed;
  for (int attempt = 0; attempt <= kShrinkAttempts; ++attempt, factor *= 0.9) {
    placed.clear();
    bool complete = true;
    for (std::size_t i = 0; i < top.size(); ++i) {
      const double scale = factor * static_cast<double>(top[i].second);
      if (scale < kMinFontScale) continue;
      DrawRecord r;
      r.kind = DrawRecord::Kind::Text;
      r.content = top[i].first;
      r.count = top[i].second;
      r.font_scale = scale;
      const auto m = draw::measure_text(r.content, scale, thickness_for(scale));
      r.width = m.width + 2;
      r.height = m.height + m.baseline + 2;
      const double t = top.size() > 1 ? 0.85 * static_cast<double>(i) / static_cast<double>(top.size() - 1) : 0.0;
      r.color = sample_colormap(colormap, t);
      if (place(r, placed, width, height)) {
        placed.push_back(std::move(r));
      } else if (attempt < kShrinkAttempts) {
        complete = false;
        break;
      }
    }
    if (complete) break;
  }
  return placed;
}

RgbImage render_wordcloud(const std::vector<DrawRecord>& layout, int width, int height, Rgb background) {
  RgbImage img(width, height, background);
  for (const auto& r : layout) {
    const int thickness = thickness_for(r.font_scale);
    const auto m = draw::measure_text(r.content, r.font_scale, thickness);
    draw::draw_text(img, r.content, r.x + 1, r.y + 1 + m.height, r.font_scale, r.color, thickness);
  }
  return img;
}

WordCloud build_wordcloud(MementoAnalysis& analysis, const PreferenceSet& prefs) {
  const auto& terms = analysis.word_frequencies();
  WordCloud out;
  if (prefs.get_flag("textonly")) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& t : terms) words.push_back(t.first);
    out.json = words.dump();
    return out;
  }
  const auto background = parse_color(prefs.get("background_color"));
  if (!background) throw BadPreference("cannot parse color '" + prefs.get("background_color") + "'");
  out.layout = layout_wordcloud(terms, kWordCloudWidth, kWordCloudHeight, prefs.get("colormap"));
  out.png = encode_png(render_wordcloud(out.layout, kWordCloudWidth, kWordCloudHeight, *background));
  return out;
}

}  // namespace mkit
