#include "mkit/draw.h"

#include <unicode/translit.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <opencv2/imgproc.hpp>

namespace mkit::draw {

namespace {

cv::Mat view(RgbImage& image) { return cv::Mat(image.height, image.width, CV_8UC3, image.pixels.data()); }

cv::Scalar scalar(Rgb c) { return cv::Scalar(c[0], c[1], c[2]); }

}  // namespace

std::string ascii_fold(std::string_view utf8) {
  static std::once_flag once;
  static std::unique_ptr<icu::Transliterator> latin;
  static std::mutex mutex;
  std::call_once(once, [] {
    UErrorCode status = U_ZERO_ERROR;
    latin.reset(icu::Transliterator::createInstance("Any-Latin; Latin-ASCII", UTRANS_FORWARD, status));
    if (U_FAILURE(status)) latin.reset();
  });
  bool ascii = std::all_of(utf8.begin(), utf8.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
  std::string out;
  if (ascii) {
    out = std::string(utf8);
  } else {
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    if (latin) {
      std::lock_guard lock(mutex);
      latin->transliterate(u);
    }
    u.toUTF8String(out);
  }
  std::string folded;
  for (std::size_t i = 0; i < out.size();) {
    const auto c = static_cast<unsigned char>(out[i]);
    if (c < 0x80) {
      folded += (c < 0x20 && c != '\t') ? ' ' : static_cast<char>(c);
      ++i;
      continue;
    }
    folded += '?';
    ++i;
    while (i < out.size() && (static_cast<unsigned char>(out[i]) & 0xC0) == 0x80) ++i;
  }
  return folded;
}

TextSize measure_text(std::string_view ascii, double scale, int thickness) {
  int baseline = 0;
  const cv::Size s = cv::getTextSize(std::string(ascii), cv::FONT_HERSHEY_SIMPLEX, scale, thickness, &baseline);
  return {s.width, s.height, baseline};
}

void draw_text(RgbImage& image, std::string_view ascii, int x, int y, double scale, Rgb color,
               int thickness) {
  cv::Mat m = view(image);
  cv::putText(m, std::string(ascii), {x, y}, cv::FONT_HERSHEY_SIMPLEX, scale, scalar(color), thickness,
              cv::LINE_AA);
}

void fill_rect(RgbImage& image, int x, int y, int width, int height, Rgb color) {
  cv::Mat m = view(image);
  cv::rectangle(m, cv::Rect(x, y, width, height), scalar(color), cv::FILLED);
}

void blit(RgbImage& dst, const RgbImage& src, int x, int y) {
  for (int sy = 0; sy < src.height; ++sy) {
    const int dy = y + sy;
    if (dy < 0 || dy >= dst.height) continue;
    for (int sx = 0; sx < src.width; ++sx) {
      const int dx = x + sx;
      if (dx < 0 || dx >= dst.width) continue;
      std::copy_n(src.at(sx, sy), 3, dst.at(dx, dy));
    }
  }
}

RgbImage wireframe_globe(int width, int height) {
  RgbImage img(width, height, {255, 255, 255});
  cv::Mat m = view(img);
  const cv::Point c(width / 2, height / 2);
  const int r = std::max(4, std::min(width, height) * 2 / 5);
  const cv::Scalar line(90, 110, 140);
  const int t = std::max(1, r / 60);
  cv::circle(m, c, r, line, t, cv::LINE_AA);
  for (int k = 1; k <= 3; ++k) {
    const int a = r * k / 4;
    cv::ellipse(m, c, {a, r}, 0, 0, 360, line, t, cv::LINE_AA);
  }
  cv::line(m, {c.x, c.y - r}, {c.x, c.y + r}, line, t, cv::LINE_AA);
  for (int k = -2; k <= 2; ++k) {
    const int y = c.y + r * k / 3;
    const double dy = static_cast<double>(y - c.y) / r;
    const int half = static_cast<int>(r * std::sqrt(std::max(0.0, 1 - dy * dy)));
    cv::line(m, {c.x - half, y}, {c.x + half, y}, line, t, cv::LINE_AA);
  }
  return img;
}

const std::string& default_image_png() {
  static const std::string png = encode_png(wireframe_globe(320, 240));
  return png;
}

}  // namespace mkit::draw
