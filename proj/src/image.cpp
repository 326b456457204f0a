#include "mkit/image.h"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>

#include "mkit/errors.h"
#include "mkit/gif.h"

namespace mkit {

RgbImage::RgbImage(int w, int h, std::array<std::uint8_t, 3> fill) : width(w), height(h) {
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill[0];
    pixels[i + 1] = fill[1];
    pixels[i + 2] = fill[2];
  }
}

namespace {

bool has_prefix(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

RgbImage from_mat_bgr(const cv::Mat& bgr) {
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  RgbImage out;
  out.width = rgb.cols;
  out.height = rgb.rows;
  out.pixels.resize(static_cast<std::size_t>(rgb.cols) * rgb.rows * 3);
  for (int y = 0; y < rgb.rows; ++y)
    std::copy_n(rgb.ptr<std::uint8_t>(y), rgb.cols * 3, out.pixels.begin() + static_cast<std::ptrdiff_t>(y) * rgb.cols * 3);
  return out;
}

// Wraps without copying; callers must not outlive `image`.
cv::Mat view(const RgbImage& image) {
  return cv::Mat(image.height, image.width, CV_8UC3, const_cast<std::uint8_t*>(image.pixels.data()));
}

RgbImage from_mat_rgb(const cv::Mat& rgb) {
  RgbImage out;
  out.width = rgb.cols;
  out.height = rgb.rows;
  out.pixels.resize(static_cast<std::size_t>(rgb.cols) * rgb.rows * 3);
  for (int y = 0; y < rgb.rows; ++y)
    std::copy_n(rgb.ptr<std::uint8_t>(y), rgb.cols * 3, out.pixels.begin() + static_cast<std::ptrdiff_t>(y) * rgb.cols * 3);
  return out;
}

}  // namespace

std::string sniff_image_type(std::string_view b) {
  if (has_prefix(b, "\x89PNG\r\n\x1a\n")) return "image/png";
  if (has_prefix(b, "\xFF\xD8\xFF")) return "image/jpeg";
  if (has_prefix(b, "GIF87a") || has_prefix(b, "GIF89a")) return "image/gif";
  if (b.size() >= 12 && has_prefix(b, "RIFF") && b.substr(8, 4) == "WEBP") return "image/webp";
  if (has_prefix(b, std::string_view("\0\0\1\0", 4))) return "image/x-icon";
  if (has_prefix(b, "BM")) return "image/bmp";
  return {};
}

RgbImage decode_image(std::string_view bytes) {
  const auto type = sniff_image_type(bytes);
  if (type == "image/gif") {
    auto anim = gif::decode(bytes);
    return std::move(anim.frames.front());
  }
  if (bytes.empty()) throw UndecodableImage("empty image body");
  cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<char*>(bytes.data()));
  cv::Mat decoded;
  try {
    decoded = cv::imdecode(buf, cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw UndecodableImage(std::string("image decode failed: ") + e.what());
  }
  if (decoded.empty())
    throw UndecodableImage("unsupported or corrupt image" + (type.empty() ? "" : " (" + type + ")"));
  return from_mat_bgr(decoded);
}

std::string encode_png(const RgbImage& image) {
  cv::Mat bgr;
  cv::cvtColor(view(image), bgr, cv::COLOR_RGB2BGR);
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", bgr, out)) throw Error("PNG encoding failed");
  return {out.begin(), out.end()};
}

RgbImage resize_image(const RgbImage& image, int width, int height) {
  if (image.width == width && image.height == height) return image;
  const bool shrinking = width < image.width && height < image.height;
  cv::Mat out;
  cv::resize(view(image), out, cv::Size(width, height), 0, 0,
             shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
  return from_mat_rgb(out);
}

RgbImage crop_image(const RgbImage& image, int x, int y, int width, int height) {
  x = std::clamp(x, 0, image.width);
  y = std::clamp(y, 0, image.height);
  width = std::clamp(width, 0, image.width - x);
  height = std::clamp(height, 0, image.height - y);
  RgbImage out(width, height);
  for (int row = 0; row < height; ++row)
    std::copy_n(image.at(x, y + row), static_cast<std::size_t>(width) * 3, out.at(0, row));
  return out;
}

RgbImage cover_image(const RgbImage& image, int width, int height) {
  const double target = static_cast<double>(width) / height;
  const double source = static_cast<double>(image.width) / image.height;
  int cw = image.width, ch = image.height;
  if (source > target)
    cw = std::max(1, static_cast<int>(std::lround(image.height * target)));
  else
    ch = std::max(1, static_cast<int>(std::lround(image.width / target)));
  const RgbImage cropped = crop_image(image, (image.width - cw) / 2, (image.height - ch) / 2, cw, ch);
  return resize_image(cropped, width, height);
}

RgbImage fit_image(const RgbImage& image, int width, int height, std::array<std::uint8_t, 3> background) {
  const double scale = std::min(static_cast<double>(width) / image.width,
                                static_cast<double>(height) / image.height);
  const int w = std::clamp(static_cast<int>(std::lround(image.width * scale)), 1, width);
  const int h = std::clamp(static_cast<int>(std::lround(image.height * scale)), 1, height);
  const RgbImage scaled = resize_image(image, w, h);
  RgbImage out(width, height, background);
  const int ox = (width - w) / 2, oy = (height - h) / 2;
  for (int row = 0; row < h; ++row)
    std::copy_n(scaled.at(0, row), static_cast<std::size_t>(w) * 3, out.at(ox, oy + row));
  return out;
}

}  // namespace mkit
