#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mkit {

// 8-bit RGB, row-major, no padding.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, std::array<std::uint8_t, 3> fill = {0, 0, 0});

  bool empty() const { return width <= 0 || height <= 0; }
  std::uint8_t* at(int x, int y) { return &pixels[(static_cast<std::size_t>(y) * width + x) * 3]; }
  const std::uint8_t* at(int x, int y) const {
    return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
  }
};

// "image/png", "image/jpeg", "image/gif", "image/webp", "image/x-icon",
// "image/bmp", or empty when the signature is unknown.
std::string sniff_image_type(std::string_view bytes);

// First frame for animated input; grayscale and alpha sources become RGB.
// Throws UndecodableImage.
RgbImage decode_image(std::string_view bytes);

std::string encode_png(const RgbImage& image);

RgbImage resize_image(const RgbImage& image, int width, int height);
RgbImage crop_image(const RgbImage& image, int x, int y, int width, int height);

// Scales to cover width x height, then center-crops to exactly that size.
RgbImage cover_image(const RgbImage& image, int width, int height);
// Scales to fit inside width x height and letterboxes onto `background`.
RgbImage fit_image(const RgbImage& image, int width, int height,
                   std::array<std::uint8_t, 3> background);

}  // namespace mkit
