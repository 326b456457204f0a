#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mkit/image.h"

namespace mkit::gif {

using Color = std::array<std::uint8_t, 3>;
using Palette = std::vector<Color>;

struct Frame {
  std::vector<std::uint8_t> indices;  // width * height palette indices
  Palette palette;                    // local color table, 1..256 entries
  int delay_cs = 10;                  // hundredths of a second
};

// GIF89a with a NETSCAPE2.0 loop extension; loop_count 0 loops forever.
std::string encode(int width, int height, const std::vector<Frame>& frames, int loop_count = 0);

struct Animation {
  int width = 0;
  int height = 0;
  int loop_count = -1;  // -1 when no NETSCAPE extension is present
  std::vector<RgbImage> frames;  // fully composited canvases
  std::vector<int> delays_cs;
};

// Throws UndecodableImage.
Animation decode(std::string_view bytes);

// Median-cut quantization to at most max_colors entries.
Palette median_cut(const RgbImage& image, std::size_t max_colors = 256);

// Nearest palette entry per pixel (squared RGB distance, lowest index on ties).
std::vector<std::uint8_t> map_to_palette(const RgbImage& image, const Palette& palette);

// Variable-length LZW as used by GIF image data, exposed for testing.
std::vector<std::uint8_t> lzw_encode(const std::vector<std::uint8_t>& indices, int min_code_size);
std::vector<std::uint8_t> lzw_decode(std::string_view data, int min_code_size, std::size_t expected);

}  // namespace mkit::gif
