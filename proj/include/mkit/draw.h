#pragma once

#include <string>
#include <string_view>

#include "mkit/color.h"
#include "mkit/image.h"

namespace mkit::draw {

// Hershey fonts only cover ASCII: transliterate to Latin-ASCII, then '?' for the rest.
std::string ascii_fold(std::string_view utf8);

struct TextSize {
  int width = 0;
  int height = 0;    // cap height above the baseline
  int baseline = 0;  // descent below the baseline
};

TextSize measure_text(std::string_view ascii, double scale, int thickness);
// (x, y) is the left end of the baseline.
void draw_text(RgbImage& image, std::string_view ascii, int x, int y, double scale, Rgb color,
               int thickness);

void fill_rect(RgbImage& image, int x, int y, int width, int height, Rgb color);
// Copies src with its top-left corner at (x, y), clipped to the destination.
void blit(RgbImage& dst, const RgbImage& src, int x, int y);

// Placeholder striking image: a wireframe globe.
RgbImage wireframe_globe(int width, int height);
const std::string& default_image_png();

}  // namespace mkit::draw
