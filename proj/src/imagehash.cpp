#include "mkit/imagehash.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace mkit {

namespace {

std::vector<double> gray(const RgbImage& image, int w, int h) {
  const RgbImage small = resize_image(image, w, h);
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto* p = small.at(x, y);
      out[static_cast<std::size_t>(y) * w + x] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
  return out;
}

std::string hex(const std::vector<bool>& bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i + 3 < bits.size(); i += 4)
    out += digits[(bits[i] << 3) | (bits[i + 1] << 2) | (bits[i + 2] << 1) | bits[i + 3]];
  return out;
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  return (hi + *std::max_element(v.begin(), v.begin() + mid)) / 2;
}

}  // namespace

std::map<std::string, std::string> perceptual_hashes(const RgbImage& image) {
  std::map<std::string, std::string> out;
  if (image.width <= 0 || image.height <= 0) return out;

  const auto a = gray(image, 8, 8);
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / 64;
  std::vector<bool> bits;
  for (double v : a) bits.push_back(v > mean);
  out["aHash"] = hex(bits);

  const auto dh = gray(image, 9, 8);
  bits.clear();
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) bits.push_back(dh[y * 9 + x + 1] > dh[y * 9 + x]);
  out["dHash_horizontal"] = hex(bits);

  const auto dv = gray(image, 8, 9);
  bits.clear();
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) bits.push_back(dv[(y + 1) * 8 + x] > dv[y * 8 + x]);
  out["dHash_vertical"] = hex(bits);

  // 2-D DCT-II of a 32x32 thumbnail; the low 8x8 band against its median.
  constexpr int n = 32;
  const auto p = gray(image, n, n);
  std::vector<double> cosines(n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) cosines[k * n + i] = std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
  std::vector<double> rows(8 * n);
  for (int y = 0; y < n; ++y)
    for (int k = 0; k < 8; ++k) {
      double s = 0;
      for (int x = 0; x < n; ++x) s += p[y * n + x] * cosines[k * n + x];
      rows[k * n + y] = s;
    }
  std::vector<double> low(64);
  for (int ky = 0; ky < 8; ++ky)
    for (int kx = 0; kx < 8; ++kx) {
      double s = 0;
      for (int y = 0; y < n; ++y) s += rows[kx * n + y] * cosines[ky * n + y];
      low[ky * 8 + kx] = s;
    }
  const double med = median(low);
  bits.clear();
  for (double v : low) bits.push_back(v > med);
  out["pHash"] = hex(bits);
  return out;
}

}  // namespace mkit
