#include "mkit/color.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "mkit/errors.h"
#include "mkit/text.h"
#include "mkit/uri.h"

namespace mkit {

namespace {

struct Colormap {
  const char* name;
  std::array<std::uint8_t, 768> lut;
};

const Colormap kColormaps[] = {
#include "colormaps.inc"
};

struct NamedColor {
  const char* name;
  Rgb rgb;
};

const NamedColor kNamed[] = {
#include "css_colors.inc"
};

const Colormap* find_colormap(std::string_view name) {
  for (const auto& c : kColormaps)
    if (name == c.name) return &c;
  return nullptr;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

// Numbers of a functional notation such as "rgb(1, 2, 3)"; percentages keep a flag.
std::optional<std::vector<std::pair<double, bool>>> arguments(std::string_view body) {
  std::string cleaned(body);
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::replace(cleaned.begin(), cleaned.end(), '/', ' ');
  std::vector<std::pair<double, bool>> out;
  for (const auto& tok : text::split(cleaned, ' ')) {
    std::string_view t = text::trim(tok);
    if (t.empty()) continue;
    bool percent = false;
    if (t.back() == '%') {
      percent = true;
      t.remove_suffix(1);
    }
    if (t.size() > 3 && t.substr(t.size() - 3) == "deg") t.remove_suffix(3);
    try {
      std::size_t used = 0;
      const double v = std::stod(std::string(t), &used);
      if (used != t.size()) return std::nullopt;
      out.emplace_back(v, percent);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return out;
}

Rgb from_hsl(double h, double s, double l) {
  h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0) / 360.0;
  auto hue = [](double p, double q, double t) {
    if (t < 0) t += 1;
    if (t > 1) t -= 1;
    if (t < 1.0 / 6) return p + (q - p) * 6 * t;
    if (t < 0.5) return q;
    if (t < 2.0 / 3) return p + (q - p) * (2.0 / 3 - t) * 6;
    return p;
  };
  if (s == 0) return {to_byte(l * 255), to_byte(l * 255), to_byte(l * 255)};
  const double q = l < 0.5 ? l * (1 + s) : l + s - l * s;
  const double p = 2 * l - q;
  return {to_byte(hue(p, q, h + 1.0 / 3) * 255), to_byte(hue(p, q, h) * 255),
          to_byte(hue(p, q, h - 1.0 / 3) * 255)};
}

Rgb from_hsv(double h, double s, double v) {
  h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0) / 60.0;
  const double c = v * s;
  const double x = c * (1 - std::abs(std::fmod(h, 2.0) - 1));
  const double m = v - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h)) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  return {to_byte((r + m) * 255), to_byte((g + m) * 255), to_byte((b + m) * 255)};
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::optional<Rgb> parse_color(std::string_view input) {
  const std::string s = to_lower_ascii(text::trim(input));
  if (s.empty()) return std::nullopt;
  if (s[0] == '#') {
    const std::string_view hex = std::string_view(s).substr(1);
    if (hex.size() != 3 && hex.size() != 6) return std::nullopt;
    for (char c : hex)
      if (hex_value(c) < 0) return std::nullopt;
    if (hex.size() == 3)
      return Rgb{static_cast<std::uint8_t>(hex_value(hex[0]) * 17),
                 static_cast<std::uint8_t>(hex_value(hex[1]) * 17),
                 static_cast<std::uint8_t>(hex_value(hex[2]) * 17)};
    return Rgb{static_cast<std::uint8_t>(hex_value(hex[0]) * 16 + hex_value(hex[1])),
               static_cast<std::uint8_t>(hex_value(hex[2]) * 16 + hex_value(hex[3])),
               static_cast<std::uint8_t>(hex_value(hex[4]) * 16 + hex_value(hex[5]))};
  }
  const auto open = s.find('(');
  if (open != std::string::npos && s.back() == ')') {
    const std::string fn = std::string(text::trim(std::string_view(s).substr(0, open)));
    const auto args = arguments(std::string_view(s).substr(open + 1, s.size() - open - 2));
    if (!args || args->size() < 3) return std::nullopt;
    const auto& a = *args;
    if (fn == "rgb" || fn == "rgba") {
      Rgb out;
      for (int i = 0; i < 3; ++i) out[i] = to_byte(a[i].second ? a[i].first * 255.0 / 100.0 : a[i].first);
      return out;
    }
    auto unit = [](const std::pair<double, bool>& v) {
      return std::clamp(v.second || v.first > 1 ? v.first / 100.0 : v.first, 0.0, 1.0);
    };
    if (fn == "hsl" || fn == "hsla") return from_hsl(a[0].first, unit(a[1]), unit(a[2]));
    if (fn == "hsv" || fn == "hsb") return from_hsv(a[0].first, unit(a[1]), unit(a[2]));
    return std::nullopt;
  }
  for (const auto& c : kNamed)
    if (s == c.name) return c.rgb;
  return std::nullopt;
}

bool has_colormap(std::string_view name) {
  if (find_colormap(name)) return true;
  return name.size() > 2 && name.substr(name.size() - 2) == "_r" &&
         find_colormap(name.substr(0, name.size() - 2));
}

std::vector<std::string> colormap_names() {
  std::vector<std::string> out;
  for (const auto& c : kColormaps) out.emplace_back(c.name);
  return out;
}

Rgb sample_colormap(std::string_view name, double t) {
  bool reversed = false;
  const Colormap* map = find_colormap(name);
  if (!map && name.size() > 2 && name.substr(name.size() - 2) == "_r") {
    map = find_colormap(name.substr(0, name.size() - 2));
    reversed = true;
  }
  if (!map) throw BadPreference("unknown colormap '" + std::string(name) + "'");
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  if (reversed) t = 1 - t;
  const auto i = static_cast<std::size_t>(std::lround(t * 255));
  return {map->lut[i * 3], map->lut[i * 3 + 1], map->lut[i * 3 + 2]};
}

}  // namespace mkit
