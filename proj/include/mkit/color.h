#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mkit {

using Rgb = std::array<std::uint8_t, 3>;

// CSS-style colors: names, #rgb, #rrggbb, rgb(), hsl() and hsv().
std::optional<Rgb> parse_color(std::string_view text);

// matplotlib colormap names; a "_r" suffix reverses any of them.
bool has_colormap(std::string_view name);
std::vector<std::string> colormap_names();
// t in [0, 1]. Throws BadPreference for unknown names.
Rgb sample_colormap(std::string_view name, double t);

}  // namespace mkit
