#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mkit::text {

void append_utf8(std::string& out, char32_t cp);

// Decodes UTF-8, replacing malformed sequences with U+FFFD.
std::u32string to_code_points(std::string_view utf8);
std::string from_code_points(std::u32string_view cps);

std::size_t code_point_count(std::string_view utf8);

// Collapses runs of ASCII whitespace and U+00A0 into one space and trims.
std::string collapse_whitespace(std::string_view utf8);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view encoded);

// "data:<media type>;base64,<payload>"
std::string data_uri(std::string_view media_type, std::string_view bytes);

}  // namespace mkit::text
