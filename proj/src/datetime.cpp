#include "mkit/datetime.h"

#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>

namespace mkit {

namespace {

constexpr std::array<std::string_view, 7> kWeekdays = {"Sun", "Mon", "Tue", "Wed",
                                                       "Thu", "Fri", "Sat"};
constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

// Howard Hinnant's civil-from-days algorithms.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Ymd {
  std::int64_t y;
  unsigned m, d;
};

constexpr Ymd civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[static_cast<std::size_t>(m - 1)];
}

bool valid_fields(int y, int mo, int d, int h, int mi, int s) {
  return y >= 1 && y <= 9999 && mo >= 1 && mo <= 12 && d >= 1 && d <= days_in_month(y, mo) &&
         h >= 0 && h <= 23 && mi >= 0 && mi <= 59 && s >= 0 && s <= 60;
}

// Reads exactly `width` digits at `pos`, advancing it.
std::optional<int> read_digits(std::string_view text, std::size_t& pos, std::size_t width) {
  if (pos + width > text.size()) return std::nullopt;
  int value = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const char c = text[pos + i];
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    value = value * 10 + (c - '0');
  }
  pos += width;
  return value;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
  if (pos < text.size() && text[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

void skip_spaces(std::string_view text, std::size_t& pos) {
  while (pos < text.size() && text[pos] == ' ') ++pos;
}

std::optional<int> read_month_name(std::string_view text, std::size_t& pos) {
  if (pos + 3 > text.size()) return std::nullopt;
  const std::string_view name = text.substr(pos, 3);
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    const auto& m = kMonths[i];
    if (std::tolower(static_cast<unsigned char>(name[0])) ==
            std::tolower(static_cast<unsigned char>(m[0])) &&
        std::tolower(static_cast<unsigned char>(name[1])) == m[1] &&
        std::tolower(static_cast<unsigned char>(name[2])) == m[2]) {
      pos += 3;
      return static_cast<int>(i + 1);
    }
  }
  return std::nullopt;
}

std::optional<std::array<int, 3>> read_hms(std::string_view text, std::size_t& pos) {
  auto h = read_digits(text, pos, 2);
  if (!h || !expect(text, pos, ':')) return std::nullopt;
  auto mi = read_digits(text, pos, 2);
  if (!mi || !expect(text, pos, ':')) return std::nullopt;
  auto s = read_digits(text, pos, 2);
  if (!s) return std::nullopt;
  return std::array<int, 3>{*h, *mi, *s};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Timestamp Timestamp::from_civil(int year, int month, int day, int hour, int minute, int second) {
  const std::int64_t days =
      days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  return Timestamp(days * 86400 + hour * 3600 + minute * 60 + second);
}

Timestamp Timestamp::now() {
  const auto since_epoch = std::chrono::system_clock::now().time_since_epoch();
  return Timestamp(std::chrono::duration_cast<std::chrono::seconds>(since_epoch).count());
}

Timestamp::Civil Timestamp::civil() const {
  std::int64_t days = seconds_ / 86400;
  std::int64_t rem = seconds_ % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const Ymd ymd = civil_from_days(days);
  const int weekday = static_cast<int>(((days % 7) + 11) % 7);  // 1970-01-01 was a Thursday
  return Civil{static_cast<int>(ymd.y), static_cast<int>(ymd.m), static_cast<int>(ymd.d),
               static_cast<int>(rem / 3600),  static_cast<int>(rem % 3600 / 60),
               static_cast<int>(rem % 60),    weekday};
}

std::optional<Timestamp> Timestamp::parse_http(std::string_view text) {
  text = trim(text);
  std::size_t pos = 0;
  // Skip the weekday name in all three formats.
  while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
  const bool had_comma = expect(text, pos, ',');
  skip_spaces(text, pos);

  if (!had_comma) {
    // asctime: "Fri Feb 11 07:22:57 2011"
    auto mo = read_month_name(text, pos);
    if (!mo) return std::nullopt;
    skip_spaces(text, pos);
    std::size_t width = pos + 1 < text.size() &&
                                std::isdigit(static_cast<unsigned char>(text[pos + 1]))
                            ? 2
                            : 1;
    auto d = read_digits(text, pos, width);
    skip_spaces(text, pos);
    auto hms = read_hms(text, pos);
    skip_spaces(text, pos);
    auto y = read_digits(text, pos, 4);
    if (!d || !hms || !y || pos != text.size()) return std::nullopt;
    if (!valid_fields(*y, *mo, *d, (*hms)[0], (*hms)[1], (*hms)[2])) return std::nullopt;
    return from_civil(*y, *mo, *d, (*hms)[0], (*hms)[1], (*hms)[2]);
  }

  auto d = read_digits(text, pos, 2);
  if (!d) return std::nullopt;
  const bool rfc850 = expect(text, pos, '-');
  if (!rfc850) skip_spaces(text, pos);
  auto mo = read_month_name(text, pos);
  if (!mo) return std::nullopt;
  std::optional<int> y;
  if (rfc850) {
    if (!expect(text, pos, '-')) return std::nullopt;
    auto yy = read_digits(text, pos, 2);
    if (!yy) return std::nullopt;
    y = *yy < 70 ? 2000 + *yy : 1900 + *yy;
  } else {
    skip_spaces(text, pos);
    y = read_digits(text, pos, 4);
  }
  skip_spaces(text, pos);
  auto hms = read_hms(text, pos);
  skip_spaces(text, pos);
  if (!y || !hms) return std::nullopt;
  const std::string_view zone = text.substr(pos);
  if (zone != "GMT" && zone != "UTC" && zone != "+0000" && zone != "Z") return std::nullopt;
  if (!valid_fields(*y, *mo, *d, (*hms)[0], (*hms)[1], (*hms)[2])) return std::nullopt;
  return from_civil(*y, *mo, *d, (*hms)[0], (*hms)[1], (*hms)[2]);
}

std::optional<Timestamp> Timestamp::parse_14digit(std::string_view text) {
  text = trim(text);
  if (text.size() < 4 || text.size() > 14 || text.size() % 2 != 0) return std::nullopt;
  for (char c : text)
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  std::string padded(text);
  static constexpr std::string_view kFloor = "00000101000000";
  padded += kFloor.substr(padded.size());
  std::size_t pos = 0;
  const int y = *read_digits(padded, pos, 4);
  const int mo = *read_digits(padded, pos, 2);
  const int d = *read_digits(padded, pos, 2);
  const int h = *read_digits(padded, pos, 2);
  const int mi = *read_digits(padded, pos, 2);
  const int s = *read_digits(padded, pos, 2);
  if (!valid_fields(y, mo, d, h, mi, s)) return std::nullopt;
  return from_civil(y, mo, d, h, mi, s);
}

std::optional<Timestamp> Timestamp::parse_iso8601(std::string_view text) {
  text = trim(text);
  std::size_t pos = 0;
  auto y = read_digits(text, pos, 4);
  if (!y || !expect(text, pos, '-')) return std::nullopt;
  auto mo = read_digits(text, pos, 2);
  if (!mo || !expect(text, pos, '-')) return std::nullopt;
  auto d = read_digits(text, pos, 2);
  if (!d) return std::nullopt;
  if (!expect(text, pos, 'T') && !expect(text, pos, ' ')) return std::nullopt;
  auto hms = read_hms(text, pos);
  if (!hms) return std::nullopt;
  const std::string_view zone = text.substr(pos);
  if (zone != "Z" && zone != "+00:00" && zone != "" && zone != "+0000") return std::nullopt;
  if (!valid_fields(*y, *mo, *d, (*hms)[0], (*hms)[1], (*hms)[2])) return std::nullopt;
  return from_civil(*y, *mo, *d, (*hms)[0], (*hms)[1], (*hms)[2]);
}

std::string Timestamp::to_http() const {
  const Civil c = civil();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s, %02d %s %04d %02d:%02d:%02d GMT",
                kWeekdays[static_cast<std::size_t>(c.weekday)].data(), c.day,
                kMonths[static_cast<std::size_t>(c.month - 1)].data(), c.year, c.hour, c.minute,
                c.second);
  return buf;
}

std::string Timestamp::to_14digit() const {
  const Civil c = civil();
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04d%02d%02d%02d%02d%02d", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

std::string Timestamp::to_iso8601() const {
  const Civil c = civil();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month, c.day,
                c.hour, c.minute, c.second);
  return buf;
}

}  // namespace mkit
