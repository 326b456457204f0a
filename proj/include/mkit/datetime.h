#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mkit {

// A UTC instant with one-second precision.
class Timestamp {
 public:
  constexpr Timestamp() = default;
  constexpr explicit Timestamp(std::int64_t epoch_seconds) : seconds_(epoch_seconds) {}

  static Timestamp from_civil(int year, int month, int day, int hour = 0, int minute = 0,
                              int second = 0);
  static Timestamp now();

  // "Fri, 11 Feb 2011 07:22:57 GMT"; also accepts RFC 850 and asctime forms.
  static std::optional<Timestamp> parse_http(std::string_view text);
  // "20110211072257"; shorter prefixes (YYYY, YYYYMM, ...) pad with the earliest value.
  static std::optional<Timestamp> parse_14digit(std::string_view text);
  // "2011-02-11T07:22:57Z" (also accepts a space separator and "+00:00").
  static std::optional<Timestamp> parse_iso8601(std::string_view text);

  std::string to_http() const;
  std::string to_14digit() const;
  std::string to_iso8601() const;

  constexpr std::int64_t epoch_seconds() const { return seconds_; }

  struct Civil {
    int year, month, day, hour, minute, second, weekday;  // weekday: 0 = Sunday
  };
  Civil civil() const;

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;

 private:
  std::int64_t seconds_ = 0;
};

}  // namespace mkit
