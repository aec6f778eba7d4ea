#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hems {

/// Calendar day. Timestamps in this project are naive local time; there is no
/// timezone handling anywhere.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static Date parse(std::string_view iso);  // "YYYY-MM-DD"
  std::string to_string() const;
  Date plus_days(int n) const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

/// Seconds since 1970-01-01 00:00:00 for the start of `d`.
std::int64_t day_start_epoch(const Date& d);

/// Parses "YYYY-MM-DD HH:MM[:SS]" or "YYYY-MM-DDTHH:MM[:SS]" to epoch seconds.
std::int64_t parse_timestamp(std::string_view iso);

}  // namespace hems
