#include "hems/dates.hpp"

#include <cctype>
#include <charconv>
#include <chrono>

#include "hems/errors.hpp"

namespace hems {

namespace {

int parse_int(std::string_view s, std::size_t pos, std::size_t len, std::string_view what) {
  if (pos + len > s.size()) {
    throw ValidationError("truncated date/time field (" + std::string(what) + "): '" +
                          std::string(s) + "'");
  }
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
  if (ec != std::errc() || ptr != s.data() + pos + len) {
    throw ValidationError("bad date/time field (" + std::string(what) + "): '" + std::string(s) +
                          "'");
  }
  return value;
}

std::chrono::sys_days to_sys_days(const Date& d) {
  using namespace std::chrono;
  year_month_day ymd{year{d.year}, month{static_cast<unsigned>(d.month)},
                     day{static_cast<unsigned>(d.day)}};
  if (!ymd.ok()) {
    throw ValidationError("invalid calendar date: " + d.to_string());
  }
  return sys_days{ymd};
}

}  // namespace

Date Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    throw ValidationError("expected YYYY-MM-DD date, got '" + std::string(iso) + "'");
  }
  Date d;
  d.year = parse_int(iso, 0, 4, "year");
  d.month = parse_int(iso, 5, 2, "month");
  d.day = parse_int(iso, 8, 2, "day");
  to_sys_days(d);  // validity check
  return d;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date Date::plus_days(int n) const {
  using namespace std::chrono;
  year_month_day ymd{to_sys_days(*this) + days{n}};
  return Date{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
              static_cast<int>(static_cast<unsigned>(ymd.day()))};
}

std::int64_t day_start_epoch(const Date& d) {
  return std::chrono::duration_cast<std::chrono::seconds>(to_sys_days(d).time_since_epoch())
      .count();
}

std::int64_t parse_timestamp(std::string_view iso) {
  // date part, then 'T' or ' ', then HH:MM with optional :SS
  if (iso.size() < 16 || (iso[10] != 'T' && iso[10] != ' ')) {
    throw ValidationError("expected ISO-8601 timestamp, got '" + std::string(iso) + "'");
  }
  Date d = Date::parse(iso.substr(0, 10));
  if (iso[13] != ':') {
    throw ValidationError("expected HH:MM in timestamp '" + std::string(iso) + "'");
  }
  int hh = parse_int(iso, 11, 2, "hour");
  int mm = parse_int(iso, 14, 2, "minute");
  int ss = 0;
  if (iso.size() > 16) {
    if (iso.size() != 19 || iso[16] != ':') {
      throw ValidationError("expected HH:MM:SS in timestamp '" + std::string(iso) + "'");
    }
    ss = parse_int(iso, 17, 2, "second");
  }
  if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 59) {
    throw ValidationError("time of day out of range in '" + std::string(iso) + "'");
  }
  return day_start_epoch(d) + hh * 3600 + mm * 60 + ss;
}

}  // namespace hems
