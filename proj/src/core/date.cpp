#include "loadscope/date.hpp"

#include <charconv>
#include <cstdio>

#include "loadscope/errors.hpp"

namespace loadscope {

namespace {

int parse_int(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::InvalidArgument, "malformed date/time '" + std::string(whole) + "'");
  }
  return value;
}

std::chrono::year_month_day ymd_of(std::chrono::sys_days d) { return std::chrono::year_month_day{d}; }

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) {
    throw Error(Errc::InvalidArgument,
                "invalid calendar date " + std::to_string(year) + "-" + std::to_string(month) + "-" +
                    std::to_string(day));
  }
  days_ = std::chrono::sys_days{ymd};
}

Date Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(Errc::InvalidArgument, "malformed date '" + std::string(text) + "'");
  }
  int y = parse_int(text.substr(0, 4), text);
  int m = parse_int(text.substr(5, 2), text);
  int d = parse_int(text.substr(8, 2), text);
  if (m < 1 || d < 1) throw Error(Errc::InvalidArgument, "malformed date '" + std::string(text) + "'");
  return Date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

int Date::year() const { return static_cast<int>(ymd_of(days_).year()); }
unsigned Date::month() const { return static_cast<unsigned>(ymd_of(days_).month()); }
unsigned Date::day() const { return static_cast<unsigned>(ymd_of(days_).day()); }

unsigned Date::weekday_index() const {
  // iso_encoding: Monday = 1 ... Sunday = 7
  return std::chrono::weekday{days_}.iso_encoding() - 1;
}

unsigned Date::day_of_year() const {
  Date jan1(year(), 1, 1);
  return static_cast<unsigned>((*this - jan1) + 1);
}

unsigned Date::days_in_year() const {
  return std::chrono::year{year()}.is_leap() ? 366u : 365u;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

HourStamp HourStamp::parse(std::string_view text) {
  // 2023-01-01T00:00:00Z
  if (text.size() != 20 || text[10] != 'T' || text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    throw Error(Errc::InvalidArgument, "malformed timestamp '" + std::string(text) + "'");
  }
  Date d = Date::parse(text.substr(0, 10));
  int h = parse_int(text.substr(11, 2), text);
  int mi = parse_int(text.substr(14, 2), text);
  int s = parse_int(text.substr(17, 2), text);
  if (h < 0 || h > 23 || mi != 0 || s != 0) {
    throw Error(Errc::InvalidArgument, "timestamp not on an hour boundary '" + std::string(text) + "'");
  }
  return from(d, h);
}

Date HourStamp::date() const {
  std::int64_t day = hours >= 0 ? hours / 24 : -((-hours + 23) / 24);
  return Date(std::chrono::sys_days{std::chrono::days{day}});
}

int HourStamp::hour() const { return static_cast<int>(hours - date().serial() * 24); }

std::string HourStamp::to_string() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "T%02d", hour());
  return date().to_string() + buf + ":00:00Z";
}

}  // namespace loadscope
