#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace loadscope {

/// Calendar day (UTC). Ordered, hashable, and cheap to copy.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  /// Parses YYYY-MM-DD. Throws Error(InvalidArgument) on malformed input.
  static Date parse(std::string_view text);

  std::chrono::sys_days sys_days() const { return days_; }
  std::int64_t serial() const { return days_.time_since_epoch().count(); }

  int year() const;
  unsigned month() const;
  unsigned day() const;
  /// Monday = 0 ... Sunday = 6.
  unsigned weekday_index() const;
  bool is_weekend() const { return weekday_index() >= 5; }
  /// 1-based day of year.
  unsigned day_of_year() const;
  unsigned days_in_year() const;

  Date operator+(std::int64_t n) const { return Date(days_ + std::chrono::days(n)); }
  Date operator-(std::int64_t n) const { return Date(days_ - std::chrono::days(n)); }
  std::int64_t operator-(Date other) const { return (days_ - other.days_).count(); }
  Date& operator++() {
    days_ += std::chrono::days(1);
    return *this;
  }

  auto operator<=>(const Date&) const = default;

  std::string to_string() const;

 private:
  std::chrono::sys_days days_{};
};

/// Inclusive day interval; empty when last < first.
struct DateRange {
  Date first;
  Date last;

  bool contains(Date d) const { return first <= d && d <= last; }
  bool empty() const { return last < first; }
  std::int64_t days() const { return empty() ? 0 : (last - first) + 1; }
  auto operator<=>(const DateRange&) const = default;
};

/// UTC hour instant, stored as whole hours since the Unix epoch.
struct HourStamp {
  std::int64_t hours = 0;

  static HourStamp from(Date d, int hour) { return {d.serial() * 24 + hour}; }
  /// Parses `YYYY-MM-DDTHH:MM:SSZ` (minutes and seconds must be zero).
  static HourStamp parse(std::string_view text);

  Date date() const;
  int hour() const;
  std::string to_string() const;
  auto operator<=>(const HourStamp&) const = default;
};

}  // namespace loadscope
