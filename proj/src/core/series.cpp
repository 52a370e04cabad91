#include <algorithm>

#include "loadscope/core.hpp"

namespace loadscope {

bool HourlySeries::covers_day(Date d) const {
  HourStamp first = HourStamp::from(d, 0);
  return first >= start && first.hours + kHoursPerDay <= end().hours;
}

double HourlySeries::at(Date d, int hour) const {
  std::int64_t offset = HourStamp::from(d, hour).hours - start.hours;
  if (offset < 0 || offset >= static_cast<std::int64_t>(values.size())) {
    throw Error(Errc::MissingDay, name + " has no value at " + HourStamp::from(d, hour).to_string());
  }
  return values[static_cast<std::size_t>(offset)];
}

std::span<const double> HourlySeries::day_profile(Date d) const {
  if (!covers_day(d)) throw Error(Errc::MissingDay, name + " does not cover " + d.to_string());
  auto offset = static_cast<std::size_t>(HourStamp::from(d, 0).hours - start.hours);
  return {values.data() + offset, static_cast<std::size_t>(kHoursPerDay)};
}

Date HourlySeries::first_full_day() const {
  Date d = start.date();
  return start.hour() == 0 ? d : d + 1;
}

Date HourlySeries::last_full_day() const {
  HourStamp last{end().hours - 1};
  return last.hour() == kHoursPerDay - 1 ? last.date() : last.date() - 1;
}

DailyFeatureSeries DailyTable::series(std::size_t col) const {
  return {table.names.at(col), first, table.values.column(col)};
}

DailyTable DailyTable::slice(DateRange range) const {
  DailyTable out;
  out.table.names = table.names;
  if (days() == 0) return out;
  Date lo = std::max(range.first, first);
  Date hi = std::min(range.last, last());
  out.first = lo;
  out.table.values = Matrix(0, table.cols());
  for (Date d = lo; d <= hi; ++d) out.table.values.append_row(table.values.row(row_of(d)));
  return out;
}

void ProbForecastSet::validate() const {
  if (mu.rows() != sigma.rows() || mu.cols() != sigma.cols() || mu.rows() != days.size()) {
    throw Error(Errc::Misaligned, "forecast mean/sigma shapes differ");
  }
  for (double s : sigma.data()) {
    if (!(s > 0.0)) throw Error(Errc::NonPositiveSigma, "sigma must be > 0");
  }
}

}  // namespace loadscope
