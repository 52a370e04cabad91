#include "loadscope/features.hpp"

namespace loadscope {

Climatology Climatology::fit(const HourlySeries& temperature, DateRange train) {
  Climatology c;
  std::array<double, 12 * 24> sums{};
  for (Date d = train.first; d <= train.last; ++d) {
    if (!temperature.covers_day(d)) continue;
    auto profile = temperature.day_profile(d);
    for (int h = 0; h < kHoursPerDay; ++h) {
      std::size_t slot = (d.month() - 1) * 24 + static_cast<std::size_t>(h);
      sums[slot] += profile[static_cast<std::size_t>(h)];
      ++c.counts_[slot];
    }
  }
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (c.counts_[i] > 0) c.means_[i] = sums[i] / c.counts_[i];
  }
  return c;
}

double Climatology::at(unsigned month, int hour) const {
  if (month < 1 || month > 12 || hour < 0 || hour >= kHoursPerDay) {
    throw Error(Errc::InvalidArgument, "month/hour out of range");
  }
  if (!has(month, hour)) {
    throw Error(Errc::NoObservations, "month " + std::to_string(month) + " hour " + std::to_string(hour));
  }
  return means_[(month - 1) * 24 + static_cast<std::size_t>(hour)];
}

double Climatology::nearest(unsigned month, int hour) const {
  if (month < 1 || month > 12 || hour < 0 || hour >= kHoursPerDay) {
    throw Error(Errc::InvalidArgument, "month/hour out of range");
  }
  for (unsigned step = 0; step <= 6; ++step) {
    unsigned earlier = (month + 11 - step) % 12 + 1;
    if (has(earlier, hour)) return means_[(earlier - 1) * 24 + static_cast<std::size_t>(hour)];
    unsigned later = (month - 1 + step) % 12 + 1;
    if (has(later, hour)) return means_[(later - 1) * 24 + static_cast<std::size_t>(hour)];
  }
  throw Error(Errc::NoObservations, "hour " + std::to_string(hour) + " never observed");
}

double climatological_temperature(const AlignedPanel& panel, const std::string& city, unsigned month, int hour,
                                  DateRange train) {
  auto it = panel.temperature.find(city);
  if (it == panel.temperature.end()) throw Error(Errc::UnmappedRegion, "unknown city '" + city + "'");
  return Climatology::fit(it->second, train).at(month, hour);
}

}  // namespace loadscope
