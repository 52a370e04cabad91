#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "loadscope/ingestion.hpp"
#include "loadscope/rng.hpp"
#include "loadscope/stats.hpp"

namespace loadscope {

std::vector<SyntheticRegion> SyntheticSpec::default_regions() {
  SyntheticRegion east{"east", "eastham", 2000.0, 400.0, 150.0, 30.0, 200.0, 15.0, 40.0, 0.0};
  SyntheticRegion west{"west", "westport", 1200.0, 250.0, 90.0, 20.0, 120.0, 10.0, 25.0, 1.5};
  return {east, west};
}

void SyntheticSpec::validate() const {
  if (days < 120) throw Error(Errc::InvalidSpec, "synthetic panel needs days >= 120");
  if (regions.empty()) throw Error(Errc::InvalidSpec, "no regions");
  if (driver_lag_days < 0) throw Error(Errc::InvalidSpec, "driver lag must be >= 0");
  if (regime_days < 1.0) throw Error(Errc::InvalidSpec, "regime_days must be >= 1");
  if (driver_copies < 0 || decoy_groups < 0 || decoy_copies < 1 || noise_features < 0) {
    throw Error(Errc::InvalidSpec, "feature counts must be non-negative");
  }
  if (copy_noise < 0.0 || std::abs(driver_ar_phi) >= 1.0 || std::abs(daily_noise_phi) >= 1.0) {
    throw Error(Errc::InvalidSpec, "noise scales must be >= 0 and AR coefficients in (-1, 1)");
  }
  for (const auto& r : regions) {
    if (r.name.empty() || r.city.empty() || r.base_mw <= 0.0 || r.hourly_noise_mw < 0.0 || r.daily_noise_mw < 0.0) {
      throw Error(Errc::InvalidSpec, "region '" + r.name + "' has invalid parameters");
    }
  }
}

namespace {

Date nth_monday(int year, unsigned month, int n) {
  Date d(year, month, 1);
  while (d.weekday_index() != 0) ++d;
  return d + 7 * (n - 1);
}

Date last_monday(int year, unsigned month) {
  Date d = (month == 12 ? Date(year + 1, 1, 1) : Date(year, month + 1, 1)) - 1;
  while (d.weekday_index() != 0) d = d - 1;
  return d;
}

std::vector<std::pair<Date, std::string>> holiday_calendar(int year) {
  return {{Date(year, 1, 1), "new_year"},
          {nth_monday(year, 5, 1), "early_may"},
          {last_monday(year, 5), "spring_bank"},
          {last_monday(year, 8), "summer_bank"},
          {Date(year, 12, 25), "christmas"},
          {Date(year, 12, 26), "boxing_day"}};
}

/// Piecewise-constant regimes plus a weighted AR(1) component.
std::vector<double> latent_factor(Rng& rng, std::size_t n, double regime_days, double ar_weight, double phi) {
  std::vector<double> out(n);
  double level = rng.normal();
  double ar = rng.normal() / std::sqrt(1.0 - phi * phi);
  for (std::size_t t = 0; t < n; ++t) {
    if (rng.uniform() < 1.0 / regime_days) level = rng.normal();
    ar = phi * ar + rng.normal();
    out[t] = level + ar_weight * ar;
  }
  return out;
}

double daily_shape(int hour) {
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (hour - 4) / 24.0)) - 0.5;
}

}  // namespace

SyntheticPanel generate_synthetic_panel(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto days = static_cast<std::size_t>(spec.days);
  const auto lag = static_cast<std::size_t>(spec.driver_lag_days);
  const Date start = spec.start;
  const Date end = start + (spec.days - 1);

  SyntheticPanel out;
  out.spec = spec;
  AlignedPanel& panel = out.panel;
  panel.span = {start, end};

  // Latent driver over [start - lag, end]; the textual table sees [start, end].
  std::vector<double> driver_full =
      latent_factor(rng, days + lag, spec.regime_days, spec.driver_ar_weight, spec.driver_ar_phi);
  std::vector<double> driver(driver_full.begin() + static_cast<std::ptrdiff_t>(lag), driver_full.end());
  out.truth.driver = {"driver", start, driver};

  struct Column {
    std::string name;
    int group;
    std::vector<double> values;
  };
  std::vector<Column> columns;
  columns.push_back({"driver", 0, driver});
  for (int c = 0; c < spec.driver_copies; ++c) {
    std::vector<double> v(days);
    for (std::size_t t = 0; t < days; ++t) v[t] = driver[t] + spec.copy_noise * rng.normal();
    columns.push_back({"driver_copy_" + std::to_string(c), 0, std::move(v)});
  }
  for (int g = 1; g <= spec.decoy_groups; ++g) {
    auto factor = latent_factor(rng, days, spec.regime_days, spec.driver_ar_weight, spec.driver_ar_phi);
    for (int c = 0; c < spec.decoy_copies; ++c) {
      std::vector<double> v(days);
      for (std::size_t t = 0; t < days; ++t) v[t] = factor[t] + spec.copy_noise * rng.normal();
      columns.push_back({"decoy" + std::to_string(g) + "_copy_" + std::to_string(c), g, std::move(v)});
    }
  }
  for (int c = 0; c < spec.noise_features; ++c) {
    std::vector<double> v(days);
    for (auto& x : v) x = rng.normal();
    columns.push_back({"noise_" + std::to_string(c), -1, std::move(v)});
  }
  std::sort(columns.begin(), columns.end(), [](const Column& a, const Column& b) { return a.name < b.name; });
  panel.textual.first = start;
  panel.textual.table.values = Matrix(days, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    panel.textual.table.names.push_back(columns[c].name);
    out.truth.text_groups.push_back(columns[c].group);
    for (std::size_t t = 0; t < days; ++t) panel.textual.table.values(t, c) = columns[c].values[t];
  }

  // Economics: GDP changes at quarter starts, the others monthly.
  panel.economics.first = start;
  panel.economics.table.names = kEconomicsColumns;
  panel.economics.table.values = Matrix(days, 3);
  double gdp = 100.0, inflation = 2.0, unemployment = 4.5;
  for (std::size_t t = 0; t < days; ++t) {
    Date d = start + static_cast<std::int64_t>(t);
    if (t == 0 || d.day() == 1) {
      inflation = 2.0 + 0.8 * (inflation - 2.0) + 0.3 * rng.normal();
      unemployment = std::max(2.0, unemployment + 0.1 * rng.normal());
      if (t == 0 || (d.month() - 1) % 3 == 0) gdp += 0.5 + rng.normal();
    }
    panel.economics.table.values(t, 0) = gdp;
    panel.economics.table.values(t, 1) = inflation;
    panel.economics.table.values(t, 2) = unemployment;
  }
  std::vector<double> gdp_col = panel.economics.table.values.column(0);
  double gdp_mean = stats::mean(gdp_col);
  double gdp_sd = std::sqrt(stats::variance(gdp_col));
  if (gdp_sd == 0.0) gdp_sd = 1.0;

  for (int year = start.year(); year <= end.year(); ++year) {
    for (const auto& [d, name] : holiday_calendar(year)) {
      if (!panel.span.contains(d)) continue;
      for (const auto& r : spec.regions) panel.holidays.push_back({r.name, d, name});
    }
  }
  std::sort(panel.holidays.begin(), panel.holidays.end());

  for (const auto& region : spec.regions) {
    panel.region_city[region.name] = region.city;
    HourlySeries temp{region.city, HourStamp::from(start, 0), std::vector<double>(days * kHoursPerDay)};
    if (!panel.temperature.contains(region.city)) {
      double anomaly = 0.0;
      for (std::size_t t = 0; t < days; ++t) {
        Date d = start + static_cast<std::int64_t>(t);
        anomaly = 0.7 * anomaly + 1.5 * rng.normal();
        double seasonal = 10.0 + region.climate_offset_c +
                          7.0 * std::sin(2.0 * std::numbers::pi * (d.day_of_year() - 105.0) / 365.25);
        for (int h = 0; h < kHoursPerDay; ++h) {
          double diurnal = 3.0 * std::sin(2.0 * std::numbers::pi * (h - 9) / 24.0);
          temp.values[t * kHoursPerDay + static_cast<std::size_t>(h)] = seasonal + diurnal + anomaly + 0.3 * rng.normal();
        }
      }
      panel.temperature[region.city] = temp;
    }
    const HourlySeries& temps = panel.temperature.at(region.city);

    HourlySeries demand{region.name, HourStamp::from(start, 0), std::vector<double>(days * kHoursPerDay)};
    double day_noise = 0.0;
    const double innovation = region.daily_noise_mw * std::sqrt(1.0 - spec.daily_noise_phi * spec.daily_noise_phi);
    for (std::size_t t = 0; t < days; ++t) {
      Date d = start + static_cast<std::int64_t>(t);
      day_noise = spec.daily_noise_phi * day_noise + innovation * rng.normal();
      bool holiday = panel.is_holiday(region.name, d);
      double level = region.base_mw - (d.is_weekend() ? region.weekend_drop_mw : 0.0) +
                     spec.beta_mw * driver_full[t] +  // driver dated d - lag
                     spec.econ_effect_mw * (panel.economics.table.values(t, 0) - gdp_mean) / gdp_sd + day_noise;
      for (int h = 0; h < kHoursPerDay; ++h) {
        std::size_t i = t * kHoursPerDay + static_cast<std::size_t>(h);
        double v = level + region.daily_amp_mw * daily_shape(h) -
                   region.heating_mw_per_c * std::max(0.0, 15.0 - temps.values[i]) +
                   region.hourly_noise_mw * rng.normal();
        if (holiday && h >= 7 && h <= 21) v -= region.holiday_dip_mw;
        demand.values[i] = std::max(v, 1.0);
      }
    }
    panel.demand[region.name] = std::move(demand);
  }
  return out;
}

}  // namespace loadscope
