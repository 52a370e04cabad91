#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "loadscope/features.hpp"

namespace loadscope {

namespace {

std::string hour_name(const char* prefix, int h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_h%02d", prefix, h);
  return buf;
}

}  // namespace

void FeatureSpec::validate() const {
  if (social_k && *social_k < 2) throw Error(Errc::InvalidArgument, "social_k must be >= 2");
  if (text_smoothing_window < 1) throw Error(Errc::InvalidArgument, "text_smoothing_window must be >= 1");
}

std::string FeatureSpec::variant_name() const {
  std::string name = "GBM";
  if (use_economics || use_social) name += "-";
  if (use_economics) name += "E";
  if (use_social) name += "S";
  return name;
}

FeatureSpec FeatureSpec::from_variant(const std::string& name) {
  FeatureSpec spec;
  if (name == "GBM") return spec;
  if (name == "GBM-E") {
    spec.use_economics = true;
  } else if (name == "GBM-S") {
    spec.use_social = true;
  } else if (name == "GBM-ES") {
    spec.use_economics = spec.use_social = true;
  } else {
    throw Error(Errc::ConfigError, "unknown model variant '" + name + "'");
  }
  return spec;
}

HolidayClasses HolidayClasses::from_calendar(const std::vector<Holiday>& holidays) {
  std::set<std::string> unique;
  for (const auto& h : holidays) unique.insert(h.name);
  HolidayClasses out;
  for (const auto& name : unique) {
    if (out.names.size() == kHolidayDummies) break;
    out.names.push_back(name);
  }
  return out;
}

int HolidayClasses::slot_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

std::string HolidayClasses::column_name(int slot) const {
  if (slot < static_cast<int>(names.size())) return "holiday_" + names[static_cast<std::size_t>(slot)];
  char buf[32];
  std::snprintf(buf, sizeof buf, "holiday_unused_%02d", slot);
  return buf;
}

FeatureContext FeatureContext::fit(const AlignedPanel& panel, DateRange train, std::vector<DailyFeatureSeries> centroids) {
  FeatureContext ctx;
  for (const auto& region : panel.regions()) {
    ctx.climatology.emplace(region, Climatology::fit(panel.temperature_of_region(region), train));
  }
  ctx.holidays = HolidayClasses::from_calendar(panel.holidays);
  ctx.centroids = std::move(centroids);
  return ctx;
}

std::vector<std::string> feature_names(const FeatureSpec& spec, const FeatureContext& context) {
  std::vector<std::string> names;
  for (int h = 0; h < kHoursPerDay; ++h) names.push_back(hour_name("lag", h));
  names.push_back("target_weekend");
  for (int s = 0; s < kHolidayDummies; ++s) names.push_back(context.holidays.column_name(s));
  names.insert(names.end(), {"dow_sin", "dow_cos", "doy_sin", "doy_cos"});
  for (int h = 0; h < kHoursPerDay; ++h) names.push_back(hour_name("clim_temp", h));
  if (spec.use_economics) {
    for (const auto& c : kEconomicsColumns) names.push_back("econ_" + c);
  }
  if (spec.use_social) {
    for (const auto& c : context.centroids) names.push_back("social_" + c.name);
  }
  return names;
}

std::vector<double> build_feature_row(const AlignedPanel& panel, const std::string& region, int horizon,
                                      const FeatureSpec& spec, const FeatureContext& context, Date d,
                                      Provenance* provenance) {
  Date latest = d - 100000;
  auto touch = [&](Date source) { latest = std::max(latest, source); };
  if (horizon < 1 || horizon > kMaxHorizon) throw Error(Errc::InvalidArgument, "horizon must be in [1, 30]");
  const HourlyDemandSeries& demand = panel.demand_of(region);
  if (!demand.covers_day(d)) throw Error(Errc::InsufficientHistory, d.to_string());
  const Date target = d + horizon;
  std::vector<double> row;
  row.reserve(kBaseFeatureCount + 3 + context.centroids.size());

  auto lags = demand.day_profile(d);
  touch(d);
  row.insert(row.end(), lags.begin(), lags.end());

  row.push_back(target.is_weekend() ? 1.0 : 0.0);
  std::array<double, kHolidayDummies> dummies{};
  for (const auto& h : panel.holidays) {
    if (h.region == region && h.date == target) {
      int slot = context.holidays.slot_of(h.name);
      if (slot >= 0) dummies[static_cast<std::size_t>(slot)] = 1.0;
    }
  }
  row.insert(row.end(), dummies.begin(), dummies.end());

  const double two_pi = 2.0 * std::numbers::pi;
  double dow = two_pi * target.weekday_index() / 7.0;
  double doy = two_pi * (target.day_of_year() - 1.0) / target.days_in_year();
  row.insert(row.end(), {std::sin(dow), std::cos(dow), std::sin(doy), std::cos(doy)});

  const Climatology& clim = context.climatology.at(region);
  for (int h = 0; h < kHoursPerDay; ++h) row.push_back(clim.nearest(target.month(), h));

  if (spec.use_economics) {
    if (panel.economics.table.cols() != 3) throw Error(Errc::MissingCentroids, "economics requested but not loaded");
    if (!panel.economics.covers(d)) throw Error(Errc::InsufficientHistory, d.to_string());
    auto econ = panel.economics.table.values.row(panel.economics.row_of(d));
    touch(d);
    row.insert(row.end(), econ.begin(), econ.end());
  }
  if (spec.use_social) {
    if (context.centroids.empty()) throw Error(Errc::MissingCentroids, "social features requested without centroids");
    const int w = spec.text_smoothing_window;
    for (const auto& c : context.centroids) {
      if (!c.covers(d) || !c.covers(d - (w - 1))) throw Error(Errc::InsufficientHistory, d.to_string());
      double acc = 0.0;
      for (int k = 0; k < w; ++k) {
        acc += c.at(d - k);
        touch(d - k);
      }
      row.push_back(acc / w);
    }
  }
  if (provenance) provenance->max_source_date = latest;
  return row;
}

DesignMatrix build_design_matrix(const AlignedPanel& panel, const std::string& region, int horizon,
                                 const FeatureSpec& spec, const FeatureContext& context) {
  spec.validate();
  if (horizon < 1 || horizon > kMaxHorizon) throw Error(Errc::InvalidArgument, "horizon must be in [1, 30]");
  if (spec.use_social && context.centroids.empty()) {
    throw Error(Errc::MissingCentroids, "social features requested without centroids");
  }
  const HourlyDemandSeries& demand = panel.demand_of(region);
  DesignMatrix out;
  out.region = region;
  out.horizon = horizon;
  out.features.names = feature_names(spec, context);
  out.features.values = Matrix(0, out.features.names.size());
  out.targets = Matrix(0, kHoursPerDay);
  const Date first = panel.span.first + (spec.use_social ? spec.text_smoothing_window - 1 : 0);
  for (Date d = first; d + horizon <= panel.span.last; ++d) {
    Provenance prov;
    out.features.values.append_row(build_feature_row(panel, region, horizon, spec, context, d, &prov));
    out.targets.append_row(demand.day_profile(d + horizon));
    out.issue_dates.push_back(d);
    out.provenance.push_back(prov);
  }
  return out;
}

}  // namespace loadscope
