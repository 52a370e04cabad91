#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "loadscope/core.hpp"

namespace loadscope {

struct Holiday {
  std::string region;
  Date date;
  std::string name;
  auto operator<=>(const Holiday&) const = default;
};

inline const std::vector<std::string> kEconomicsColumns{"gdp", "inflation", "unemployment"};

/// All inputs for one study, aligned to a common span of whole UTC days.
struct AlignedPanel {
  DateRange span;
  std::map<std::string, HourlyDemandSeries> demand;     // by region
  std::map<std::string, HourlySeries> temperature;      // by city, degrees C
  std::map<std::string, std::string> region_city;
  DailyTable textual;    // may have zero columns
  DailyTable economics;  // zero or three columns (gdp, inflation, unemployment)
  std::vector<Holiday> holidays;
  /// Interpolated hours per series name ("demand:<region>", "temperature:<city>").
  std::map<std::string, std::size_t> interpolated_hours;

  const HourlyDemandSeries& demand_of(const std::string& region) const;
  const HourlySeries& temperature_of_region(const std::string& region) const;
  std::vector<std::string> regions() const;
  bool is_holiday(const std::string& region, Date d) const;
  /// Holiday name for (region, d), empty when none.
  std::string holiday_name(const std::string& region, Date d) const;

  bool same_data(const AlignedPanel& other) const;
};

struct PanelPaths {
  std::filesystem::path demand;
  std::filesystem::path temperature;
  std::filesystem::path text_features;  // optional (empty path = none)
  std::filesystem::path econ;           // optional
  std::filesystem::path holidays;       // optional

  /// Conventional file names inside one directory; optional files that do
  /// not exist are left empty.
  static PanelPaths in_directory(const std::filesystem::path& dir);
};

struct LoadOptions {
  int max_gap_hours = 3;
};

AlignedPanel load_panel(const PanelPaths& paths, const std::map<std::string, std::string>& region_city,
                        const LoadOptions& options = {});

/// Writes the panel back as the five CSV inputs (daily econ rows, long-format text).
void write_panel(const AlignedPanel& panel, const std::filesystem::path& dir);

/// Fills gaps of at most `max_gap` consecutive hours by linear interpolation.
/// `points` must be sorted by time; returns a uniform series and the number
/// of interpolated hours. Throws Error(GapTooLarge) otherwise.
HourlySeries regularize_hourly(const std::string& name, const std::vector<std::pair<HourStamp, double>>& points,
                               int max_gap, std::size_t& interpolated);

/// Forward-fills publication-dated rows onto every day of `span`.
DailyTable forward_fill_daily(const std::vector<Date>& dates, const NamedMatrix& rows, DateRange span);

// ---------------------------------------------------------------------------
// Synthetic panels with planted structure.

struct SyntheticRegion {
  std::string name;
  std::string city;
  double base_mw = 2000.0;
  double daily_amp_mw = 400.0;
  double weekend_drop_mw = 150.0;
  double heating_mw_per_c = 30.0;
  double holiday_dip_mw = 200.0;
  double hourly_noise_mw = 15.0;
  double daily_noise_mw = 40.0;
  double climate_offset_c = 0.0;
};

struct SyntheticSpec {
  std::uint64_t seed = 7;
  int days = 730;
  Date start = Date(2020, 6, 1);
  std::vector<SyntheticRegion> regions = default_regions();
  double beta_mw = 50.0;        // demand response per unit of the planted driver
  int driver_lag_days = 1;
  double regime_days = 45.0;    // mean length of driver regimes
  double driver_ar_weight = 0.5;
  double driver_ar_phi = 0.5;
  int driver_copies = 3;        // redundant noisy copies of the driver
  double copy_noise = 0.3;
  int decoy_groups = 1;         // latent factors unrelated to demand
  int decoy_copies = 3;
  int noise_features = 4;
  double daily_noise_phi = 0.5;
  double econ_effect_mw = 0.0;  // demand response per unit of standardized GDP

  static std::vector<SyntheticRegion> default_regions();
  /// Throws Error(InvalidSpec) for days < 120, empty regions, negative scales.
  void validate() const;
};

struct SyntheticTruth {
  DailyFeatureSeries driver;
  /// Planted group per textual column: 0 = driver group, g >= 1 decoy g,
  /// -1 pure noise.
  std::vector<int> text_groups;
};

struct SyntheticPanel {
  AlignedPanel panel;
  SyntheticSpec spec;
  SyntheticTruth truth;
};

SyntheticPanel generate_synthetic_panel(const SyntheticSpec& spec);

}  // namespace loadscope
