#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loadscope/date.hpp"
#include "loadscope/errors.hpp"
#include "loadscope/matrix.hpp"

namespace loadscope {

inline constexpr int kHoursPerDay = 24;

/// Uniform hourly series starting at `start` (UTC). Used for regional demand
/// (MW, strictly positive) and city temperatures (degrees C).
struct HourlySeries {
  std::string name;
  HourStamp start;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  HourStamp end() const { return {start.hours + static_cast<std::int64_t>(values.size())}; }
  bool covers_day(Date d) const;
  double at(Date d, int hour) const;
  /// 24 values of one day; throws Error(MissingDay) when not covered.
  std::span<const double> day_profile(Date d) const;
  Date first_full_day() const;
  Date last_full_day() const;

  bool operator==(const HourlySeries&) const = default;
};

using HourlyDemandSeries = HourlySeries;

/// Daily series over consecutive calendar days.
struct DailyFeatureSeries {
  std::string name;
  Date first;
  std::vector<double> values;

  Date last() const { return first + static_cast<std::int64_t>(values.size()) - 1; }
  bool covers(Date d) const { return d >= first && d <= last(); }
  double at(Date d) const { return values.at(static_cast<std::size_t>(d - first)); }
  bool operator==(const DailyFeatureSeries&) const = default;
};

/// Wide daily table: row r is day `first + r`, columns are named features.
struct DailyTable {
  Date first;
  NamedMatrix table;

  std::size_t days() const { return table.rows(); }
  Date last() const { return first + static_cast<std::int64_t>(table.rows()) - 1; }
  bool covers(Date d) const { return days() > 0 && d >= first && d <= last(); }
  std::size_t row_of(Date d) const { return static_cast<std::size_t>(d - first); }
  DailyFeatureSeries series(std::size_t col) const;
  /// Rows for days within `range`, clipped to the table.
  DailyTable slice(DateRange range) const;
  bool operator==(const DailyTable& o) const {
    return first == o.first && table.names == o.table.names && table.values == o.table.values;
  }
};

/// Column-wise affine standardization fitted on training data (population std).
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<std::string> names, std::vector<double> means, std::vector<double> stds);

  /// Requires >= 2 rows and finite values; rejects zero-variance columns.
  static Standardizer fit(const NamedMatrix& matrix);

  /// Columns are bound by name and returned in fitted order; throws
  /// Error(ColumnMismatch) when a fitted column is missing.
  NamedMatrix apply(const NamedMatrix& matrix) const;
  NamedMatrix inverse(const NamedMatrix& matrix) const;

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stds() const { return stds_; }

  bool operator==(const Standardizer&) const = default;

 private:
  void check_columns(const NamedMatrix& matrix) const;

  std::vector<std::string> names_;
  std::vector<double> means_;
  std::vector<double> stds_;
};

struct SplitSpec {
  DateRange train;
  DateRange val;
  DateRange test;

  /// Throws Error(InvalidArgument) unless ranges are non-empty, disjoint and ordered.
  void validate() const;
  DateRange span() const { return {train.first, test.last}; }
};

/// One source-data provenance tag: the latest date any feature of a row read.
struct Provenance {
  Date max_source_date;
};

/// Per-(region, horizon) supervised table. Row r is issue day `issue_dates[r]`;
/// targets are the 24 hourly demands (MW) of issue day + horizon.
struct DesignMatrix {
  std::string region;
  int horizon = 1;
  std::vector<Date> issue_dates;
  NamedMatrix features;
  Matrix targets;  // rows x 24
  std::vector<Provenance> provenance;

  std::size_t rows() const { return issue_dates.size(); }
  DesignMatrix subset(std::span<const std::size_t> rows) const;
  /// Throws Error(Internal) if any row's provenance exceeds its issue day.
  void assert_no_leakage() const;
};

struct SplitResult {
  DesignMatrix train;
  DesignMatrix val;
  DesignMatrix test;
  std::size_t dropped = 0;
};

/// Partitions rows by issue date. Throws Error(EmptyPartition) naming the
/// first empty partition.
SplitResult split_by_dates(const DesignMatrix& matrix, const SplitSpec& spec);

/// Point forecasts in MW, one 24-vector per target day.
struct PointForecastSet {
  std::vector<Date> days;
  Matrix values;  // days x 24
};

/// Gaussian forecasts in MW; every sigma is strictly positive.
struct ProbForecastSet {
  std::vector<Date> days;
  Matrix mu;
  Matrix sigma;

  void validate() const;
};

}  // namespace loadscope
