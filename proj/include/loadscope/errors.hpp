#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace loadscope {

/// Every failure the toolkit reports. The CLI maps the category of a code to
/// its exit status (config 2, data 3, internal 4).
enum class Errc {
  // core-data
  ConstantColumn,
  NonFinite,
  ColumnMismatch,
  EmptyPartition,
  InvalidArgument,
  // ingestion
  SchemaError,
  GapTooLarge,
  UnmappedRegion,
  FileNotFound,
  InvalidSpec,
  // features
  InsufficientHistory,
  MissingCentroids,
  NoObservations,
  TooFewFeatures,
  TooFewMerges,
  BadK,
  // gbdt
  EmptyData,
  EmptySpace,
  ModelFormat,
  // baselines
  MissingDay,
  NoHistory,
  NotConverged,
  Misaligned,
  // evaluation / diagnostics
  ZeroTruth,
  NonPositiveSigma,
  KeyMismatch,
  TooFewModels,
  TooFewTasks,
  TooFew,
  LengthMismatch,
  // causality
  TooShort,
  ConstantSeries,
  DegenerateTreatment,
  // attribution
  MissingCovers,
  BadFeature,
  // cli
  ConfigError,
  ModelNotFound,
  DateOutOfRange,
  Internal,
};

enum class ErrorCategory { Config, Data, Internal };

std::string_view errc_name(Errc code);
ErrorCategory errc_category(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return errc_category(code_); }

 private:
  Errc code_;
};

}  // namespace loadscope
