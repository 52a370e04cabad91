#include "loadscope/errors.hpp"

namespace loadscope {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::ConstantColumn: return "ConstantColumn";
    case Errc::NonFinite: return "NonFinite";
    case Errc::ColumnMismatch: return "ColumnMismatch";
    case Errc::EmptyPartition: return "EmptyPartition";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SchemaError: return "SchemaError";
    case Errc::GapTooLarge: return "GapTooLarge";
    case Errc::UnmappedRegion: return "UnmappedRegion";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::MissingCentroids: return "MissingCentroids";
    case Errc::NoObservations: return "NoObservations";
    case Errc::TooFewFeatures: return "TooFewFeatures";
    case Errc::TooFewMerges: return "TooFewMerges";
    case Errc::BadK: return "BadK";
    case Errc::EmptyData: return "EmptyData";
    case Errc::EmptySpace: return "EmptySpace";
    case Errc::ModelFormat: return "ModelFormat";
    case Errc::MissingDay: return "MissingDay";
    case Errc::NoHistory: return "NoHistory";
    case Errc::NotConverged: return "NotConverged";
    case Errc::Misaligned: return "Misaligned";
    case Errc::ZeroTruth: return "ZeroTruth";
    case Errc::NonPositiveSigma: return "NonPositiveSigma";
    case Errc::KeyMismatch: return "KeyMismatch";
    case Errc::TooFewModels: return "TooFewModels";
    case Errc::TooFewTasks: return "TooFewTasks";
    case Errc::TooFew: return "TooFew";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooShort: return "TooShort";
    case Errc::ConstantSeries: return "ConstantSeries";
    case Errc::DegenerateTreatment: return "DegenerateTreatment";
    case Errc::MissingCovers: return "MissingCovers";
    case Errc::BadFeature: return "BadFeature";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ModelNotFound: return "ModelNotFound";
    case Errc::DateOutOfRange: return "DateOutOfRange";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

ErrorCategory errc_category(Errc code) {
  switch (code) {
    case Errc::ConfigError:
    case Errc::InvalidSpec:
    case Errc::InvalidArgument:
    case Errc::EmptySpace:
      return ErrorCategory::Config;
    case Errc::Internal:
      return ErrorCategory::Internal;
    default:
      return ErrorCategory::Data;
  }
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

}  // namespace loadscope
