#include "drkit/error.hpp"

namespace drkit {

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::bad_config:
    case ErrorCode::bad_fractions:
    case ErrorCode::k_too_large:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::length_mismatch:
    case ErrorCode::bad_layer:
      return ErrorCategory::usage;
    case ErrorCode::io:
    case ErrorCode::missing_column:
    case ErrorCode::parse_error:
    case ErrorCode::missing_data:
    case ErrorCode::constant_feature:
    case ErrorCode::all_missing_row:
    case ErrorCode::all_missing_feature:
    case ErrorCode::degenerate_matrix:
    case ErrorCode::single_class_data:
      return ErrorCategory::data;
    case ErrorCode::singular_local_system:
    case ErrorCode::eigen_failure:
    case ErrorCode::calibration_failure:
    case ErrorCode::numerical_divergence:
      return ErrorCategory::numeric;
  }
  return ErrorCategory::data;
}

const char* name_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::bad_config: return "BadConfig";
    case ErrorCode::bad_fractions: return "BadFractions";
    case ErrorCode::k_too_large: return "KTooLarge";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::bad_layer: return "BadLayer";
    case ErrorCode::io: return "IoError";
    case ErrorCode::missing_column: return "MissingColumn";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::missing_data: return "MissingData";
    case ErrorCode::constant_feature: return "ConstantFeature";
    case ErrorCode::all_missing_row: return "AllMissingRow";
    case ErrorCode::all_missing_feature: return "AllMissingFeature";
    case ErrorCode::degenerate_matrix: return "DegenerateMatrix";
    case ErrorCode::single_class_data: return "SingleClassData";
    case ErrorCode::singular_local_system: return "SingularLocalSystem";
    case ErrorCode::eigen_failure: return "EigenFailure";
    case ErrorCode::calibration_failure: return "CalibrationFailure";
    case ErrorCode::numerical_divergence: return "NumericalDivergence";
  }
  return "Error";
}

}  // namespace drkit
