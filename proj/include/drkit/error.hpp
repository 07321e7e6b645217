#pragma once

#include <stdexcept>
#include <string>

namespace drkit {

/// Failure classes. The CLI maps these onto exit codes (usage 1, data 2, numeric 3).
enum class ErrorCategory { usage, data, numeric };

enum class ErrorCode {
  // usage
  bad_config,
  bad_fractions,
  k_too_large,
  dimension_mismatch,
  length_mismatch,
  bad_layer,
  // data
  io,
  missing_column,
  parse_error,
  missing_data,
  constant_feature,
  all_missing_row,
  all_missing_feature,
  degenerate_matrix,
  single_class_data,
  // numeric
  singular_local_system,
  eigen_failure,
  calibration_failure,
  numerical_divergence,
};

ErrorCategory category_of(ErrorCode code) noexcept;
const char* name_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(name_of(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace drkit
