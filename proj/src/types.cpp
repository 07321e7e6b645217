#include "drkit/types.hpp"

#include "drkit/error.hpp"

namespace drkit {

DataMatrix::DataMatrix(Matrix v, std::vector<std::string> names)
    : values(std::move(v)), feature_names(std::move(names)) {
  missing = MissingMask::Constant(values.rows(), values.cols(), false);
  if (static_cast<Eigen::Index>(feature_names.size()) != values.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "feature name count does not match column count");
  }
}

DataMatrix::DataMatrix(Matrix v, std::vector<std::string> names, MissingMask mask)
    : values(std::move(v)), feature_names(std::move(names)), missing(std::move(mask)) {
  if (static_cast<Eigen::Index>(feature_names.size()) != values.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "feature name count does not match column count");
  }
  if (missing.rows() != values.rows() || missing.cols() != values.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "missing mask shape does not match values");
  }
}

int DataMatrix::feature_index(const std::string& name) const {
  for (std::size_t j = 0; j < feature_names.size(); ++j) {
    if (feature_names[j] == name) return static_cast<int>(j);
  }
  return -1;
}

DataMatrix DataMatrix::select_rows(const std::vector<int>& rows) const {
  Matrix v(static_cast<Eigen::Index>(rows.size()), cols());
  MissingMask m(static_cast<Eigen::Index>(rows.size()), cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    v.row(static_cast<Eigen::Index>(r)) = values.row(rows[r]);
    if (missing.size() > 0) {
      m.row(static_cast<Eigen::Index>(r)) = missing.row(rows[r]);
    } else {
      m.row(static_cast<Eigen::Index>(r)).setConstant(false);
    }
  }
  return DataMatrix(std::move(v), feature_names, std::move(m));
}

void DataMatrix::require_complete() const {
  if (has_missing()) {
    throw Error(ErrorCode::missing_data, "data contains missing cells; impute first");
  }
}

std::vector<std::string> default_feature_names(Eigen::Index p) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("V" + std::to_string(j + 1));
  return names;
}

}  // namespace drkit
