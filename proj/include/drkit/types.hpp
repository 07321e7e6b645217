#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace drkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MissingMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// n x p numeric table. Missing cells are flagged in `missing` and hold NaN in
/// `values`; every other cell is finite.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> feature_names;
  MissingMask missing;

  DataMatrix() = default;
  DataMatrix(Matrix v, std::vector<std::string> names);
  DataMatrix(Matrix v, std::vector<std::string> names, MissingMask mask);

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  bool has_missing() const { return missing.size() > 0 && missing.any(); }

  /// Index of a named feature, or -1.
  int feature_index(const std::string& name) const;

  /// Rows picked by index, in the given order.
  DataMatrix select_rows(const std::vector<int>& rows) const;

  /// Throws Error(missing_data) if any cell is missing.
  void require_complete() const;
};

/// Default names "V1".."Vp".
std::vector<std::string> default_feature_names(Eigen::Index p);

/// n x d coordinates produced by one of the reducers.
struct Embedding {
  Matrix coords;
  std::optional<std::vector<int>> labels;
  std::string algo_tag;

  Eigen::Index rows() const { return coords.rows(); }
  Eigen::Index dims() const { return coords.cols(); }
};

}  // namespace drkit
