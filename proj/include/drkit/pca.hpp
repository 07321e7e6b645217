#pragma once

#include "drkit/types.hpp"

namespace drkit {

/// Principal components of a centered (and optionally scaled) data matrix.
///
/// Loadings are the right singular vectors, one component per column, with
/// the sign fixed so that each column's largest-magnitude entry is positive.
/// Singular values are padded with zeros when n < p.
struct PcaModel {
  Matrix loadings;        // p x p, orthonormal columns
  Vector singular_values; // length p, descending
  Vector centers;
  Vector scales;          // all ones when fitted without standardization
  Eigen::Index n_fit = 0;
  bool standardized = true;
  std::vector<std::string> feature_names;

  Eigen::Index features() const { return loadings.rows(); }
  /// sigma_i^2 / (n - 1)
  Vector component_variances() const;
};

struct VarianceReport {
  Vector sdev;
  Vector pve;
  Vector cpve;
};

PcaModel fit_pca(const DataMatrix& data, bool standardize = true);

/// Scores on the first n_components components.
Embedding transform(const PcaModel& model, const DataMatrix& data, Eigen::Index n_components);

/// Map scores back to the centered/scaled feature space.
Matrix reconstruct_scaled(const PcaModel& model, const Matrix& scores);

VarianceReport variance_report(const PcaModel& model);

}  // namespace drkit
