#include "drkit/pca.hpp"

#include "drkit/error.hpp"
#include "drkit/preprocess.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace drkit {

Vector PcaModel::component_variances() const {
  return singular_values.array().square() / static_cast<double>(n_fit - 1);
}

PcaModel fit_pca(const DataMatrix& data, bool standardize_flag) {
  data.require_complete();
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (n < 2) throw Error(ErrorCode::degenerate_matrix, "PCA needs at least two rows");

  PcaModel model;
  model.n_fit = n;
  model.standardized = standardize_flag;
  model.feature_names = data.feature_names;

  Matrix x;
  if (standardize_flag) {
    auto s = standardize(data);
    model.centers = s.centers;
    model.scales = s.scales;
    x = std::move(s.data.values);
  } else {
    model.centers = data.values.colwise().mean().transpose();
    model.scales = Vector::Ones(p);
    x = data.values.rowwise() - model.centers.transpose();
  }

  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw Error(ErrorCode::eigen_failure, "SVD did not converge");

  model.loadings = svd.matrixV();
  model.singular_values = Vector::Zero(p);
  model.singular_values.head(svd.singularValues().size()) = svd.singularValues();

  for (Eigen::Index c = 0; c < p; ++c) {
    Eigen::Index arg = 0;
    model.loadings.col(c).cwiseAbs().maxCoeff(&arg);
    if (model.loadings(arg, c) < 0) model.loadings.col(c) *= -1.0;
  }
  return model;
}

Embedding transform(const PcaModel& model, const DataMatrix& data, Eigen::Index n_components) {
  if (data.cols() != model.features()) {
    throw Error(ErrorCode::dimension_mismatch, "data has " + std::to_string(data.cols()) + " features, model expects " +
                                                   std::to_string(model.features()));
  }
  if (n_components < 1 || n_components > model.features()) {
    throw Error(ErrorCode::dimension_mismatch, "n_components must lie in [1, p]");
  }
  data.require_complete();
  const DataMatrix scaled = apply_standardization(data, model.centers, model.scales);
  Embedding e;
  e.coords = scaled.values * model.loadings.leftCols(n_components);
  e.algo_tag = "pca";
  return e;
}

Matrix reconstruct_scaled(const PcaModel& model, const Matrix& scores) {
  return scores * model.loadings.leftCols(scores.cols()).transpose();
}

VarianceReport variance_report(const PcaModel& model) {
  const Vector sq = model.singular_values.array().square();
  const double total = sq.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::degenerate_matrix, "data has zero total variance");
  VarianceReport r;
  r.sdev = model.singular_values / std::sqrt(static_cast<double>(model.n_fit - 1));
  r.pve = sq / total;
  r.cpve.resize(r.pve.size());
  double run = 0.0;
  for (Eigen::Index i = 0; i < r.pve.size(); ++i) {
    run += r.pve[i];
    r.cpve[i] = run;
  }
  return r;
}

}  // namespace drkit
