#include "drkit/preprocess.hpp"

#include "drkit/error.hpp"
#include "drkit/random.hpp"

#include <algorithm>
#include <cmath>

namespace drkit {

Standardized standardize(const DataMatrix& data) {
  data.require_complete();
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  Vector centers(p);
  Vector scales(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto col = data.values.col(j);
    const double mean = col.mean();
    const double ss = (col.array() - mean).square().sum();
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    if (!(sd > 0.0)) {
      throw Error(ErrorCode::constant_feature, "feature '" + data.feature_names[j] + "' has zero variance");
    }
    centers[j] = mean;
    scales[j] = sd;
  }
  return {apply_standardization(data, centers, scales), centers, scales};
}

DataMatrix apply_standardization(const DataMatrix& data, const Vector& centers, const Vector& scales) {
  if (data.cols() != centers.size() || data.cols() != scales.size()) {
    throw Error(ErrorCode::dimension_mismatch, "standardization parameters do not match column count");
  }
  Matrix out = (data.values.rowwise() - centers.transpose()).array().rowwise() / scales.transpose().array();
  return DataMatrix(std::move(out), data.feature_names, data.missing);
}

std::array<std::vector<int>, 3> split_indices(int n, const SplitSpec& spec) {
  const double f[3] = {spec.train, spec.test, spec.validation};
  for (double v : f) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::bad_fractions, "fractions must be nonnegative");
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-12) {
    throw Error(ErrorCode::bad_fractions, "fractions must sum to 1");
  }
  if (n < 5) throw Error(ErrorCode::bad_fractions, "splitting needs at least 5 rows");

  const int n_test = static_cast<int>(std::floor(n * spec.test + 1e-9));
  const int n_val = static_cast<int>(std::floor(n * spec.validation + 1e-9));
  const int n_train = n - n_test - n_val;

  RngStream rng(spec.seed);
  const std::vector<int> perm = rng.permutation(n);
  std::array<std::vector<int>, 3> parts;
  parts[0].assign(perm.begin(), perm.begin() + n_train);
  parts[1].assign(perm.begin() + n_train, perm.begin() + n_train + n_test);
  parts[2].assign(perm.begin() + n_train + n_test, perm.end());
  for (auto& part : parts) std::sort(part.begin(), part.end());
  return parts;
}

Split split(const DataMatrix& data, const SplitSpec& spec) {
  auto idx = split_indices(static_cast<int>(data.rows()), spec);
  Split s;
  s.train = {data.select_rows(idx[0]), idx[0]};
  s.test = {data.select_rows(idx[1]), idx[1]};
  s.validation = {data.select_rows(idx[2]), idx[2]};
  return s;
}

}  // namespace drkit
