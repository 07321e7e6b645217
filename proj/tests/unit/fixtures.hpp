#pragma once

#include "drkit/random.hpp"
#include "drkit/types.hpp"

namespace drkit::testing {

inline Matrix random_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed, double sd = 1.0) {
  RngStream rng(seed);
  Matrix m(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = rng.normal(0.0, sd);
  }
  return m;
}

inline DataMatrix as_data(Matrix m) {
  const Eigen::Index p = m.cols();
  return DataMatrix(std::move(m), default_feature_names(p));
}

}  // namespace drkit::testing
