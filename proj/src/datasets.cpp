#include "drkit/datasets.hpp"

#include "drkit/error.hpp"
#include "drkit/random.hpp"

#include <cmath>
#include <numbers>

namespace drkit {

SCurve make_s_curve(int n, double noise, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::bad_config, "make_s_curve needs n >= 1");
  if (!(noise >= 0.0)) throw Error(ErrorCode::bad_config, "noise must be nonnegative");
  RngStream rng(seed);
  Matrix x(n, 3);
  Vector arc(n);
  for (int i = 0; i < n; ++i) {
    const double t = 3.0 * std::numbers::pi * (rng.uniform() - 0.5);
    const double y = 2.0 * rng.uniform();
    const double sign = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
    arc[i] = t;
    x(i, 0) = std::sin(t);
    x(i, 1) = y;
    x(i, 2) = sign * (std::cos(t) - 1.0);
  }
  if (noise > 0.0) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 3; ++j) x(i, j) += noise * rng.normal();
    }
  }
  return {DataMatrix(std::move(x), {"x", "y", "z"}), std::move(arc)};
}

LabeledData make_gaussian_clusters(int n_per, const std::vector<Vector>& centers, double sd,
                                   std::uint64_t seed) {
  if (centers.size() < 2) throw Error(ErrorCode::bad_config, "need at least two centers");
  if (n_per < 1) throw Error(ErrorCode::bad_config, "n_per must be positive");
  if (!(sd >= 0.0)) throw Error(ErrorCode::bad_config, "sd must be nonnegative");
  const Eigen::Index p = centers.front().size();
  for (const auto& c : centers) {
    if (c.size() != p) throw Error(ErrorCode::dimension_mismatch, "centers differ in dimension");
  }
  RngStream rng(seed);
  const Eigen::Index n = static_cast<Eigen::Index>(n_per) * static_cast<Eigen::Index>(centers.size());
  Matrix x(n, p);
  std::vector<int> labels(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < n_per; ++i, ++row) {
      for (Eigen::Index j = 0; j < p; ++j) {
        x(row, j) = sd > 0.0 ? centers[c][j] + sd * rng.normal() : centers[c][j];
      }
      labels[static_cast<std::size_t>(row)] = static_cast<int>(c);
    }
  }
  return {DataMatrix(std::move(x), default_feature_names(p)), std::move(labels)};
}

}  // namespace drkit
