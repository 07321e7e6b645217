#include "drkit/neighbors.hpp"

#include "drkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drkit {

const char* metric_name(Metric m) noexcept { return m == Metric::euclidean ? "euclidean" : "manhattan"; }

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::length_mismatch, "vectors differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double manhattan(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::length_mismatch, "vectors differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

double distance(Metric m, std::span<const double> a, std::span<const double> b) {
  return m == Metric::euclidean ? euclidean(a, b) : manhattan(a, b);
}

namespace {

// Rows as contiguous arrays so the span-based metrics apply directly.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::span<const double> row_span(const RowMatrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

Matrix pairwise_distances(const Matrix& x, Metric metric) {
  const RowMatrix rm = x;
  const Eigen::Index n = x.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = distance(metric, row_span(rm, i), row_span(rm, j));
    }
  }
  return d;
}

NeighborGraph knn_exact(const Matrix& x, int k, Metric metric) {
  const Eigen::Index n = x.rows();
  if (k < 1 || k > n - 1) {
    throw Error(ErrorCode::k_too_large, "k=" + std::to_string(k) + " must lie in [1, n-1] with n=" + std::to_string(n));
  }
  if (!x.allFinite()) throw Error(ErrorCode::missing_data, "kNN search needs finite, complete data");
  const RowMatrix rm = x;
  NeighborGraph g;
  g.k = k;
  g.metric = metric;
  g.indices.resize(n, k);
  g.distances.resize(n, k);

  std::vector<double> d(static_cast<std::size_t>(n));
  std::vector<int> order(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      d[static_cast<std::size_t>(j)] = j == i ? 0.0 : distance(metric, row_span(rm, i), row_span(rm, j));
    }
    std::size_t pos = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) order[pos++] = static_cast<int>(j);
    }
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
      const double da = d[static_cast<std::size_t>(a)];
      const double db = d[static_cast<std::size_t>(b)];
      return da < db || (da == db && a < b);
    });
    for (int m = 0; m < k; ++m) {
      g.indices(i, m) = order[static_cast<std::size_t>(m)];
      g.distances(i, m) = d[static_cast<std::size_t>(order[static_cast<std::size_t>(m)])];
    }
  }
  return g;
}

NeighborGraph knn_exact(const DataMatrix& data, int k, Metric metric) {
  data.require_complete();
  return knn_exact(data.values, k, metric);
}

}  // namespace drkit
