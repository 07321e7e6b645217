#pragma once

#include "drkit/types.hpp"

#include <span>

namespace drkit {

enum class Metric { euclidean, manhattan };

const char* metric_name(Metric m) noexcept;

double euclidean(std::span<const double> a, std::span<const double> b);
double manhattan(std::span<const double> a, std::span<const double> b);
double distance(Metric m, std::span<const double> a, std::span<const double> b);

/// Exact k-nearest-neighbor lists. Row i holds its k nearest other rows with
/// distances ascending; equal distances are ordered by row index.
struct NeighborGraph {
  int k = 0;
  Eigen::MatrixXi indices;  // n x k
  Matrix distances;         // n x k
  Metric metric = Metric::euclidean;

  Eigen::Index rows() const { return indices.rows(); }
};

/// Brute-force O(n^2 p) search over the rows of `x`.
NeighborGraph knn_exact(const Matrix& x, int k, Metric metric = Metric::euclidean);
NeighborGraph knn_exact(const DataMatrix& data, int k, Metric metric = Metric::euclidean);

/// Full symmetric pairwise distance matrix of the rows of `x`.
Matrix pairwise_distances(const Matrix& x, Metric metric = Metric::euclidean);

}  // namespace drkit
