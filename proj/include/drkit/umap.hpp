#pragma once

#include "drkit/neighbors.hpp"
#include "drkit/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace drkit {

struct UmapConfig {
  int k = 15;
  int epochs = 200;
  double min_dist = 0.1;
  double spread = 1.0;
  double learning_rate = 1.0;
  double negative_sample_rate = 5.0;
  double repulsion_strength = 1.0;
  int d = 2;
  std::uint64_t seed = 0;
};

struct SmoothKnn {
  double rho = 0.0;
  double sigma = 1.0;
  std::vector<double> memberships;
  int iterations = 0;
  bool degenerate = false;  // no bandwidth reaches the log2(k) target
};

/// rho = nearest distance; sigma solves sum_j exp(-max(0, d_j - rho) / sigma) = log2(k).
SmoothKnn smooth_knn(std::span<const double> sorted_distances);

/// Symmetric fuzzy graph: both (i, j) and (j, i) are stored with equal memberships.
struct FuzzyGraph {
  Eigen::Index n = 0;
  std::vector<int> head;
  std::vector<int> tail;
  std::vector<double> weight;
  Vector rho;
  Vector sigma;
  int degenerate_rows = 0;

  /// Membership of (i, j), 0 when absent.
  double membership(int i, int j) const;
};

/// Probabilistic t-conorm a + b - ab.
double fuzzy_union(double a, double b);

/// Directed memberships from the kNN graph, merged with the t-conorm.
FuzzyGraph fuzzy_union(const NeighborGraph& graph, const std::vector<SmoothKnn>& rows);

FuzzyGraph build_fuzzy_graph(const NeighborGraph& graph);

/// Sum of binary cross-entropy terms x_h log(x_h / x_l) + (1 - x_h) log((1 - x_h) / (1 - x_l)).
/// Both inputs are clamped to [1e-12, 1 - 1e-12].
double cross_entropy(std::span<const double> high, std::span<const double> low);

/// Cross-entropy over each undirected graph edge once, with low-dimensional
/// memberships 1 / (1 + a |y_i - y_j|^(2b)).
double cross_entropy(const FuzzyGraph& graph, const Matrix& y, double a, double b);

struct CurveParams {
  double a = 1.0;
  double b = 1.0;
};

/// Least-squares fit of 1 / (1 + a x^(2b)) to the piecewise target
/// (1 below min_dist, exp(-(x - min_dist) / spread) above) on [0, 3 spread].
CurveParams fit_ab(double min_dist, double spread);

struct UmapResult {
  Embedding embedding;
  FuzzyGraph graph;
  CurveParams curve;
};

/// Edge-sampled SGD with negative sampling, sequential and seeded.
UmapResult umap_run(const Matrix& x, const UmapConfig& cfg);

}  // namespace drkit
