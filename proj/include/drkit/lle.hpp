#pragma once

#include "drkit/neighbors.hpp"
#include "drkit/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace drkit {

/// Reconstruction weights: row i is nonzero only on its k neighbors and sums to one.
struct LleWeights {
  Eigen::MatrixXi neighbors;  // n x k
  Matrix weights;             // n x k, aligned with `neighbors`
  double rss = 0.0;           // mean squared reconstruction error per row
  double regularization = 1e-3;

  Eigen::Index rows() const { return neighbors.rows(); }
  /// Dense n x n form (test/inspection helper).
  Matrix dense() const;
};

/// Solve (G + eps * tr(G) * I) w = 1 on each row's local Gram matrix G and
/// normalize w to sum to one.
LleWeights lle_weights(const Matrix& x, const NeighborGraph& graph, double regularization = 1e-3);

/// Bottom eigenvectors 2..d+1 of (I - W)^T (I - W), scaled by sqrt(n).
Embedding lle_embed(const LleWeights& weights, int d);

struct LleModel {
  int k = 0;
  LleWeights weights;
  Embedding embedding;
};

/// Neighbors, weights and embedding in one call.
LleModel lle_fit(const Matrix& x, int k, int d, double regularization = 1e-3);

struct KScanEntry {
  int k = 0;
  double rho = 0.0;
  double score = 1.0;  // 1 - rho^2
  bool ok = false;
  std::string error;
};

struct KScanResult {
  std::vector<KScanEntry> entries;
  int best_k = 0;
};

/// Fit LLE at every candidate k and score each by 1 - rho^2 between data-space
/// and embedding-space pairwise distances. best_k minimizes the score, lowest k on ties.
KScanResult calc_k(const Matrix& x, const std::vector<int>& ks, int d, std::size_t max_pairs = 2000,
                   std::uint64_t seed = 0);

}  // namespace drkit
