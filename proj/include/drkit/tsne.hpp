#pragma once

#include "drkit/types.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace drkit {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct TsneConfig {
  double perplexity = 30.0;
  double theta = 0.5;  // 0 selects the exact O(n^2) gradient
  int max_iter = 1000;
  double learning_rate = 200.0;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iter = 250;
  double early_exaggeration = 12.0;
  int exaggeration_iters = 250;
  int d = 2;
  std::uint64_t seed = 0;
};

struct Calibration {
  double beta = 1.0;   // precision applied to squared distances
  double sigma = 1.0;  // Gaussian bandwidth, beta = 1 / (2 sigma^2)
  std::vector<double> probs;
  double perplexity = 0.0;  // 2^H of the returned distribution
  int iterations = 0;
};

/// Bisect the Gaussian precision until the conditional distribution over
/// `distances` has the requested perplexity (within 1e-5, at most 64 steps).
/// Throws calibration_failure when the target is outside the reachable range.
Calibration perplexity_calibration(std::span<const double> distances, double perplexity);

/// Row-conditional probabilities p_{j|i}. With `neighbors` < n-1 only that
/// many nearest rows are kept per row; otherwise every other row is used.
SparseRows conditional_affinities(const Matrix& x, double perplexity, int neighbors);

/// Symmetric joint probabilities (p_{j|i} + p_{i|j}) / 2n, floored at 1e-12
/// and renormalized so the whole matrix sums to one.
struct AffinityMatrix {
  SparseRows p;

  Eigen::Index size() const { return p.rows(); }
  double sum() const { return p.sum(); }
  Matrix dense() const { return Matrix(p); }
};

AffinityMatrix joint_affinities(const SparseRows& conditionals);

/// sum p log(p / q) with 0 log 0 = 0 (natural log).
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// KL(P || Q) where Q is the normalized Student-t kernel (1 + |y_i - y_j|^2)^-1.
double kl_divergence(const AffinityMatrix& p, const Matrix& y);

/// Exact gradient of KL(P || Q) with respect to the embedding. P entries are
/// multiplied by `exaggeration`. Optionally reports the (unexaggerated) KL.
Matrix tsne_gradient_exact(const AffinityMatrix& p, const Matrix& y, double exaggeration = 1.0,
                           double* kl = nullptr);

/// Barnes-Hut gradient for 2-D embeddings: a cell is summarized when
/// half_side / |y - center_of_mass| < theta. The KL output uses the approximate
/// normalizer.
Matrix tsne_gradient_bh(const AffinityMatrix& p, const Matrix& y, double theta, double exaggeration = 1.0,
                        double* kl = nullptr);

struct TsneResult {
  Embedding embedding;
  std::vector<double> kl_trace;  // one value per iteration
  std::vector<std::string> warnings;
};

/// Momentum gradient descent with per-coordinate gains, early exaggeration
/// and per-iteration re-centering.
TsneResult tsne_run(const Matrix& x, const TsneConfig& cfg);

}  // namespace drkit
