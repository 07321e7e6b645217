#include "drkit/lle.hpp"

#include "drkit/error.hpp"
#include "drkit/metrics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace drkit {

Matrix LleWeights::dense() const {
  const Eigen::Index n = rows();
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index m = 0; m < neighbors.cols(); ++m) w(i, neighbors(i, m)) += weights(i, m);
  }
  return w;
}

LleWeights lle_weights(const Matrix& x, const NeighborGraph& graph, double regularization) {
  const Eigen::Index n = x.rows();
  if (graph.rows() != n) throw Error(ErrorCode::dimension_mismatch, "neighbor graph does not match data rows");
  if (!x.allFinite()) throw Error(ErrorCode::missing_data, "LLE needs complete, finite data");
  const int k = graph.k;
  LleWeights out;
  out.neighbors = graph.indices;
  out.weights.resize(n, k);
  out.regularization = regularization;

  Matrix z(k, x.cols());
  double rss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int m = 0; m < k; ++m) {
      const int j = graph.indices(i, m);
      if (j == i) throw Error(ErrorCode::bad_config, "neighbor graph contains a self-neighbor");
      z.row(m) = x.row(j) - x.row(i);
    }
    Matrix g = z * z.transpose();
    const double trace = g.trace();
    g.diagonal().array() += regularization * (trace > 0.0 ? trace : 1.0);

    Eigen::LDLT<Matrix> ldlt(g);
    Vector w;
    if (ldlt.info() == Eigen::Success) w = ldlt.solve(Vector::Ones(k));
    if (ldlt.info() != Eigen::Success || !w.allFinite()) {
      w = g.colPivHouseholderQr().solve(Vector::Ones(k));
    }
    const double sum = w.sum();
    if (!w.allFinite() || std::abs(sum) < 1e-300) {
      throw Error(ErrorCode::singular_local_system, "local Gram system for row " + std::to_string(i) + " is singular");
    }
    w /= sum;
    out.weights.row(i) = w.transpose();
    // x_i - sum_j w_j x_j = -sum_j w_j (x_j - x_i) because the weights sum to one.
    rss += (w.transpose() * z).squaredNorm();
  }
  out.rss = rss / static_cast<double>(n);
  return out;
}

Embedding lle_embed(const LleWeights& weights, int d) {
  const Eigen::Index n = weights.rows();
  if (d < 1 || d >= n) throw Error(ErrorCode::dimension_mismatch, "embedding dimension must lie in [1, n-1]");
  Matrix iw = Matrix::Identity(n, n) - weights.dense();
  Matrix cost = iw.transpose() * iw;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cost);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::eigen_failure, "eigendecomposition of the LLE cost failed");

  Embedding e;
  e.algo_tag = "lle";
  e.coords = eig.eigenvectors().middleCols(1, d) * std::sqrt(static_cast<double>(n));
  for (int c = 0; c < d; ++c) {
    Eigen::Index arg = 0;
    e.coords.col(c).cwiseAbs().maxCoeff(&arg);
    if (e.coords(arg, c) < 0) e.coords.col(c) *= -1.0;
  }
  return e;
}

LleModel lle_fit(const Matrix& x, int k, int d, double regularization) {
  LleModel model;
  model.k = k;
  model.weights = lle_weights(x, knn_exact(x, k), regularization);
  model.embedding = lle_embed(model.weights, d);
  return model;
}

KScanResult calc_k(const Matrix& x, const std::vector<int>& ks, int d, std::size_t max_pairs, std::uint64_t seed) {
  if (ks.empty()) throw Error(ErrorCode::bad_config, "calc_k needs at least one candidate k");
  KScanResult result;
  double best = 2.0;
  for (int k : ks) {
    KScanEntry entry;
    entry.k = k;
    try {
      if (k < 1 || k > x.rows() - 1) throw Error(ErrorCode::k_too_large, "k out of range");
      const LleModel model = lle_fit(x, k, d);
      const RhoResult rho = rho_projection(x, model.embedding.coords, max_pairs, seed);
      entry.rho = rho.rho;
      entry.score = rho.one_minus_rho_sq;
      entry.ok = true;
      if (entry.score < best) {
        best = entry.score;
        result.best_k = k;
      } else if (entry.score == best && k < result.best_k) {
        result.best_k = k;
      }
    } catch (const Error& e) {
      entry.error = e.what();
    }
    result.entries.push_back(entry);
  }
  if (result.best_k == 0) throw Error(ErrorCode::eigen_failure, "LLE failed for every candidate k");
  return result;
}

}  // namespace drkit
