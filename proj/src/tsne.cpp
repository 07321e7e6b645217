#include "drkit/tsne.hpp"

#include "drkit/error.hpp"
#include "drkit/neighbors.hpp"
#include "drkit/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace drkit {
namespace {

constexpr double kProbFloor = 1e-12;

struct EntropyEval {
  double h = 0.0;  // natural-log entropy
  double sum = 0.0;
};

// Shifted by the smallest squared distance so the nearest weight is exactly 1.
EntropyEval entropy_at(const std::vector<double>& d2, double dmin, double beta, std::vector<double>& w) {
  double s = 0.0, sd = 0.0;
  for (std::size_t j = 0; j < d2.size(); ++j) {
    const double shifted = d2[j] - dmin;
    w[j] = std::exp(-beta * shifted);
    s += w[j];
    sd += w[j] * shifted;
  }
  return {std::log(s) + beta * sd / s, s};
}

// Point-region quadtree over a 2-D embedding.
class QuadTree {
 public:
  explicit QuadTree(const Matrix& y) : y_(y) {
    const Eigen::Index n = y.rows();
    const double minx = y.col(0).minCoeff(), maxx = y.col(0).maxCoeff();
    const double miny = y.col(1).minCoeff(), maxy = y.col(1).maxCoeff();
    const double half = 0.5 * std::max(maxx - minx, maxy - miny) * (1.0 + 1e-9) + 1e-12;
    nodes_.reserve(static_cast<std::size_t>(4 * n + 1));
    nodes_.push_back(make_node(0.5 * (minx + maxx), 0.5 * (miny + maxy), half));
    for (Eigen::Index i = 0; i < n; ++i) insert(0, static_cast<int>(i), 0);
  }

  // Accumulates sum_j w_ij and sum_j w_ij^2 (y_i - y_j) over j != i.
  void repulsion(int i, double theta, double& sum_q, double& fx, double& fy) const {
    const double xi = y_(i, 0), yi = y_(i, 1);
    const double theta2 = theta * theta;
    std::array<int, 256> stack{};
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
      if (node.count == 0) continue;
      if (node.first_child < 0) {
        for (int q : node.points) {
          if (q == i) continue;
          const double dx = xi - y_(q, 0), dy = yi - y_(q, 1);
          const double w = 1.0 / (1.0 + dx * dx + dy * dy);
          sum_q += w;
          fx += w * w * dx;
          fy += w * w * dy;
        }
        continue;
      }
      const double cx = node.sx / node.count, cy = node.sy / node.count;
      const double dx = xi - cx, dy = yi - cy;
      const double d2 = dx * dx + dy * dy;
      if (node.half * node.half < theta2 * d2) {
        const double w = 1.0 / (1.0 + d2);
        const double mult = node.count * w;
        sum_q += mult;
        fx += mult * w * dx;
        fy += mult * w * dy;
      } else {
        for (int c = 0; c < 4; ++c) stack[top++] = node.first_child + c;
      }
    }
  }

 private:
  static constexpr int kMaxDepth = 50;

  struct Node {
    double cx, cy, half;
    double sx = 0.0, sy = 0.0;
    int count = 0;
    int first_child = -1;
    std::vector<int> points;
  };

  static Node make_node(double cx, double cy, double half) {
    Node n;
    n.cx = cx;
    n.cy = cy;
    n.half = half;
    return n;
  }

  int child_for(const Node& node, int p) const {
    return (y_(p, 0) >= node.cx ? 1 : 0) + (y_(p, 1) >= node.cy ? 2 : 0);
  }

  void insert(int idx, int p, int depth) {
    {
      Node& node = nodes_[static_cast<std::size_t>(idx)];
      node.count += 1;
      node.sx += y_(p, 0);
      node.sy += y_(p, 1);
      if (node.first_child < 0) {
        const bool coincident = !node.points.empty() && y_(node.points[0], 0) == y_(p, 0) &&
                                y_(node.points[0], 1) == y_(p, 1);
        if (node.points.empty() || coincident || depth >= kMaxDepth) {
          node.points.push_back(p);
          return;
        }
      }
    }
    if (nodes_[static_cast<std::size_t>(idx)].first_child < 0) subdivide(idx, depth);
    const Node& node = nodes_[static_cast<std::size_t>(idx)];
    insert(node.first_child + child_for(node, p), p, depth + 1);
  }

  void subdivide(int idx, int depth) {
    const Node parent = nodes_[static_cast<std::size_t>(idx)];
    const double h = 0.5 * parent.half;
    const int first = static_cast<int>(nodes_.size());
    for (int c = 0; c < 4; ++c) {
      nodes_.push_back(make_node(parent.cx + ((c & 1) ? h : -h), parent.cy + ((c & 2) ? h : -h), h));
    }
    nodes_[static_cast<std::size_t>(idx)].first_child = first;
    std::vector<int> moved = std::move(nodes_[static_cast<std::size_t>(idx)].points);
    nodes_[static_cast<std::size_t>(idx)].points.clear();
    for (int q : moved) insert(first + child_for(nodes_[static_cast<std::size_t>(idx)], q), q, depth + 1);
  }

  const Matrix& y_;
  std::vector<Node> nodes_;
};

void check_shapes(const AffinityMatrix& p, const Matrix& y) {
  if (p.size() != y.rows() || p.p.cols() != y.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "affinity matrix does not match embedding rows");
  }
}

}  // namespace

Calibration perplexity_calibration(std::span<const double> distances, double perplexity) {
  if (distances.size() < 2) throw Error(ErrorCode::calibration_failure, "calibration needs at least two distances");
  if (!(perplexity > 0.0)) throw Error(ErrorCode::bad_config, "perplexity must be positive");
  std::vector<double> d2(distances.size());
  for (std::size_t j = 0; j < distances.size(); ++j) {
    if (!std::isfinite(distances[j])) throw Error(ErrorCode::calibration_failure, "non-finite distance");
    d2[j] = distances[j] * distances[j];
  }
  const double dmin = *std::min_element(d2.begin(), d2.end());
  const double target = std::log(perplexity);
  std::vector<double> w(d2.size());

  double lo = 1e-20, hi = 1e20;
  const double h_max = entropy_at(d2, dmin, lo, w).h;
  const double h_min = entropy_at(d2, dmin, hi, w).h;
  const double tol = 1e-5;
  if (std::exp(h_max) < perplexity - tol || std::exp(h_min) > perplexity + tol) {
    throw Error(ErrorCode::calibration_failure,
                "perplexity " + std::to_string(perplexity) + " unreachable with " + std::to_string(d2.size()) +
                    " neighbors");
  }

  Calibration cal;
  EntropyEval ev{};
  double beta = 1.0;
  for (int it = 1; it <= 64; ++it) {
    beta = std::sqrt(lo * hi);
    ev = entropy_at(d2, dmin, beta, w);
    cal.iterations = it;
    const double perp = std::exp(ev.h);
    if (std::abs(perp - perplexity) < tol) break;
    if (ev.h > target) {
      lo = beta;
    } else {
      hi = beta;
    }
  }
  cal.beta = beta;
  cal.sigma = 1.0 / std::sqrt(2.0 * beta);
  cal.probs.resize(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) cal.probs[j] = w[j] / ev.sum;
  double h = 0.0;
  for (double p : cal.probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  cal.perplexity = std::exp(h);
  return cal;
}

SparseRows conditional_affinities(const Matrix& x, double perplexity, int neighbors) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw Error(ErrorCode::degenerate_matrix, "need at least two rows");
  std::vector<Eigen::Triplet<double>> trip;
  if (neighbors >= n - 1) {
    const Matrix d = pairwise_distances(x);
    std::vector<double> row(static_cast<std::size_t>(n - 1));
    trip.reserve(static_cast<std::size_t>(n * (n - 1)));
    for (Eigen::Index i = 0; i < n; ++i) {
      std::size_t m = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) row[m++] = d(i, j);
      }
      const Calibration cal = perplexity_calibration(row, perplexity);
      m = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) trip.emplace_back(static_cast<int>(i), static_cast<int>(j), cal.probs[m++]);
      }
    }
  } else {
    const NeighborGraph g = knn_exact(x, neighbors);
    trip.reserve(static_cast<std::size_t>(n * neighbors));
    std::vector<double> row(static_cast<std::size_t>(neighbors));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int m = 0; m < neighbors; ++m) row[static_cast<std::size_t>(m)] = g.distances(i, m);
      const Calibration cal = perplexity_calibration(row, perplexity);
      for (int m = 0; m < neighbors; ++m) {
        trip.emplace_back(static_cast<int>(i), g.indices(i, m), cal.probs[static_cast<std::size_t>(m)]);
      }
    }
  }
  SparseRows c(n, n);
  c.setFromTriplets(trip.begin(), trip.end());
  return c;
}

AffinityMatrix joint_affinities(const SparseRows& conditionals) {
  const Eigen::Index n = conditionals.rows();
  SparseRows t = conditionals.transpose();
  SparseRows sym = conditionals + t;
  sym /= 2.0 * static_cast<double>(n);
  // Flooring keeps every stored pair strictly positive.
  for (Eigen::Index r = 0; r < sym.outerSize(); ++r) {
    for (SparseRows::InnerIterator it(sym, r); it; ++it) {
      if (it.col() == it.row()) {
        it.valueRef() = 0.0;
      } else {
        it.valueRef() = std::max(it.value(), kProbFloor);
      }
    }
  }
  sym.prune(0.0);
  sym /= sym.sum();
  return {std::move(sym)};
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::length_mismatch, "distributions differ in length");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

double kl_divergence(const AffinityMatrix& p, const Matrix& y) {
  check_shapes(p, y);
  const Eigen::Index n = y.rows();
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) z += 2.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseRows::InnerIterator it(p.p, i); it; ++it) {
      if (it.value() <= 0.0) continue;
      const double q = 1.0 / (1.0 + (y.row(i) - y.row(it.col())).squaredNorm()) / z;
      kl += it.value() * std::log(it.value() / q);
    }
  }
  return kl;
}

Matrix tsne_gradient_exact(const AffinityMatrix& p, const Matrix& y, double exaggeration, double* kl) {
  check_shapes(p, y);
  const Eigen::Index n = y.rows();
  const Matrix pd = p.dense();
  Matrix w(n, n);
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    w(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
      w(i, j) = w(j, i) = v;
      z += 2.0 * v;
    }
  }
  Matrix grad = Matrix::Zero(n, y.cols());
  double cost = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double q = w(i, j) / z;
      const double pij = pd(i, j);
      grad.row(i) += (exaggeration * pij - q) * w(i, j) * (y.row(i) - y.row(j));
      if (pij > 0.0) cost += pij * std::log(pij / q);
    }
  }
  if (kl) *kl = cost;
  return 4.0 * grad;
}

Matrix tsne_gradient_bh(const AffinityMatrix& p, const Matrix& y, double theta, double exaggeration, double* kl) {
  check_shapes(p, y);
  if (y.cols() != 2) throw Error(ErrorCode::dimension_mismatch, "Barnes-Hut gradient supports 2-D embeddings only");
  const Eigen::Index n = y.rows();
  const QuadTree tree(y);
  Matrix attr = Matrix::Zero(n, 2);
  Matrix rep = Matrix::Zero(n, 2);
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double fx = 0.0, fy = 0.0;
    tree.repulsion(static_cast<int>(i), theta, z, fx, fy);
    rep(i, 0) = fx;
    rep(i, 1) = fy;
  }
  // Attraction over stored pairs; the KL term reuses w_ij.
  double pw_log = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseRows::InnerIterator it(p.p, i); it; ++it) {
      const Eigen::Index j = it.col();
      const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
      const double w = 1.0 / (1.0 + dx * dx + dy * dy);
      attr(i, 0) += it.value() * w * dx;
      attr(i, 1) += it.value() * w * dy;
      if (it.value() > 0.0) pw_log += it.value() * std::log(it.value() / w);
    }
  }
  if (kl) *kl = pw_log + std::log(z) * p.sum();
  return 4.0 * (exaggeration * attr - rep / z);
}

TsneResult tsne_run(const Matrix& x, const TsneConfig& cfg) {
  const Eigen::Index n = x.rows();
  if (n < 4) throw Error(ErrorCode::degenerate_matrix, "t-SNE needs at least 4 rows");
  if (!x.allFinite()) throw Error(ErrorCode::missing_data, "t-SNE needs complete, finite data");
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) throw Error(ErrorCode::bad_config, "theta must lie in [0, 1]");
  if (!(cfg.perplexity > 0.0)) throw Error(ErrorCode::bad_config, "perplexity must be positive");
  if (cfg.d < 1) throw Error(ErrorCode::bad_config, "embedding dimension must be >= 1");
  if (cfg.max_iter < 1) throw Error(ErrorCode::bad_config, "max_iter must be >= 1");
  const bool exact = cfg.theta == 0.0;
  if (!exact && cfg.d != 2) throw Error(ErrorCode::bad_config, "Barnes-Hut t-SNE supports d = 2 only; use theta = 0");

  TsneResult result;
  if (cfg.perplexity >= static_cast<double>(n - 1) / 3.0) {
    result.warnings.push_back("perplexity is large relative to n; expect a crowded embedding");
  }
  const int neighbors = exact ? static_cast<int>(n - 1)
                              : static_cast<int>(std::min<double>(static_cast<double>(n - 1),
                                                                  std::floor(3.0 * cfg.perplexity)));
  const AffinityMatrix p = joint_affinities(conditional_affinities(x, cfg.perplexity, neighbors));

  RngStream rng(cfg.seed);
  Matrix y(n, cfg.d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < cfg.d; ++c) y(i, c) = 1e-4 * rng.normal();
  }
  Matrix update = Matrix::Zero(n, cfg.d);
  Matrix gains = Matrix::Ones(n, cfg.d);
  result.kl_trace.reserve(static_cast<std::size_t>(cfg.max_iter));

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const double exag = iter < cfg.exaggeration_iters ? cfg.early_exaggeration : 1.0;
    const double momentum = iter < cfg.momentum_switch_iter ? cfg.initial_momentum : cfg.final_momentum;
    double kl = 0.0;
    const Matrix grad = exact ? tsne_gradient_exact(p, y, exag, &kl) : tsne_gradient_bh(p, y, cfg.theta, exag, &kl);
    if (!std::isfinite(kl) || !grad.allFinite()) {
      throw Error(ErrorCode::numerical_divergence, "KL divergence became non-finite at iteration " +
                                                       std::to_string(iter));
    }
    result.kl_trace.push_back(kl);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int c = 0; c < cfg.d; ++c) {
        double& g = gains(i, c);
        g = ((grad(i, c) > 0.0) != (update(i, c) > 0.0)) ? g + 0.2 : g * 0.8;
        g = std::max(g, 0.01);
        update(i, c) = momentum * update(i, c) - cfg.learning_rate * g * grad(i, c);
      }
    }
    y += update;
    y.rowwise() -= y.colwise().mean();
    if (!y.allFinite()) {
      throw Error(ErrorCode::numerical_divergence, "embedding became non-finite at iteration " + std::to_string(iter));
    }
  }
  result.embedding.coords = std::move(y);
  result.embedding.algo_tag = "tsne";
  return result;
}

}  // namespace drkit
