#include "drkit/umap.hpp"

#include "drkit/error.hpp"
#include "drkit/random.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>

namespace drkit {
namespace {

constexpr double kTargetTol = 1e-5;
constexpr double kClip = 4.0;

double clip(double v) { return std::clamp(v, -kClip, kClip); }

double clamp_membership(double v) { return std::clamp(v, 1e-12, 1.0 - 1e-12); }

}  // namespace

SmoothKnn smooth_knn(std::span<const double> d) {
  if (d.empty()) throw Error(ErrorCode::bad_config, "smooth_knn needs at least one neighbor");
  const std::size_t k = d.size();
  const double target = std::log2(static_cast<double>(k));
  SmoothKnn out;
  out.rho = d[0];
  out.memberships.resize(k);

  std::size_t ties = 0;
  double spread = 0.0;
  for (double v : d) {
    const double gap = v - out.rho;
    if (gap <= 0.0) {
      ++ties;
    } else {
      spread += gap;
    }
  }
  // The sum is at least the number of tied-at-rho terms for every sigma.
  if (static_cast<double>(ties) > target + kTargetTol || ties == k) {
    out.degenerate = true;
    out.sigma = std::numeric_limits<double>::min();
    for (std::size_t j = 0; j < k; ++j) out.memberships[j] = d[j] - out.rho <= 0.0 ? 1.0 : 0.0;
    return out;
  }

  auto total = [&](double sigma) {
    double s = 0.0;
    for (double v : d) s += std::exp(-std::max(0.0, v - out.rho) / sigma);
    return s;
  };
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double mid = spread / static_cast<double>(k - ties);
  for (int it = 1; it <= 64; ++it) {
    out.iterations = it;
    const double s = total(mid);
    if (std::abs(s - target) < kTargetTol) break;
    if (s > target) {
      hi = mid;
      mid = 0.5 * (lo + hi);
    } else {
      lo = mid;
      mid = std::isinf(hi) ? 2.0 * mid : 0.5 * (lo + hi);
    }
  }
  out.sigma = mid;
  for (std::size_t j = 0; j < k; ++j) out.memberships[j] = std::exp(-std::max(0.0, d[j] - out.rho) / mid);
  return out;
}

double FuzzyGraph::membership(int i, int j) const {
  auto first = std::lower_bound(head.begin(), head.end(), i);
  auto last = std::upper_bound(first, head.end(), i);
  const auto lo = static_cast<std::size_t>(first - head.begin());
  const auto hi = static_cast<std::size_t>(last - head.begin());
  auto t = std::lower_bound(tail.begin() + static_cast<std::ptrdiff_t>(lo),
                            tail.begin() + static_cast<std::ptrdiff_t>(hi), j);
  if (t == tail.begin() + static_cast<std::ptrdiff_t>(hi) || *t != j) return 0.0;
  return weight[static_cast<std::size_t>(t - tail.begin())];
}

double fuzzy_union(double a, double b) { return a + b - a * b; }

FuzzyGraph fuzzy_union(const NeighborGraph& graph, const std::vector<SmoothKnn>& rows) {
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  const Eigen::Index n = graph.rows();
  if (static_cast<Eigen::Index>(rows.size()) != n) {
    throw Error(ErrorCode::dimension_mismatch, "one smooth_knn result per row required");
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n * graph.k));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int m = 0; m < graph.k; ++m) {
      const double w = rows[static_cast<std::size_t>(i)].memberships[static_cast<std::size_t>(m)];
      if (w > 0.0) trip.emplace_back(static_cast<int>(i), graph.indices(i, m), w);
    }
  }
  Sparse directed(n, n);
  directed.setFromTriplets(trip.begin(), trip.end());
  const Sparse transposed = directed.transpose();
  const Sparse product = directed.cwiseProduct(transposed);
  const Sparse merged = directed + transposed - product;

  FuzzyGraph g;
  g.n = n;
  g.rho.resize(n);
  g.sigma.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g.rho[i] = rows[static_cast<std::size_t>(i)].rho;
    g.sigma[i] = rows[static_cast<std::size_t>(i)].sigma;
    if (rows[static_cast<std::size_t>(i)].degenerate) ++g.degenerate_rows;
    for (Sparse::InnerIterator it(merged, i); it; ++it) {
      if (it.col() == i || it.value() <= 0.0) continue;
      g.head.push_back(static_cast<int>(i));
      g.tail.push_back(static_cast<int>(it.col()));
      g.weight.push_back(std::min(it.value(), 1.0));
    }
  }
  return g;
}

FuzzyGraph build_fuzzy_graph(const NeighborGraph& graph) {
  std::vector<SmoothKnn> rows;
  rows.reserve(static_cast<std::size_t>(graph.rows()));
  std::vector<double> d(static_cast<std::size_t>(graph.k));
  for (Eigen::Index i = 0; i < graph.rows(); ++i) {
    for (int m = 0; m < graph.k; ++m) d[static_cast<std::size_t>(m)] = graph.distances(i, m);
    rows.push_back(smooth_knn(d));
  }
  return fuzzy_union(graph, rows);
}

double cross_entropy(std::span<const double> high, std::span<const double> low) {
  if (high.size() != low.size()) throw Error(ErrorCode::length_mismatch, "membership lists differ in length");
  double ce = 0.0;
  for (std::size_t e = 0; e < high.size(); ++e) {
    const double h = clamp_membership(high[e]);
    const double l = clamp_membership(low[e]);
    ce += h * std::log(h / l) + (1.0 - h) * std::log((1.0 - h) / (1.0 - l));
  }
  return ce;
}

double cross_entropy(const FuzzyGraph& graph, const Matrix& y, double a, double b) {
  std::vector<double> high, low;
  for (std::size_t e = 0; e < graph.head.size(); ++e) {
    const int i = graph.head[e];
    const int j = graph.tail[e];
    if (i >= j) continue;
    const double d2 = (y.row(i) - y.row(j)).squaredNorm();
    high.push_back(graph.weight[e]);
    low.push_back(1.0 / (1.0 + a * std::pow(d2, b)));
  }
  return cross_entropy(high, low);
}

CurveParams fit_ab(double min_dist, double spread) {
  if (!(spread > 0.0) || !(min_dist >= 0.0)) throw Error(ErrorCode::bad_config, "need spread > 0 and min_dist >= 0");
  constexpr int kPoints = 300;
  std::vector<double> xs(kPoints), ys(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    xs[static_cast<std::size_t>(i)] = 3.0 * spread * i / (kPoints - 1);
    const double x = xs[static_cast<std::size_t>(i)];
    ys[static_cast<std::size_t>(i)] = x < min_dist ? 1.0 : std::exp(-(x - min_dist) / spread);
  }
  auto sse = [&](double a, double b) {
    double s = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const double x = xs[static_cast<std::size_t>(i)];
      const double r = 1.0 / (1.0 + a * std::pow(x, 2.0 * b)) - ys[static_cast<std::size_t>(i)];
      s += r * r;
    }
    return s;
  };

  // Levenberg-Marquardt on (a, b).
  double a = 1.0, b = 1.0, lambda = 1e-3;
  double cost = sse(a, b);
  for (int it = 0; it < 500; ++it) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (int i = 0; i < kPoints; ++i) {
      const double x = xs[static_cast<std::size_t>(i)];
      if (x <= 0.0) continue;  // f(0) = 1 regardless of (a, b)
      const double xb = std::pow(x, 2.0 * b);
      const double denom = 1.0 + a * xb;
      const double f = 1.0 / denom;
      const double r = f - ys[static_cast<std::size_t>(i)];
      Eigen::Vector2d jac(-xb / (denom * denom), -a * xb * 2.0 * std::log(x) / (denom * denom));
      jtj += jac * jac.transpose();
      jtr += jac * r;
    }
    Eigen::Matrix2d damped = jtj;
    damped.diagonal() *= 1.0 + lambda;
    const Eigen::Vector2d step = damped.ldlt().solve(-jtr);
    const double na = a + step[0], nb = b + step[1];
    const double ncost = (na > 0.0 && nb > 0.0) ? sse(na, nb) : std::numeric_limits<double>::infinity();
    if (ncost < cost) {
      const double improvement = cost - ncost;
      a = na;
      b = nb;
      cost = ncost;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (improvement < 1e-15 * std::max(1.0, cost) && step.norm() < 1e-12) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  return {a, b};
}

UmapResult umap_run(const Matrix& x, const UmapConfig& cfg) {
  const Eigen::Index n = x.rows();
  if (cfg.k < 2 || cfg.k > n - 1) throw Error(ErrorCode::k_too_large, "UMAP k must lie in [2, n-1]");
  if (cfg.epochs < 1) throw Error(ErrorCode::bad_config, "epochs must be >= 1");
  if (cfg.d < 1) throw Error(ErrorCode::bad_config, "embedding dimension must be >= 1");
  if (!(cfg.negative_sample_rate >= 0.0)) throw Error(ErrorCode::bad_config, "negative_sample_rate must be >= 0");
  if (!x.allFinite()) throw Error(ErrorCode::missing_data, "UMAP needs complete, finite data");

  UmapResult result;
  result.graph = build_fuzzy_graph(knn_exact(x, cfg.k));
  result.curve = fit_ab(cfg.min_dist, cfg.spread);
  const double a = result.curve.a;
  const double b = result.curve.b;
  const FuzzyGraph& g = result.graph;

  // Edges too weak to be sampled even once over the run are dropped.
  const double wmax = g.weight.empty() ? 1.0 : *std::max_element(g.weight.begin(), g.weight.end());
  std::vector<int> head, tail;
  std::vector<double> eps;
  for (std::size_t e = 0; e < g.weight.size(); ++e) {
    if (g.weight[e] < wmax / cfg.epochs) continue;
    head.push_back(g.head[e]);
    tail.push_back(g.tail[e]);
    eps.push_back(wmax / g.weight[e]);
  }
  const std::size_t m = eps.size();
  std::vector<double> next_sample(eps);
  std::vector<double> eps_neg(m), next_neg(m);
  for (std::size_t e = 0; e < m; ++e) {
    eps_neg[e] = cfg.negative_sample_rate > 0.0 ? eps[e] / cfg.negative_sample_rate
                                                : std::numeric_limits<double>::infinity();
    next_neg[e] = eps_neg[e];
  }

  RngStream rng(cfg.seed);
  Matrix y(n, cfg.d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < cfg.d; ++c) y(i, c) = rng.uniform(-10.0, 10.0);
  }

  const int d = cfg.d;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double now = epoch + 1;
    const double alpha = cfg.learning_rate * (1.0 - static_cast<double>(epoch) / cfg.epochs);
    for (std::size_t e = 0; e < m; ++e) {
      if (next_sample[e] > now) continue;
      const int i = head[e];
      const int j = tail[e];
      double d2 = (y.row(i) - y.row(j)).squaredNorm();
      if (d2 > 0.0) {
        const double coef = -2.0 * a * b * std::pow(d2, b - 1.0) / (1.0 + a * std::pow(d2, b));
        for (int c = 0; c < d; ++c) {
          const double grad = clip(coef * (y(i, c) - y(j, c)));
          y(i, c) += alpha * grad;
          y(j, c) -= alpha * grad;
        }
      }
      next_sample[e] += eps[e];

      const auto n_neg = static_cast<long>(std::floor((now - next_neg[e]) / eps_neg[e]));
      for (long s = 0; s < n_neg; ++s) {
        const auto r = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
        if (r == i) continue;
        d2 = (y.row(i) - y.row(r)).squaredNorm();
        if (d2 > 0.0) {
          const double coef =
              2.0 * cfg.repulsion_strength * b / ((0.001 + d2) * (1.0 + a * std::pow(d2, b)));
          for (int c = 0; c < d; ++c) y(i, c) += alpha * clip(coef * (y(i, c) - y(r, c)));
        } else {
          for (int c = 0; c < d; ++c) y(i, c) += alpha * kClip;
        }
      }
      if (n_neg > 0) next_neg[e] += static_cast<double>(n_neg) * eps_neg[e];
    }
    if (!y.allFinite()) {
      throw Error(ErrorCode::numerical_divergence, "UMAP coordinates became non-finite at epoch " +
                                                       std::to_string(epoch));
    }
  }
  result.embedding.coords = std::move(y);
  result.embedding.algo_tag = "umap";
  return result;
}

}  // namespace drkit
