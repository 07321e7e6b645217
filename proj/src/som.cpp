#include "drkit/som.hpp"

#include "drkit/error.hpp"
#include "drkit/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace drkit {

SomGrid make_grid(int rows, int cols, Eigen::Index p) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::bad_config, "SOM lattice needs at least one row and column");
  SomGrid g;
  g.rows = rows;
  g.cols = cols;
  g.codes = Matrix::Zero(rows * cols, p);
  g.node_xy.resize(rows * cols, 2);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      g.node_xy(r * cols + c, 0) = r;
      g.node_xy(r * cols + c, 1) = c;
    }
  }
  return g;
}

SomGrid init_grid_from_data(const Matrix& x, int rows, int cols, std::uint64_t seed) {
  SomGrid g = make_grid(rows, cols, x.cols());
  RngStream rng(seed);
  const int n = static_cast<int>(x.rows());
  if (n < 1) throw Error(ErrorCode::degenerate_matrix, "SOM needs data rows");
  if (g.nodes() <= n) {
    const std::vector<int> perm = rng.permutation(n);
    for (int j = 0; j < g.nodes(); ++j) g.codes.row(j) = x.row(perm[static_cast<std::size_t>(j)]);
  } else {
    for (int j = 0; j < g.nodes(); ++j) g.codes.row(j) = x.row(static_cast<Eigen::Index>(rng.index(n)));
  }
  return g;
}

int find_bmu(const SomGrid& grid, std::span<const double> x) {
  if (static_cast<Eigen::Index>(x.size()) != grid.codes.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "observation width does not match code width");
  }
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid.nodes(); ++j) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double diff = x[c] - grid.codes(j, static_cast<Eigen::Index>(c));
      s += diff * diff;
    }
    if (s < best_d) {
      best_d = s;
      best = j;
    }
  }
  return best;
}

double neighborhood_factor(const SomGrid& grid, int bmu, int node, double sigma) {
  const double d2 = (grid.node_xy.row(bmu) - grid.node_xy.row(node)).squaredNorm();
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

double decay_schedule(double start, double end, double t, double t_end) {
  if (t_end <= 0.0 || start == end) return start;
  const double v = t_end / std::log(start / end);
  return start * std::exp(-t / v);
}

void som_update(SomGrid& grid, std::span<const double> x, int bmu, double alpha, double sigma) {
  const Eigen::Map<const Eigen::RowVectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  for (int j = 0; j < grid.nodes(); ++j) {
    const double h = neighborhood_factor(grid, bmu, j, sigma);
    if (h == 0.0) continue;
    grid.codes.row(j) += alpha * h * (xv - grid.codes.row(j));
  }
}

SomResult som_train(const Matrix& x, SomGrid grid0, const SomConfig& cfg) {
  if (cfg.rlen < 1) throw Error(ErrorCode::bad_config, "rlen must be >= 1");
  if (!(0.0 < cfg.alpha_end && cfg.alpha_end < cfg.alpha_start && cfg.alpha_start < 1.0)) {
    throw Error(ErrorCode::bad_config, "need 0 < alpha_end < alpha_start < 1");
  }
  if (x.cols() != grid0.codes.cols()) throw Error(ErrorCode::dimension_mismatch, "data width does not match codes");
  if (!x.allFinite()) throw Error(ErrorCode::missing_data, "SOM needs complete, finite data");

  double radius_start = cfg.radius_start;
  if (radius_start <= 0.0) {
    radius_start = 0.5 * std::hypot(grid0.rows - 1.0, grid0.cols - 1.0);
    if (radius_start <= 0.0) radius_start = 1.0;
  }
  const double radius_end = std::min(cfg.radius_end, radius_start);

  const int n = static_cast<int>(x.rows());
  const double t_end = static_cast<double>(cfg.rlen) * n - 1.0;
  RngStream rng(cfg.seed);
  SomResult res{std::move(grid0), {}};
  res.trace.mean_distance.reserve(static_cast<std::size_t>(cfg.rlen));

  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMatrix rm = x;
  double t = 0.0;
  for (int epoch = 0; epoch < cfg.rlen; ++epoch) {
    const std::vector<int> order = rng.permutation(n);
    double total = 0.0;
    for (int row : order) {
      const std::span<const double> xi(rm.data() + static_cast<Eigen::Index>(row) * rm.cols(),
                                       static_cast<std::size_t>(rm.cols()));
      const int bmu = find_bmu(res.grid, xi);
      total += (rm.row(row) - res.grid.codes.row(bmu)).norm();
      const double alpha = decay_schedule(cfg.alpha_start, cfg.alpha_end, t, t_end);
      const double sigma = decay_schedule(radius_start, radius_end, t, t_end);
      som_update(res.grid, xi, bmu, alpha, sigma);
      t += 1.0;
    }
    res.trace.mean_distance.push_back(total / n);
  }
  return res;
}

SomMapping map_observations(const SomGrid& grid, const Matrix& x) {
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMatrix rm = x;
  SomMapping m;
  m.node.resize(static_cast<std::size_t>(x.rows()));
  m.counts.assign(static_cast<std::size_t>(grid.nodes()), 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int b = find_bmu(grid, {rm.data() + i * rm.cols(), static_cast<std::size_t>(rm.cols())});
    m.node[static_cast<std::size_t>(i)] = b;
    ++m.counts[static_cast<std::size_t>(b)];
  }
  return m;
}

namespace {

double assign(const Matrix& pts, const Matrix& centers, std::vector<int>& labels, std::vector<double>& d2) {
  double ss = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double v = (pts.row(i) - centers.row(c)).squaredNorm();
      if (v < best_d) {
        best_d = v;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    d2[static_cast<std::size_t>(i)] = best_d;
    ss += best_d;
  }
  return ss;
}

Matrix plus_plus_seeds(const Matrix& pts, int k, RngStream& rng) {
  const Eigen::Index n = pts.rows();
  Matrix centers(k, pts.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  auto first = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
  centers.row(0) = pts.row(first);
  chosen[static_cast<std::size_t>(first)] = true;
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (pts.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index pick = -1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        u -= d2[static_cast<std::size_t>(i)];
        if (u < 0.0 && d2[static_cast<std::size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (d2[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
    }
    centers.row(c) = pts.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], (pts.row(i) - centers.row(c)).squaredNorm());
    }
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int n_clusters, std::uint64_t seed, int restarts, int max_iter) {
  const Eigen::Index n = points.rows();
  if (n_clusters < 1 || n_clusters > n) throw Error(ErrorCode::bad_config, "cluster count must lie in [1, points]");
  RngStream rng(seed);
  KMeansResult best;
  best.within_ss = std::numeric_limits<double>::infinity();
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::vector<double> d2(static_cast<std::size_t>(n));

  for (int r = 0; r < std::max(1, restarts); ++r) {
    Matrix centers = plus_plus_seeds(points, n_clusters, rng);
    int reseeds = 0;
    double ss = assign(points, centers, labels, d2);
    for (int it = 0; it < max_iter; ++it) {
      Matrix sums = Matrix::Zero(n_clusters, points.cols());
      std::vector<int> counts(static_cast<std::size_t>(n_clusters), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
        ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
      }
      for (int c = 0; c < n_clusters; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) {
          centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        } else {
          const auto far = std::max_element(d2.begin(), d2.end()) - d2.begin();
          centers.row(c) = points.row(far);
          d2[static_cast<std::size_t>(far)] = 0.0;
          ++reseeds;
        }
      }
      const std::vector<int> previous = labels;
      ss = assign(points, centers, labels, d2);
      if (labels == previous) break;
    }
    if (ss < best.within_ss) {
      best.within_ss = ss;
      best.labels = labels;
      best.centers = centers;
      best.empty_cluster_reseeds = reseeds;
    }
  }
  return best;
}

KMeansResult kmeans_codes(const SomGrid& grid, int n_clusters, std::uint64_t seed) {
  return kmeans(grid.codes, n_clusters, seed, 50);
}

Matrix fcm_memberships(const Matrix& points, const Matrix& centers, double m) {
  if (!(m > 1.0)) throw Error(ErrorCode::bad_config, "fuzzifier must exceed 1");
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centers.rows();
  Matrix u = Matrix::Zero(n, k);
  const double power = 2.0 / (m - 1.0);
  Vector d(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index exact = -1;
    for (Eigen::Index c = 0; c < k; ++c) {
      d[c] = (points.row(i) - centers.row(c)).norm();
      if (d[c] == 0.0 && exact < 0) exact = c;
    }
    if (exact >= 0) {
      u(i, exact) = 1.0;
      continue;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      double s = 0.0;
      for (Eigen::Index o = 0; o < k; ++o) s += std::pow(d[c] / d[o], power);
      u(i, c) = 1.0 / s;
    }
  }
  return u;
}

FcmResult fcm(const Matrix& points, int n_clusters, double m, std::uint64_t seed) {
  const Eigen::Index n = points.rows();
  if (n_clusters < 2 || n_clusters > n) throw Error(ErrorCode::bad_config, "FCM needs 2 <= clusters <= points");
  RngStream rng(seed);
  FcmResult res;
  res.memberships.resize(n, n_clusters);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < n_clusters; ++c) res.memberships(i, c) = rng.uniform() + 1e-3;
    res.memberships.row(i) /= res.memberships.row(i).sum();
  }
  res.centers = Matrix::Zero(n_clusters, points.cols());
  for (int it = 1; it <= 500; ++it) {
    res.iterations = it;
    const Matrix um = res.memberships.array().pow(m).matrix();
    Matrix centers = um.transpose() * points;
    for (int c = 0; c < n_clusters; ++c) centers.row(c) /= um.col(c).sum();
    const double drift = (centers - res.centers).cwiseAbs().maxCoeff();
    res.centers = centers;
    res.memberships = fcm_memberships(points, res.centers, m);
    if (drift < 1e-6) break;
  }
  return res;
}

FcmResult fcm_codes(const SomGrid& grid, int n_clusters, double m, std::uint64_t seed) {
  return fcm(grid.codes, n_clusters, m, seed);
}

}  // namespace drkit
