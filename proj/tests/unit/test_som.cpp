#include "drkit/datasets.hpp"
#include "drkit/som.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace drkit;
using drkit::testing::random_matrix;

namespace {

int linear_scan_bmu(const Matrix& codes, const Vector& x) {
  int best = 0;
  double best_d = INFINITY;
  for (Eigen::Index j = 0; j < codes.rows(); ++j) {
    double d = 0.0;
    for (Eigen::Index c = 0; c < codes.cols(); ++c) d += (codes(j, c) - x[c]) * (codes(j, c) - x[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

double partition_ss(const Matrix& pts, const std::vector<int>& labels, int k) {
  double ss = 0.0;
  for (int c = 0; c < k; ++c) {
    Vector mean = Vector::Zero(pts.cols());
    int count = 0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) {
        mean += pts.row(i).transpose();
        ++count;
      }
    }
    if (count == 0) continue;
    mean /= count;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) ss += (pts.row(i).transpose() - mean).squaredNorm();
    }
  }
  return ss;
}

std::span<const double> row_span(const Matrix& m, Eigen::Index i, std::vector<double>& buf) {
  buf.assign(static_cast<std::size_t>(m.cols()), 0.0);
  for (Eigen::Index c = 0; c < m.cols(); ++c) buf[static_cast<std::size_t>(c)] = m(i, c);
  return buf;
}

}  // namespace

TEST(Bmu, ExactMatchAndTie) {
  SomGrid g = make_grid(1, 3, 2);
  g.codes << 0, 0, 1, 1, -1, -1;
  const std::vector<double> x{1, 1};
  EXPECT_EQ(find_bmu(g, x), 1);
  const std::vector<double> o{0, 0.5};
  g.codes << 0, 1, 0, 0, 5, 5;
  EXPECT_EQ(find_bmu(g, o), 0);
}

TEST(Bmu, LinearScanOracle) {
  SomGrid g = make_grid(10, 10, 4);
  g.codes = random_matrix(100, 4, 3);
  const Matrix pts = random_matrix(200, 4, 4);
  std::vector<double> buf;
  for (Eigen::Index i = 0; i < 200; ++i) {
    ASSERT_EQ(find_bmu(g, row_span(pts, i, buf)), linear_scan_bmu(g.codes, pts.row(i).transpose()));
  }
}

TEST(Neighborhood, Values) {
  const SomGrid g = make_grid(4, 4, 1);
  EXPECT_DOUBLE_EQ(neighborhood_factor(g, 5, 5, 1.3), 1.0);
  // Node 6 is one lattice step from node 5.
  EXPECT_NEAR(neighborhood_factor(g, 5, 6, 1.0), std::exp(-0.5), 1e-15);
  double prev = 1.1;
  for (int node : {5, 6, 7, 11, 15}) {
    const double h = neighborhood_factor(g, 5, node, 1.5);
    EXPECT_LT(h, prev);
    prev = h;
  }
}

TEST(Update, SingleStepArithmetic) {
  SomGrid g = make_grid(1, 1, 1);
  g.codes(0, 0) = 0.0;
  const std::vector<double> x{1.0};
  som_update(g, x, 0, 0.1, 1.0);
  EXPECT_DOUBLE_EQ(g.codes(0, 0), 0.1);
}

TEST(Update, StaysBetweenOldCodeAndInput) {
  SomGrid g = make_grid(3, 3, 2);
  g.codes = random_matrix(9, 2, 1);
  const Matrix before = g.codes;
  const std::vector<double> x{2.0, -3.0};
  som_update(g, x, 4, 0.5, 1.0);
  for (Eigen::Index j = 0; j < 9; ++j) {
    for (int c = 0; c < 2; ++c) {
      const double lo = std::min(before(j, c), x[static_cast<std::size_t>(c)]);
      const double hi = std::max(before(j, c), x[static_cast<std::size_t>(c)]);
      EXPECT_GE(g.codes(j, c), lo);
      EXPECT_LE(g.codes(j, c), hi);
    }
  }
}

TEST(Schedule, Endpoints) {
  const double t_end = 12345.0;
  EXPECT_NEAR(decay_schedule(0.1, 0.001, 0.0, t_end), 0.1, 1e-9);
  EXPECT_NEAR(decay_schedule(0.1, 0.001, t_end, t_end), 0.001, 1e-9);
  EXPECT_LT(decay_schedule(0.1, 0.001, t_end / 2, t_end), 0.1);
}

TEST(Train, TwoClusterConvergence) {
  const auto lab = make_gaussian_clusters(50, {Vector::Constant(3, -5.0), Vector::Constant(3, 5.0)}, 0.5, 2);
  SomConfig cfg;
  cfg.seed = 3;
  cfg.rlen = 100;
  const auto res = som_train(lab.data.values, init_grid_from_data(lab.data.values, 2, 1, 3), cfg);
  const auto map = map_observations(res.grid, lab.data.values);
  for (int c = 0; c < 2; ++c) {
    Vector mean = Vector::Zero(3);
    for (int i = 0; i < 50; ++i) mean += lab.data.values.row(c * 50 + i).transpose();
    mean /= 50.0;
    const int node = map.node[static_cast<std::size_t>(c * 50)];
    EXPECT_LT((res.grid.codes.row(node).transpose() - mean).norm(), 0.5);
  }
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(map.node[static_cast<std::size_t>(i)] == map.node[0], lab.labels[static_cast<std::size_t>(i)] == 0);
  }
}

TEST(Train, TraceSettles) {
  const Matrix x = random_matrix(60, 3, 5);
  SomConfig cfg;
  cfg.rlen = 500;
  cfg.seed = 1;
  const auto res = som_train(x, init_grid_from_data(x, 4, 4, 1), cfg);
  ASSERT_EQ(res.trace.mean_distance.size(), 500u);
  const auto& t = res.trace.mean_distance;
  const double first = std::accumulate(t.begin(), t.begin() + 50, 0.0) / 50;
  const double last = std::accumulate(t.end() - 50, t.end(), 0.0) / 50;
  EXPECT_LE(last, first);
  for (double v : t) ASSERT_GE(v, 0.0);
}

TEST(Train, DeterministicPerSeed) {
  const Matrix x = random_matrix(40, 3, 2);
  SomConfig cfg;
  cfg.rlen = 20;
  cfg.seed = 8;
  const auto a = som_train(x, init_grid_from_data(x, 3, 3, 8), cfg);
  const auto b = som_train(x, init_grid_from_data(x, 3, 3, 8), cfg);
  EXPECT_EQ(a.grid.codes, b.grid.codes);
  EXPECT_EQ(a.trace.mean_distance, b.trace.mean_distance);
  cfg.seed = 9;
  EXPECT_NE(som_train(x, init_grid_from_data(x, 3, 3, 9), cfg).grid.codes, a.grid.codes);
}

TEST(Init, DistinctRows) {
  const Matrix x = random_matrix(30, 2, 1);
  const auto g = init_grid_from_data(x, 5, 5, 2);
  std::set<std::pair<double, double>> seen;
  for (Eigen::Index j = 0; j < 25; ++j) seen.insert({g.codes(j, 0), g.codes(j, 1)});
  EXPECT_EQ(seen.size(), 25u);
}

TEST(Mapping, CountsAndPurity) {
  SomGrid g = make_grid(2, 2, 2);
  g.codes = random_matrix(4, 2, 3);
  Matrix x = random_matrix(20, 2, 4);
  x.row(7) = x.row(3);
  const auto m = map_observations(g, x);
  EXPECT_EQ(std::accumulate(m.counts.begin(), m.counts.end(), 0), 20);
  EXPECT_EQ(m.node[7], m.node[3]);
  EXPECT_EQ(map_observations(g, x).node, m.node);
}

TEST(KMeans, SeparatedBlobs) {
  const auto lab = make_gaussian_clusters(10, {Vector::Constant(2, -20.0), Vector::Constant(2, 20.0)}, 0.5, 1);
  const auto km = kmeans(lab.data.values, 2, 4);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(km.labels[static_cast<std::size_t>(i)] == km.labels[0], lab.labels[static_cast<std::size_t>(i)] == 0);
  }
}

TEST(KMeans, OneClusterPerPoint) {
  const Matrix pts = random_matrix(9, 3, 2);
  const auto km = kmeans(pts, 9, 1);
  EXPECT_NEAR(km.within_ss, 0.0, 1e-20);
  std::set<int> distinct(km.labels.begin(), km.labels.end());
  EXPECT_EQ(distinct.size(), 9u);
}

TEST(KMeans, BeatsRandomPartitions) {
  const Matrix pts = random_matrix(40, 3, 6);
  const auto km = kmeans(pts, 3, 2);
  EXPECT_NEAR(km.within_ss, partition_ss(pts, km.labels, 3), 1e-9);
  RngStream rng(7);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> labels(40);
    for (auto& l : labels) l = static_cast<int>(rng.index(3));
    ASSERT_LE(km.within_ss, partition_ss(pts, labels, 3) + 1e-12);
  }
}

TEST(KMeans, CodesWrapper) {
  SomGrid g = make_grid(3, 3, 2);
  g.codes = random_matrix(9, 2, 1);
  const auto km = kmeans_codes(g, 3, 5);
  EXPECT_EQ(km.labels.size(), 9u);
}

TEST(Fcm, EquidistantAndCoincident) {
  Matrix centers(2, 1);
  centers << -1, 1;
  Matrix pts(3, 1);
  pts << 0, 1, 0.3;
  const Matrix u = fcm_memberships(pts, centers, 2.0);
  EXPECT_NEAR(u(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(u(0, 1), 0.5, 1e-15);
  EXPECT_EQ(u(1, 1), 1.0);
  EXPECT_EQ(u(1, 0), 0.0);
  // (d1/d2)^2 with d1 = 1.3, d2 = 0.7 gives u = 1 / (1 + (1.3 / 0.7)^2).
  EXPECT_NEAR(u(2, 0), 1.0 / (1.0 + std::pow(1.3 / 0.7, 2)), 1e-15);
}

TEST(Fcm, RowsSumToOne) {
  SomGrid g = make_grid(4, 4, 3);
  g.codes = random_matrix(16, 3, 2);
  const auto res = fcm_codes(g, 3, 2.0, 1);
  for (Eigen::Index i = 0; i < 16; ++i) EXPECT_NEAR(res.memberships.row(i).sum(), 1.0, 1e-8);
  EXPECT_LE(res.iterations, 500);
}
