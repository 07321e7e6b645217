#include "drkit/datasets.hpp"
#include "drkit/error.hpp"
#include "drkit/neighbors.hpp"
#include "drkit/umap.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace drkit;
using drkit::testing::random_matrix;

namespace {

double target_curve(double x, double min_dist, double spread) {
  return x < min_dist ? 1.0 : std::exp(-(x - min_dist) / spread);
}

double curve_sse(double a, double b, double min_dist, double spread) {
  double s = 0.0;
  for (int i = 0; i < 300; ++i) {
    const double x = 3.0 * spread * i / 299.0;
    const double f = 1.0 / (1.0 + a * std::pow(x, 2.0 * b));
    const double r = f - target_curve(x, min_dist, spread);
    s += r * r;
  }
  return s;
}

// Independent fit: shrinking grid search, no derivatives.
CurveParams grid_fit(double min_dist, double spread) {
  double a = 1.0, b = 1.0, step = 0.5;
  for (int round = 0; round < 40; ++round) {
    double best = curve_sse(a, b, min_dist, spread), ba = a, bb = b;
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        const double ta = a + i * step * 0.1, tb = b + j * step * 0.1;
        if (ta <= 0 || tb <= 0) continue;
        const double s = curve_sse(ta, tb, min_dist, spread);
        if (s < best) {
          best = s;
          ba = ta;
          bb = tb;
        }
      }
    }
    a = ba;
    b = bb;
    step *= 0.6;
  }
  return {a, b};
}

double nn_purity(const Matrix& y, const std::vector<int>& labels) {
  const auto g = knn_exact(y, 1);
  int agree = 0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    agree += labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(g.indices(i, 0))];
  }
  return static_cast<double>(agree) / static_cast<double>(y.rows());
}

}  // namespace

TEST(SmoothKnn, NearestNeighborMembershipIsOne) {
  const std::vector<double> d{0.5, 0.9, 1.4, 2.0, 3.1};
  const auto s = smooth_knn(d);
  EXPECT_EQ(s.rho, 0.5);
  EXPECT_EQ(s.memberships[0], 1.0);
  EXPECT_FALSE(s.degenerate);
}

TEST(SmoothKnn, SumHitsTarget) {
  RngStream rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> d(15);
    double acc = rng.uniform();
    for (auto& v : d) {
      acc += rng.uniform();
      v = acc;
    }
    const auto s = smooth_knn(d);
    ASSERT_FALSE(s.degenerate);
    double sum = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) sum += std::exp(-std::max(0.0, d[j] - s.rho) / s.sigma);
    ASSERT_NEAR(sum, std::log2(15.0), 1e-4);
    ASSERT_LE(s.iterations, 64);
  }
}

TEST(SmoothKnn, AllEqualIsDegenerate) {
  const std::vector<double> d(8, 1.7);
  const auto s = smooth_knn(d);
  EXPECT_TRUE(s.degenerate);
  for (double m : s.memberships) EXPECT_EQ(m, 1.0);
}

TEST(FuzzyUnion, Scalars) {
  EXPECT_DOUBLE_EQ(fuzzy_union(1.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(fuzzy_union(0.5, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(fuzzy_union(0.3, 0.0), 0.3);
}

TEST(FuzzyUnion, GraphSymmetricAndBounded) {
  const Matrix x = random_matrix(80, 5, 4);
  const auto fg = build_fuzzy_graph(knn_exact(x, 10));
  ASSERT_EQ(fg.head.size(), fg.weight.size());
  for (std::size_t e = 0; e < fg.head.size(); ++e) {
    ASSERT_NE(fg.head[e], fg.tail[e]);
    ASSERT_GT(fg.weight[e], 0.0);
    ASSERT_LE(fg.weight[e], 1.0);
    ASSERT_EQ(fg.membership(fg.tail[e], fg.head[e]), fg.weight[e]);
  }
}

TEST(FuzzyUnion, MatchesDirectedFormula) {
  const Matrix x = random_matrix(30, 3, 5);
  const auto g = knn_exact(x, 5);
  std::vector<SmoothKnn> rows;
  Matrix directed = Matrix::Zero(30, 30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    std::vector<double> d;
    for (int c = 0; c < 5; ++c) d.push_back(g.distances(i, c));
    rows.push_back(smooth_knn(d));
    for (int c = 0; c < 5; ++c) directed(i, g.indices(i, c)) = rows.back().memberships[static_cast<std::size_t>(c)];
  }
  const auto fg = fuzzy_union(g, rows);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 30; ++j) {
      const double expect = directed(i, j) + directed(j, i) - directed(i, j) * directed(j, i);
      ASSERT_NEAR(fg.membership(i, j), expect, 1e-15);
    }
  }
}

TEST(CrossEntropy, Examples) {
  const std::vector<double> h{0.3, 0.9}, one{1.0}, half{0.5};
  EXPECT_NEAR(cross_entropy(h, h), 0.0, 1e-15);
  EXPECT_NEAR(cross_entropy(one, half), std::log(2.0), 1e-9);
  RngStream rng(2);
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> a{rng.uniform()}, b{rng.uniform()};
    ASSERT_GE(cross_entropy(a, b), 0.0);
  }
}

TEST(CurveFit, FrozenReferenceAndIndependentFit) {
  const auto ab = fit_ab(0.1, 1.0);
  EXPECT_NEAR(ab.a, 1.577, 0.01);
  EXPECT_NEAR(ab.b, 0.895, 0.01);
  const auto oracle = grid_fit(0.1, 1.0);
  EXPECT_NEAR(ab.a, oracle.a, 1e-3);
  EXPECT_NEAR(ab.b, oracle.b, 1e-3);
  const auto wide = fit_ab(0.5, 1.0);
  EXPECT_NEAR(wide.a, 0.583, 0.01);
  EXPECT_NEAR(wide.b, 1.334, 0.01);
}

TEST(Run, SeparatesClusters) {
  const auto lab =
      make_gaussian_clusters(100, {Vector::Constant(10, -10.0), Vector::Constant(10, 10.0)}, 1.0, 1);
  UmapConfig cfg;
  cfg.seed = 1;
  const auto res = umap_run(lab.data.values, cfg);
  EXPECT_GE(nn_purity(res.embedding.coords, lab.labels), 0.99);
}

TEST(Run, MoreEpochsLowerCost) {
  const auto sc = make_s_curve(300, 0.05, 2);
  UmapConfig cfg;
  cfg.k = 5;
  cfg.seed = 3;
  cfg.epochs = 20;
  const auto short_run = umap_run(sc.data.values, cfg);
  cfg.epochs = 500;
  const auto long_run = umap_run(sc.data.values, cfg);
  const double ce_short = cross_entropy(short_run.graph, short_run.embedding.coords, short_run.curve.a,
                                        short_run.curve.b);
  const double ce_long = cross_entropy(long_run.graph, long_run.embedding.coords, long_run.curve.a,
                                       long_run.curve.b);
  EXPECT_LT(ce_long, ce_short);
}

TEST(Run, Reproducible) {
  const Matrix x = random_matrix(100, 4, 1);
  UmapConfig cfg;
  cfg.seed = 11;
  cfg.epochs = 50;
  EXPECT_EQ(umap_run(x, cfg).embedding.coords, umap_run(x, cfg).embedding.coords);
}

TEST(Run, BadConfig) {
  const Matrix x = random_matrix(10, 2, 1);
  UmapConfig cfg;
  cfg.k = 10;
  EXPECT_THROW(umap_run(x, cfg), Error);
  cfg.k = 3;
  cfg.epochs = 0;
  EXPECT_THROW(umap_run(x, cfg), Error);
}
