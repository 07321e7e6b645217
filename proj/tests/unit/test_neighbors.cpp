#include "drkit/error.hpp"
#include "drkit/neighbors.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

using namespace drkit;

namespace {

// Second implementation: full sort of (distance, index) pairs per row.
Eigen::MatrixXi rescan_oracle(const Matrix& x, int k) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXi out(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> all;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) all.emplace_back((x.row(i) - x.row(j)).norm(), static_cast<int>(j));
    }
    std::sort(all.begin(), all.end());
    for (int c = 0; c < k; ++c) out(i, c) = all[static_cast<std::size_t>(c)].second;
  }
  return out;
}

}  // namespace

TEST(Distance, Euclidean) {
  const std::vector<double> a{0, 0}, b{3, 4};
  EXPECT_DOUBLE_EQ(euclidean(a, b), 5.0);
  EXPECT_DOUBLE_EQ(euclidean(a, a), 0.0);
  const std::vector<double> s{3}, t{7};
  EXPECT_DOUBLE_EQ(euclidean(s, t), 4.0);
}

TEST(Distance, Manhattan) {
  const std::vector<double> a{1, 2}, b{4, 6};
  EXPECT_DOUBLE_EQ(manhattan(a, b), 7.0);
  EXPECT_DOUBLE_EQ(manhattan(a, a), 0.0);
  const std::vector<double> s{3}, t{7};
  EXPECT_DOUBLE_EQ(manhattan(s, t), 4.0);
}

TEST(Distance, LengthMismatch) {
  const std::vector<double> a{1, 2}, b{1};
  EXPECT_THROW(euclidean(a, b), Error);
  EXPECT_THROW(manhattan(a, b), Error);
}

TEST(Knn, OneDimensionalExample) {
  Matrix x(3, 1);
  x << 0, 1, 10;
  const auto g = knn_exact(x, 1);
  EXPECT_EQ(g.indices(0, 0), 1);
  EXPECT_EQ(g.indices(1, 0), 0);
  EXPECT_EQ(g.indices(2, 0), 1);
}

TEST(Knn, AllOthersAtKNMinusOne) {
  const Matrix x = drkit::testing::random_matrix(8, 2, 3);
  const auto g = knn_exact(x, 7);
  for (Eigen::Index i = 0; i < 8; ++i) {
    std::vector<int> got;
    for (int c = 0; c < 7; ++c) got.push_back(g.indices(i, c));
    std::sort(got.begin(), got.end());
    std::vector<int> expect;
    for (int j = 0; j < 8; ++j) {
      if (j != i) expect.push_back(j);
    }
    EXPECT_EQ(got, expect);
  }
}

TEST(Knn, MatchesRescanOracle) {
  const Matrix x = drkit::testing::random_matrix(200, 5, 21);
  const auto g = knn_exact(x, 10);
  EXPECT_EQ(g.indices, rescan_oracle(x, 10));
  for (Eigen::Index i = 0; i < 200; ++i) {
    for (int c = 1; c < 10; ++c) ASSERT_LE(g.distances(i, c - 1), g.distances(i, c));
  }
}

TEST(Knn, TiesByIndex) {
  Matrix x(4, 1);
  x << 0, 1, -1, 1;
  const auto g = knn_exact(x, 3);
  EXPECT_EQ(g.indices(0, 0), 1);
  EXPECT_EQ(g.indices(0, 1), 2);
  EXPECT_EQ(g.indices(0, 2), 3);
}

TEST(Knn, KTooLarge) {
  const Matrix x = drkit::testing::random_matrix(5, 2, 1);
  try {
    knn_exact(x, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::k_too_large);
  }
  EXPECT_THROW(knn_exact(x, 0), Error);
}

TEST(Knn, PermutationEquivariance) {
  const Matrix x = drkit::testing::random_matrix(30, 3, 8);
  RngStream rng(2);
  const auto perm = rng.permutation(30);
  Matrix px(30, 3);
  for (int i = 0; i < 30; ++i) px.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
  const auto g = knn_exact(x, 4);
  const auto pg = knn_exact(px, 4);
  for (int i = 0; i < 30; ++i) {
    for (int c = 0; c < 4; ++c) {
      EXPECT_EQ(perm[static_cast<std::size_t>(pg.indices(i, c))], g.indices(perm[static_cast<std::size_t>(i)], c));
    }
  }
}

TEST(Distance, TriangleInequalitySampled) {
  const Matrix x = drkit::testing::random_matrix(40, 4, 12);
  const Matrix d = pairwise_distances(x);
  for (int a = 0; a < 40; a += 3) {
    for (int b = 0; b < 40; b += 5) {
      for (int c = 0; c < 40; c += 7) ASSERT_LE(d(a, c), d(a, b) + d(b, c) + 1e-12);
    }
  }
  EXPECT_LT((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}
