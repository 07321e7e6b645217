#include "drkit/metrics.hpp"

#include "drkit/error.hpp"
#include "drkit/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drkit {
namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = r;
    i = j + 1;
  }
  return ranks;
}

double sq_dist(const Matrix& x, Eigen::Index i, Eigen::Index j) { return (x.row(i) - x.row(j)).squaredNorm(); }

// Ordering of all other rows by distance from i (ties by index); rank[j] is 1-based.
void rank_from(const Matrix& x, Eigen::Index i, std::vector<int>& order, std::vector<int>& rank,
               std::vector<double>& d) {
  const Eigen::Index n = x.rows();
  order.clear();
  for (Eigen::Index j = 0; j < n; ++j) {
    d[static_cast<std::size_t>(j)] = sq_dist(x, i, j);
    if (j != i) order.push_back(static_cast<int>(j));
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = d[static_cast<std::size_t>(a)];
    const double db = d[static_cast<std::size_t>(b)];
    return da < db || (da == db && a < b);
  });
  rank[static_cast<std::size_t>(i)] = 0;
  for (std::size_t m = 0; m < order.size(); ++m) rank[static_cast<std::size_t>(order[m])] = static_cast<int>(m + 1);
}

// Shared core: penalize points in `b`'s k-neighborhood that rank beyond k in `a`.
double neighborhood_preservation(const Matrix& a, const Matrix& b, int k) {
  const Eigen::Index n = a.rows();
  if (b.rows() != n) throw Error(ErrorCode::dimension_mismatch, "data and embedding differ in row count");
  if (k < 1 || 2 * k >= n) throw Error(ErrorCode::k_too_large, "k must satisfy 1 <= k < n/2");
  std::vector<int> order_a, rank_a(static_cast<std::size_t>(n)), order_b, rank_b(static_cast<std::size_t>(n));
  std::vector<double> d(static_cast<std::size_t>(n));
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    rank_from(a, i, order_a, rank_a, d);
    rank_from(b, i, order_b, rank_b, d);
    for (int m = 0; m < k; ++m) {
      const int j = order_b[static_cast<std::size_t>(m)];
      const int r = rank_a[static_cast<std::size_t>(j)];
      if (r > k) penalty += r - k;
    }
  }
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return 1.0 - 2.0 / (nn * kk * (2.0 * nn - 3.0 * kk - 1.0)) * penalty;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::length_mismatch, "correlation inputs differ in length");
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

Matrix correlation_matrix(const DataMatrix& data) {
  data.require_complete();
  const Eigen::Index p = data.cols();
  Matrix centered = data.values.rowwise() - data.values.colwise().mean();
  Vector norms = centered.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(norms[j] > 0.0)) {
      throw Error(ErrorCode::constant_feature, "feature '" + data.feature_names[static_cast<std::size_t>(j)] +
                                                   "' is constant");
    }
  }
  Matrix c = (centered.transpose() * centered).array() / (norms * norms.transpose()).array();
  for (Eigen::Index i = 0; i < p; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double v = std::clamp(0.5 * (c(i, j) + c(j, i)), -1.0, 1.0);
      c(i, j) = c(j, i) = v;
    }
  }
  return c;
}

std::vector<std::pair<std::string, double>> focus_correlations(const DataMatrix& data, const Matrix& corr,
                                                               const std::string& feature) {
  const int f = data.feature_index(feature);
  if (f < 0) throw Error(ErrorCode::missing_column, "feature '" + feature + "' not found");
  std::vector<std::pair<std::string, double>> out;
  for (Eigen::Index j = 0; j < corr.cols(); ++j) {
    if (j != f) out.emplace_back(data.feature_names[static_cast<std::size_t>(j)], corr(f, j));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

double trustworthiness(const Matrix& high, const Matrix& low, int k) {
  return neighborhood_preservation(high, low, k);
}

double continuity(const Matrix& high, const Matrix& low, int k) { return neighborhood_preservation(low, high, k); }

RhoResult rho_projection(const Matrix& high, const Matrix& low, std::size_t max_pairs, std::uint64_t seed) {
  const Eigen::Index n = high.rows();
  if (low.rows() != n) throw Error(ErrorCode::dimension_mismatch, "data and embedding differ in row count");
  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  std::vector<double> dh, dl;
  if (total <= max_pairs) {
    dh.reserve(total);
    dl.reserve(total);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        dh.push_back(std::sqrt(sq_dist(high, i, j)));
        dl.push_back(std::sqrt(sq_dist(low, i, j)));
      }
    }
  } else {
    RngStream rng(seed);
    dh.reserve(max_pairs);
    dl.reserve(max_pairs);
    for (std::size_t m = 0; m < max_pairs; ++m) {
      const auto i = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
      auto j = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n - 1)));
      if (j >= i) ++j;
      dh.push_back(std::sqrt(sq_dist(high, i, j)));
      dl.push_back(std::sqrt(sq_dist(low, i, j)));
    }
  }
  RhoResult r;
  r.pairs = dh.size();
  r.rho = pearson(dh, dl);
  r.one_minus_rho_sq = 1.0 - r.rho * r.rho;
  return r;
}

EmbeddingReport evaluate_embedding(const Matrix& high, const Matrix& low, const std::string& algo_tag, int k,
                                   std::size_t max_pairs, std::uint64_t seed) {
  EmbeddingReport rep;
  rep.algo_tag = algo_tag;
  const int n = static_cast<int>(high.rows());
  rep.k = std::max(1, std::min(k, (n - 1) / 2));
  rep.trustworthiness = trustworthiness(high, low, rep.k);
  rep.continuity = continuity(high, low, rep.k);
  const auto rho = rho_projection(high, low, max_pairs, seed);
  rep.rho = rho.rho;
  rep.one_minus_rho_sq = rho.one_minus_rho_sq;
  return rep;
}

std::string to_json(const EmbeddingReport& report, int indent) {
  nlohmann::ordered_json j;
  j["algo_tag"] = report.algo_tag;
  j["k"] = report.k;
  j["trustworthiness"] = report.trustworthiness;
  j["continuity"] = report.continuity;
  j["rho"] = report.rho;
  j["one_minus_rho_sq"] = report.one_minus_rho_sq;
  j["runtime_seconds"] = report.runtime_seconds;
  j["config"] = report.config;
  return j.dump(indent);
}

}  // namespace drkit
