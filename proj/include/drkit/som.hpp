#pragma once

#include "drkit/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace drkit {

/// Rectangular lattice of code vectors. Node index = row * cols + col and
/// node_xy holds (row, col) lattice coordinates.
struct SomGrid {
  int rows = 0;
  int cols = 0;
  Matrix codes;    // (rows*cols) x p
  Matrix node_xy;  // (rows*cols) x 2

  int nodes() const { return rows * cols; }
};

struct SomConfig {
  int rlen = 100;  // passes over the data
  double alpha_start = 0.1;
  double alpha_end = 0.001;
  double radius_start = 0.0;  // <= 0 selects half the lattice diagonal
  double radius_end = 1e-3;
  std::uint64_t seed = 0;
};

/// Per-epoch mean distance of presented observations to their BMU codes.
struct SomTrace {
  std::vector<double> mean_distance;
};

/// Empty lattice with coordinates but zero codes.
SomGrid make_grid(int rows, int cols, Eigen::Index p);

/// Codes initialized from distinct randomly chosen data rows (with
/// replacement only when there are more nodes than rows).
SomGrid init_grid_from_data(const Matrix& x, int rows, int cols, std::uint64_t seed);

/// Nearest code by Euclidean distance, lowest node index on ties.
int find_bmu(const SomGrid& grid, std::span<const double> x);

/// exp(-d^2 / (2 sigma^2)) with d the lattice distance between the two nodes.
double neighborhood_factor(const SomGrid& grid, int bmu, int node, double sigma);

/// start * exp(-t / V) with V chosen so the value at t_end equals `end`.
double decay_schedule(double start, double end, double t, double t_end);

/// One presentation: w_j += alpha * h(bmu, j, sigma) * (x - w_j) for every node.
void som_update(SomGrid& grid, std::span<const double> x, int bmu, double alpha, double sigma);

struct SomResult {
  SomGrid grid;
  SomTrace trace;
};

/// rlen seeded-shuffle passes over the rows of x, with alpha and sigma decaying
/// exponentially across all presentations.
SomResult som_train(const Matrix& x, SomGrid grid0, const SomConfig& cfg);

struct SomMapping {
  std::vector<int> node;    // BMU per row
  std::vector<int> counts;  // rows per node
};

SomMapping map_observations(const SomGrid& grid, const Matrix& x);

struct KMeansResult {
  std::vector<int> labels;
  Matrix centers;
  double within_ss = 0.0;
  int empty_cluster_reseeds = 0;
};

/// Lloyd's algorithm with k-means++ seeding; the best of `restarts` runs by
/// within-cluster sum of squares. Empty clusters are re-seeded with the point
/// farthest from its center.
KMeansResult kmeans(const Matrix& points, int n_clusters, std::uint64_t seed, int restarts = 50,
                    int max_iter = 300);

KMeansResult kmeans_codes(const SomGrid& grid, int n_clusters, std::uint64_t seed);

struct FcmResult {
  Matrix memberships;  // points x clusters, rows sum to one
  Matrix centers;
  int iterations = 0;
};

/// Fuzzy memberships u_ij = 1 / sum_k (d_ij / d_ik)^(2 / (m - 1)). A point that
/// sits exactly on a center is assigned crisply to it.
Matrix fcm_memberships(const Matrix& points, const Matrix& centers, double m = 2.0);

/// Fuzzy c-means with alternating updates until center drift < 1e-6 or 500 iterations.
FcmResult fcm(const Matrix& points, int n_clusters, double m, std::uint64_t seed);

FcmResult fcm_codes(const SomGrid& grid, int n_clusters, double m, std::uint64_t seed);

}  // namespace drkit
