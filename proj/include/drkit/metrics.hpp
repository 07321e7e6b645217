#pragma once

#include "drkit/types.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace drkit {

double pearson(std::span<const double> x, std::span<const double> y);
/// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// p x p Pearson matrix. Throws constant_feature / missing_data.
Matrix correlation_matrix(const DataMatrix& data);

/// Correlations of every other feature against `feature`, strongest positive first.
std::vector<std::pair<std::string, double>> focus_correlations(const DataMatrix& data, const Matrix& corr,
                                                               const std::string& feature);

/// Rank-based neighbor preservation: penalizes embedding-space k-neighbors that
/// are not data-space k-neighbors. Requires k < n/2.
double trustworthiness(const Matrix& high, const Matrix& low, int k);
/// Mirror of trustworthiness: penalizes data-space neighbors missing from the embedding.
double continuity(const Matrix& high, const Matrix& low, int k);

struct RhoResult {
  double rho = 0.0;
  double one_minus_rho_sq = 1.0;
  std::size_t pairs = 0;
};

/// Pearson correlation between data-space and embedding-space pairwise
/// distances. All pairs are used when n(n-1)/2 <= max_pairs, otherwise
/// max_pairs pairs are drawn with a seeded stream.
RhoResult rho_projection(const Matrix& high, const Matrix& low, std::size_t max_pairs, std::uint64_t seed);

struct EmbeddingReport {
  std::string algo_tag;
  int k = 0;
  double trustworthiness = 0.0;
  double continuity = 0.0;
  double rho = 0.0;
  double one_minus_rho_sq = 1.0;
  double runtime_seconds = 0.0;
  std::map<std::string, std::string> config;
};

/// Quality scores of an embedding against the data it came from.
EmbeddingReport evaluate_embedding(const Matrix& high, const Matrix& low, const std::string& algo_tag, int k,
                                   std::size_t max_pairs, std::uint64_t seed);

/// JSON object with snake_case keys.
std::string to_json(const EmbeddingReport& report, int indent = 2);

}  // namespace drkit
