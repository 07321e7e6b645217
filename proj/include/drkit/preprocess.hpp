#pragma once

#include "drkit/types.hpp"

#include <array>
#include <cstdint>

namespace drkit {

struct Standardized {
  DataMatrix data;
  Vector centers;
  Vector scales;
};

/// Center each column on its mean and divide by its sample (n-1) standard
/// deviation. Throws constant_feature / missing_data.
Standardized standardize(const DataMatrix& data);

/// Apply stored centers/scales to new data with the same columns.
DataMatrix apply_standardization(const DataMatrix& data, const Vector& centers, const Vector& scales);

struct SplitSpec {
  double train = 0.6;
  double test = 0.2;
  double validation = 0.2;
  std::uint64_t seed = 0;
};

struct SplitPart {
  DataMatrix data;
  std::vector<int> rows;  // indices into the source matrix, ascending
};

struct Split {
  SplitPart train;
  SplitPart test;
  SplitPart validation;
};

/// Seeded partition into train/test/validation. Test and validation sizes are
/// floor(n * fraction); the remainder goes to train.
Split split(const DataMatrix& data, const SplitSpec& spec);

/// Row index sets only; used when labels travel alongside the matrix.
std::array<std::vector<int>, 3> split_indices(int n, const SplitSpec& spec);

}  // namespace drkit
