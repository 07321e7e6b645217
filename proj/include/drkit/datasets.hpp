#pragma once

#include "drkit/types.hpp"

#include <cstdint>
#include <vector>

namespace drkit {

struct SCurve {
  DataMatrix data;  // columns x, y, z
  Vector arc;       // curve parameter t per row
};

/// Points (sin t, y, sign(t)(cos t - 1)) with t ~ U[-3pi/2, 3pi/2],
/// y ~ U[0, 2], plus isotropic Gaussian noise of sd `noise`.
SCurve make_s_curve(int n, double noise, std::uint64_t seed);

struct LabeledData {
  DataMatrix data;
  std::vector<int> labels;
};

/// n_per points around each center with isotropic sd. sd == 0 reproduces the
/// centers exactly. Rows are grouped by center, labels 0..centers-1.
LabeledData make_gaussian_clusters(int n_per, const std::vector<Vector>& centers, double sd,
                                   std::uint64_t seed);

}  // namespace drkit
