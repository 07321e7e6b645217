#pragma once

#include "drkit/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace drkit::cli {

inline constexpr const char* kColorPositive = "#1f5fa8";  // label 1
inline constexpr const char* kColorNegative = "#c8283c";  // label 0
inline constexpr const char* kColorUnlabeled = "#6b6b6b";

struct ScatterSpec {
  std::string title;
  std::string x_label = "dim1";
  std::string y_label = "dim2";
  int width = 640;
  int height = 640;
};

/// Scatter of the first two columns of `coords` (a single column is plotted
/// against zero). Labels 1 and 0 get the two fixed palette colors; any other
/// or missing label is drawn grey. Output has no timestamps.
std::string scatter_svg(const Matrix& coords, const std::optional<std::vector<int>>& labels, const ScatterSpec& spec);

}  // namespace drkit::cli
