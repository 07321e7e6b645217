#pragma once

#include "drkit/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace drkit {

// ---------------------------------------------------------------------------
// CSV reading

/// Raw RFC-4180 table: header plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Parse RFC-4180 text (quoted fields, doubled quotes, CRLF or LF endings).
/// Throws parse_error on ragged rows or unterminated quotes.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

struct CsvSchema {
  std::vector<std::string> select;
  std::optional<std::string> label_column;
  std::vector<std::string> missing_tokens{"NA", ""};
  std::vector<double> sentinel_values;
};

struct LoadedData {
  DataMatrix data;
  /// Category id per row when a label column was requested (-1 = missing).
  std::optional<std::vector<int>> labels;
  /// Original label text for each id.
  std::vector<std::string> label_names;
};

/// Parse the selected columns as reals. Missing tokens and sentinel values set
/// the missing mask. Numeric label columns keep their integer values as ids;
/// otherwise ids follow first appearance.
LoadedData load_csv(const std::filesystem::path& path, const CsvSchema& schema);
LoadedData load_csv(const CsvTable& table, const CsvSchema& schema);

// ---------------------------------------------------------------------------
// Summary statistics

struct FeatureSummary {
  std::string name;
  double complete_pct = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double q2 = 0.0;  // 25th percentile
  double median = 0.0;
  double q3 = 0.0;  // 75th percentile
  double max = 0.0;
  bool defined = false;  // false when every cell is missing
};

using SummaryTable = std::vector<FeatureSummary>;

/// Per-feature statistics over observed cells; quantiles by linear
/// interpolation between order statistics.
SummaryTable summarize(const DataMatrix& data);

/// Columns: feature, complete, mean, sd, min, q2, median, q3, max.
void write_summary_csv(std::ostream& out, const SummaryTable& table);

// ---------------------------------------------------------------------------
// kNN imputation

enum class DistanceKind { euclidean, manhattan };

struct ImputeConfig {
  int k = 5;
  DistanceKind distance = DistanceKind::euclidean;
  std::uint64_t seed = 0;
};

/// Fill each missing cell with the unweighted mean of that feature over the k
/// nearest donor rows (rows observing the feature). Distances use
/// standardized coordinates observed in both rows, scaled by p / shared.
/// Ties go to the lower row index. Observed cells are copied unchanged.
DataMatrix knn_impute(const DataMatrix& data, const ImputeConfig& cfg,
                      std::vector<std::string>* warnings = nullptr);

}  // namespace drkit
