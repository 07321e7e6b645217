#pragma once

#include "drkit/cli/params.hpp"
#include "drkit/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace drkit::cli {

struct RunConfig {
  std::string algo;
  std::filesystem::path input;
  std::vector<std::string> select;  // empty: every column except the label
  std::optional<std::string> label;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  bool standardize = true;
  std::map<std::string, std::string> params;
  std::vector<std::string> missing_tokens{"NA", ""};
  std::vector<double> sentinels;
  int eval_k = 10;
  std::size_t eval_pairs = 2000;
  /// key=value pairs read from a config file, echoed into report.json.
  std::map<std::string, std::string> config_echo;
};

/// Lines of `key = value`; '#' starts a comment. Keys input, select, label,
/// seed, out, standardize, algo, eval-k and missing are run settings; every
/// other key is an algorithm parameter.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);

/// "a,b,c" or "@file" (one name per line, or comma separated).
std::vector<std::string> parse_select(const std::string& text);

struct RunOutcome {
  std::string status = "ok";
  std::optional<EmbeddingReport> report;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  double runtime_seconds = 0.0;
  std::map<std::string, double> extras;  // algorithm-specific scalars
};

/// Runs one algorithm and writes its files into cfg.out. report.json is
/// written on failure too (status "error") before the error is rethrown.
RunOutcome run_algorithm(const RunConfig& cfg);

struct GridSpec {
  std::string algo;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;  // in command-line order
  int workers = 1;
};

/// "name=v1,v2,v3"
std::pair<std::string, std::vector<std::string>> parse_grid_axis(const std::string& text);

struct GridCell {
  std::map<std::string, std::string> params;
  std::string dir_name;
  std::uint64_t seed = 0;
  std::string status;
  std::string error;
  double trustworthiness = 0.0;
  double continuity = 0.0;
  double rho = 0.0;
  double runtime_seconds = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;
  double wall_seconds = 0.0;
};

/// Cartesian product of the axes, last axis varying fastest. Each cell runs
/// in out/<name=value_...> with seed derive_seed(base seed, cell index);
/// failures are recorded per cell. Writes out/grid_summary.csv.
GridResult run_grid(const GridSpec& spec, const RunConfig& base);

struct ImputeCommand {
  std::filesystem::path input;
  std::vector<std::string> select;
  std::optional<std::string> label;
  int k = 5;
  std::string distance = "euclidean";
  std::filesystem::path out;
  std::vector<std::string> missing_tokens{"NA", ""};
  std::vector<double> sentinels;
};

/// Writes imputed.csv, summary_raw.csv, summary_imputed.csv and report.json.
void impute_command(const ImputeCommand& cmd);

struct SummarizeCommand {
  std::filesystem::path input;
  std::vector<std::string> select;
  std::optional<std::string> label;
  std::filesystem::path out;
  bool correlations = false;
  std::optional<std::string> focus;
  std::vector<std::string> missing_tokens{"NA", ""};
  std::vector<double> sentinels;
};

/// Writes summary.csv and optionally correlations.csv / focus.csv.
void summarize_command(const SummarizeCommand& cmd);

/// 1 usage, 2 data, 3 numeric.
int exit_code_for(const std::exception& e);

}  // namespace drkit::cli
