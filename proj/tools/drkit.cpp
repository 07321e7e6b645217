#include "drkit/cli/params.hpp"
#include "drkit/cli/run.hpp"
#include "drkit/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace drkit::cli;

struct Common {
  std::string input;
  std::string select;
  std::string label;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<bool> standardize;
  std::string config;
  std::string missing;
  std::vector<double> sentinels;
  std::optional<int> eval_k;
};

void add_common(CLI::App* cmd, Common& c, bool with_config) {
  cmd->add_option("--input", c.input, "input CSV file");
  cmd->add_option("--select", c.select, "feature columns, comma list or @file");
  cmd->add_option("--label", c.label, "label column (not used as a feature)");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--missing", c.missing, "extra missing-value tokens, comma list");
  cmd->add_option("--sentinel", c.sentinels, "numeric codes treated as missing")->delimiter(',');
  if (with_config) {
    cmd->add_flag("--standardize,!--no-standardize", c.standardize, "center and scale features (default on)");
    cmd->add_option("--config", c.config, "key=value config file");
    cmd->add_option("--eval-k", c.eval_k, "neighbors for trustworthiness and continuity");
  }
}

std::vector<std::string> missing_tokens(const std::string& extra) {
  std::vector<std::string> tokens{"NA", ""};
  if (!extra.empty()) {
    for (auto& t : parse_select(extra)) tokens.push_back(t);
  }
  return tokens;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw drkit::Error(drkit::ErrorCode::bad_config, std::string(flag) + " is required");
}

RunConfig build_run_config(const std::string& algo, const Common& c, const std::map<std::string, std::string>& given) {
  RunConfig cfg;
  cfg.algo = algo;
  if (!c.config.empty()) apply_config(cfg, read_config_file(c.config));
  // explicit flags win over the config file
  if (!c.input.empty()) cfg.input = c.input;
  if (!c.select.empty()) cfg.select = parse_select(c.select);
  if (!c.label.empty()) cfg.label = c.label;
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.out = c.out;
  if (c.standardize) cfg.standardize = *c.standardize;
  if (!c.missing.empty()) cfg.missing_tokens = missing_tokens(c.missing);
  if (!c.sentinels.empty()) cfg.sentinels = c.sentinels;
  if (c.eval_k) cfg.eval_k = *c.eval_k;
  for (const auto& [k, v] : given) cfg.params[k] = v;
  require(cfg.input.string(), "--input");
  require(cfg.out.string(), "--out");
  return cfg;
}

void print_outcome(const RunOutcome& o) {
  for (const auto& w : o.warnings) std::cerr << "warning: " << w << '\n';
  if (o.report) {
    std::cout << "trustworthiness " << o.report->trustworthiness << "  continuity " << o.report->continuity
              << "  rho " << o.report->rho << '\n';
  }
  for (const auto& [k, v] : o.extras) std::cout << k << ' ' << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drkit: dimension reduction for tabular data"};
  app.require_subcommand(1);

  std::map<std::string, Common> commons;
  std::map<std::string, std::map<std::string, std::string>> algo_values;
  std::vector<std::pair<std::string, CLI::App*>> algo_cmds;
  for (const auto& algo : algorithm_names()) {
    CLI::App* cmd = app.add_subcommand(algo, "run " + algo);
    add_common(cmd, commons[algo], true);
    auto& values = algo_values[algo];
    for (const auto& def : param_defs(algo)) {
      if (def.kind == ParamKind::flag) {
        cmd->add_flag_callback("--" + def.name, [&values, name = def.name] { values[name] = "true"; }, def.help);
      } else {
        cmd->add_option_function<std::string>(
            "--" + def.name, [&values, name = def.name](const std::string& v) { values[name] = v; },
            def.help + " (default " + def.default_value + ")");
      }
    }
    algo_cmds.emplace_back(algo, cmd);
  }

  Common grid_common;
  std::string grid_algo;
  std::vector<std::string> grid_axes;
  std::vector<std::string> grid_fixed;
  int grid_workers = 1;
  CLI::App* grid = app.add_subcommand("grid", "Cartesian grid search over algorithm parameters");
  add_common(grid, grid_common, true);
  grid->add_option("--algo", grid_algo, "algorithm to search")->required();
  grid->add_option("--param", grid_axes, "axis name=v1,v2,... (repeatable)")->required();
  grid->add_option("--set", grid_fixed, "fixed parameter name=value (repeatable)");
  grid->add_option("--workers", grid_workers, "parallel cells");

  Common impute_common;
  int impute_k = 5;
  std::string impute_distance = "euclidean";
  CLI::App* impute = app.add_subcommand("impute", "kNN imputation with before/after summaries");
  add_common(impute, impute_common, false);
  impute->add_option("--k", impute_k, "donor count");
  impute->add_option("--distance", impute_distance, "euclidean or manhattan");

  Common sum_common;
  bool sum_corr = false;
  std::string sum_focus;
  CLI::App* summarize = app.add_subcommand("summarize", "per-feature summary table");
  add_common(summarize, sum_common, false);
  summarize->add_flag("--correlations", sum_corr, "write the correlation matrix");
  summarize->add_option("--focus", sum_focus, "feature to rank correlations against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    for (const auto& [algo, cmd] : algo_cmds) {
      if (!cmd->parsed()) continue;
      const RunConfig cfg = build_run_config(algo, commons[algo], algo_values[algo]);
      print_outcome(run_algorithm(cfg));
      std::cout << "wrote " << cfg.out.string() << '\n';
      return 0;
    }
    if (grid->parsed()) {
      std::map<std::string, std::string> fixed;
      for (const auto& f : grid_fixed) {
        auto [name, values] = parse_grid_axis(f);
        if (values.size() != 1) throw drkit::Error(drkit::ErrorCode::bad_config, "--set " + name + " takes one value");
        fixed[name] = values[0];
      }
      const RunConfig base = build_run_config(grid_algo, grid_common, fixed);
      GridSpec spec;
      spec.algo = grid_algo;
      spec.workers = grid_workers;
      for (const auto& a : grid_axes) spec.axes.push_back(parse_grid_axis(a));
      const GridResult res = run_grid(spec, base);
      int failed = 0;
      for (const auto& cell : res.cells) {
        if (cell.status != "ok") {
          ++failed;
          std::cerr << "cell " << cell.dir_name << " failed: " << cell.error << '\n';
        }
      }
      std::cout << res.cells.size() << " cells, " << failed << " failed, " << res.wall_seconds << " s\n";
      return 0;
    }
    if (impute->parsed()) {
      ImputeCommand cmd;
      require(impute_common.input, "--input");
      require(impute_common.out, "--out");
      cmd.input = impute_common.input;
      if (!impute_common.select.empty()) cmd.select = parse_select(impute_common.select);
      if (!impute_common.label.empty()) cmd.label = impute_common.label;
      cmd.k = impute_k;
      cmd.distance = impute_distance;
      cmd.out = impute_common.out;
      if (!impute_common.missing.empty()) cmd.missing_tokens = missing_tokens(impute_common.missing);
      cmd.sentinels = impute_common.sentinels;
      impute_command(cmd);
      std::cout << "wrote " << cmd.out.string() << '\n';
      return 0;
    }
    if (summarize->parsed()) {
      SummarizeCommand cmd;
      require(sum_common.input, "--input");
      require(sum_common.out, "--out");
      cmd.input = sum_common.input;
      if (!sum_common.select.empty()) cmd.select = parse_select(sum_common.select);
      if (!sum_common.label.empty()) cmd.label = sum_common.label;
      cmd.out = sum_common.out;
      cmd.correlations = sum_corr;
      if (!sum_focus.empty()) cmd.focus = sum_focus;
      if (!sum_common.missing.empty()) cmd.missing_tokens = missing_tokens(sum_common.missing);
      cmd.sentinels = sum_common.sentinels;
      summarize_command(cmd);
      std::cout << "wrote " << cmd.out.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "drkit: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 1;
}
