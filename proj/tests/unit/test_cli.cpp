#include "drkit/cli/params.hpp"
#include "drkit/cli/run.hpp"
#include "drkit/cli/svg.hpp"
#include "drkit/error.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace drkit;
using namespace drkit::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("drkit_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_fixture(const fs::path& dir) {
  const Matrix x = drkit::testing::random_matrix(40, 4, 3);
  const fs::path csv = dir / "in.csv";
  std::ofstream out(csv);
  out << "a,b,c,d,label\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out << x(i, 0) << ',' << x(i, 1) << ',' << x(i, 2) << ',' << x(i, 3) << ',' << (i % 2) << '\n';
  }
  return csv;
}

}  // namespace

TEST(Params, IntListForms) {
  EXPECT_EQ(parse_int_list("8,8"), (std::vector<int>{8, 8}));
  EXPECT_EQ(parse_int_list("3:6"), (std::vector<int>{3, 4, 5, 6}));
  EXPECT_THROW(parse_int_list("6:3"), Error);
  EXPECT_THROW(parse_int_list(""), Error);
}

TEST(Params, DefaultsAndValidation) {
  const Params p = resolve_params("tsne", {{"perplexity", "50"}});
  EXPECT_EQ(p.real("perplexity"), 50.0);
  EXPECT_EQ(p.real("theta"), 0.5);
  EXPECT_EQ(p.integer("iters"), 1000);
  try {
    resolve_params("tsne", {{"bogus", "1"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::usage);
  }
  EXPECT_THROW(resolve_params("umap", {{"k", "ten"}}), Error);
  EXPECT_THROW(resolve_params("isomap", {}), Error);
  EXPECT_TRUE(resolve_params("autoencoder", {{"overcomplete-ok", "true"}}).flag("overcomplete-ok"));
}

TEST(Grid, AxisParsing) {
  const auto [name, values] = parse_grid_axis("perplexity=25, 50,100");
  EXPECT_EQ(name, "perplexity");
  EXPECT_EQ(values, (std::vector<std::string>{"25", "50", "100"}));
  EXPECT_THROW(parse_grid_axis("k="), Error);
  EXPECT_THROW(parse_grid_axis("k"), Error);
}

TEST(Grid, CellsNamedAndSummarized) {
  const fs::path dir = scratch("grid");
  RunConfig base;
  base.input = write_fixture(dir);
  base.label = "label";
  base.out = dir / "out";
  base.seed = 4;
  GridSpec spec;
  spec.algo = "umap";
  spec.axes = {{"k", {"5", "8"}}, {"epochs", {"10", "20", "30"}}};
  spec.workers = 2;
  const GridResult res = run_grid(spec, base);
  ASSERT_EQ(res.cells.size(), 6u);
  EXPECT_EQ(res.cells[0].dir_name, "k=5_epochs=10");
  EXPECT_EQ(res.cells[1].dir_name, "k=5_epochs=20");
  EXPECT_EQ(res.cells[5].dir_name, "k=8_epochs=30");
  for (const auto& c : res.cells) {
    EXPECT_EQ(c.status, "ok") << c.error;
    EXPECT_TRUE(fs::exists(base.out / c.dir_name / "embedding.csv"));
  }
  EXPECT_NE(res.cells[0].seed, res.cells[1].seed);
  std::ifstream summary(base.out / "grid_summary.csv");
  std::string line;
  int rows = 0;
  while (std::getline(summary, line)) ++rows;
  EXPECT_EQ(rows, 7);

  spec.axes = {{"k", {}}};
  EXPECT_THROW(run_grid(spec, base), Error);
}

TEST(Grid, FailedCellRecorded) {
  const fs::path dir = scratch("grid_fail");
  RunConfig base;
  base.input = write_fixture(dir);
  base.label = "label";
  base.out = dir / "out";
  GridSpec spec;
  spec.algo = "lle";
  spec.axes = {{"k", {"5", "60"}}};
  const GridResult res = run_grid(spec, base);
  EXPECT_EQ(res.cells[0].status, "ok");
  EXPECT_EQ(res.cells[1].status, "error");
  EXPECT_FALSE(res.cells[1].error.empty());
  EXPECT_TRUE(fs::exists(base.out / "k=60" / "report.json"));
}

TEST(Run, ConfigFileEchoedAndFilesWritten) {
  const fs::path dir = scratch("run");
  const fs::path csv = write_fixture(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# pca run\ninput = " << csv.string() << "\nlabel = label\nseed = 9\ncomponents = 3\n";
  }
  RunConfig cfg;
  cfg.algo = "pca";
  apply_config(cfg, read_config_file(dir / "run.cfg"));
  cfg.out = dir / "out";
  const RunOutcome o = run_algorithm(cfg);
  for (const char* f : {"embedding.csv", "scree.csv", "loadings.csv", "scatter.svg", "report.json"}) {
    EXPECT_TRUE(fs::exists(cfg.out / f)) << f;
  }
  const auto report = nlohmann::json::parse(slurp(cfg.out / "report.json"));
  EXPECT_EQ(report["status"], "ok");
  EXPECT_EQ(report["config"]["components"], "3");
  EXPECT_EQ(report["seed"], 9);
  EXPECT_EQ(report["params"]["components"], "3");
  std::ifstream emb(cfg.out / "embedding.csv");
  std::string header;
  std::getline(emb, header);
  EXPECT_EQ(header, "row_id,dim1,dim2,dim3,label");
  EXPECT_NE(slurp(cfg.out / "scatter.svg").find("PC1 ("), std::string::npos);
  ASSERT_TRUE(o.report.has_value());
}

TEST(Run, ReportWrittenOnFailure) {
  const fs::path dir = scratch("run_fail");
  RunConfig cfg;
  cfg.algo = "tsne";
  cfg.input = write_fixture(dir);
  cfg.label = "label";
  cfg.out = dir / "out";
  cfg.params = {{"eta", "1e308"}, {"iters", "20"}};
  try {
    run_algorithm(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e), 3);
  }
  const auto report = nlohmann::json::parse(slurp(cfg.out / "report.json"));
  EXPECT_EQ(report["status"], "error");
  EXPECT_EQ(report["error"]["category"], "numeric");
}

TEST(Run, MissingCellsRejected) {
  const fs::path dir = scratch("run_missing");
  {
    std::ofstream out(dir / "in.csv");
    out << "a,b\n1,2\nNA,3\n4,5\n";
  }
  RunConfig cfg;
  cfg.algo = "pca";
  cfg.input = dir / "in.csv";
  cfg.out = dir / "out";
  try {
    run_algorithm(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::missing_data);
    EXPECT_EQ(exit_code_for(e), 2);
  }
}

TEST(ExitCodes, Categories) {
  EXPECT_EQ(exit_code_for(Error(ErrorCode::bad_config, "x")), 1);
  EXPECT_EQ(exit_code_for(Error(ErrorCode::io, "x")), 2);
  EXPECT_EQ(exit_code_for(Error(ErrorCode::eigen_failure, "x")), 3);
}

TEST(Svg, DeterministicWithPalette) {
  const Matrix y = drkit::testing::random_matrix(10, 2, 1);
  const std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  ScatterSpec spec;
  spec.title = "t";
  const std::string a = scatter_svg(y, labels, spec);
  EXPECT_EQ(a, scatter_svg(y, labels, spec));
  EXPECT_NE(a.find(kColorPositive), std::string::npos);
  EXPECT_NE(a.find(kColorNegative), std::string::npos);
  EXPECT_EQ(a.rfind("<svg", 0) == 0 || a.rfind("<?xml", 0) == 0, true);
  const std::string plain = scatter_svg(y, std::nullopt, spec);
  EXPECT_EQ(plain.find(kColorPositive), std::string::npos);
}
