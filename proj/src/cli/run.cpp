#include "drkit/cli/run.hpp"

#include "drkit/autoencoder.hpp"
#include "drkit/cli/svg.hpp"
#include "drkit/error.hpp"
#include "drkit/format.hpp"
#include "drkit/ingest.hpp"
#include "drkit/lle.hpp"
#include "drkit/pca.hpp"
#include "drkit/preprocess.hpp"
#include "drkit/random.hpp"
#include "drkit/som.hpp"
#include "drkit/tsne.hpp"
#include "drkit/umap.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace drkit::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::io, "cannot create output directory " + dir.string());
}

LoadedData load_input(const fs::path& input, std::vector<std::string> select, const std::optional<std::string>& label,
                      const std::vector<std::string>& tokens, const std::vector<double>& sentinels) {
  const CsvTable table = read_csv_file(input);
  if (select.empty()) {
    for (const auto& h : table.header) {
      if (!label || h != *label) select.push_back(h);
    }
  }
  CsvSchema schema;
  schema.select = std::move(select);
  schema.label_column = label;
  schema.missing_tokens = tokens;
  schema.sentinel_values = sentinels;
  return load_csv(table, schema);
}

std::string error_category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::usage: return "usage";
    case ErrorCategory::data: return "data";
    case ErrorCategory::numeric: return "numeric";
  }
  return "data";
}

std::string embedding_csv(const Matrix& coords, const std::optional<std::vector<int>>& labels) {
  std::string s = "row_id";
  for (Eigen::Index c = 0; c < coords.cols(); ++c) s += ",dim" + std::to_string(c + 1);
  if (labels) s += ",label";
  s += '\n';
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    s += std::to_string(i + 1);
    for (Eigen::Index c = 0; c < coords.cols(); ++c) {
      s += ',';
      s += format_number(coords(i, c));
    }
    if (labels) {
      const int l = (*labels)[static_cast<std::size_t>(i)];
      s += ',';
      s += l < 0 ? std::string("NA") : std::to_string(l);
    }
    s += '\n';
  }
  return s;
}

std::string matrix_csv(const std::vector<std::string>& header, const Matrix& m,
                       const std::vector<std::string>* row_keys = nullptr) {
  std::string s;
  for (std::size_t h = 0; h < header.size(); ++h) {
    if (h) s += ',';
    s += csv_escape(header[h]);
  }
  s += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    bool first = true;
    if (row_keys) {
      s += csv_escape((*row_keys)[static_cast<std::size_t>(i)]);
      first = false;
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!first) s += ',';
      first = false;
      s += format_number(m(i, c));
    }
    s += '\n';
  }
  return s;
}

struct AlgoOutput {
  Matrix coords;
  Matrix high;  // data the embedding is scored against
  std::string x_label = "dim1";
  std::string y_label = "dim2";
  bool has_embedding = true;
};

class RunContext {
 public:
  RunContext(const RunConfig& cfg, RunOutcome& outcome) : cfg_(cfg), outcome_(outcome) {}

  void write(const std::string& name, const std::string& text) {
    write_text(cfg_.out / name, text);
    outcome_.files.push_back(name);
  }
  void warn(std::string w) { outcome_.warnings.push_back(std::move(w)); }
  void extra(const std::string& key, double v) { outcome_.extras[key] = v; }

 private:
  const RunConfig& cfg_;
  RunOutcome& outcome_;
};

Matrix prepared(const DataMatrix& data, bool standardize_flag) {
  data.require_complete();
  return standardize_flag ? standardize(data).data.values : data.values;
}

AlgoOutput run_pca(const DataMatrix& data, const Params& p, bool standardize_flag, RunContext& ctx) {
  data.require_complete();
  const PcaModel model = fit_pca(data, standardize_flag);
  const int comps = p.integer("components");
  if (comps < 1 || comps > data.cols()) {
    throw Error(ErrorCode::bad_config, "components must lie in [1, " + std::to_string(data.cols()) + "]");
  }
  AlgoOutput out;
  out.coords = transform(model, data, comps).coords;
  out.high = standardize_flag ? standardize(data).data.values
                              : Matrix(data.values.rowwise() - data.values.colwise().mean());
  const VarianceReport rep = variance_report(model);
  const Eigen::Index p_all = model.features();
  Matrix scree(p_all, 4);
  for (Eigen::Index j = 0; j < p_all; ++j) scree.row(j) << static_cast<double>(j + 1), rep.sdev[j], rep.pve[j], rep.cpve[j];
  ctx.write("scree.csv", matrix_csv({"component", "sdev", "pve", "cpve"}, scree));
  std::vector<std::string> header{"feature"};
  for (Eigen::Index j = 0; j < p_all; ++j) header.push_back("PC" + std::to_string(j + 1));
  ctx.write("loadings.csv", matrix_csv(header, model.loadings, &model.feature_names));
  out.x_label = "PC1 (" + format_fixed(100.0 * rep.pve[0], 1) + "%)";
  if (p_all > 1) out.y_label = "PC2 (" + format_fixed(100.0 * rep.pve[1], 1) + "%)";
  ctx.extra("pve1", rep.pve[0]);
  ctx.extra("cpve1", rep.cpve[0]);
  if (p_all > 1) {
    ctx.extra("pve2", rep.pve[1]);
    ctx.extra("cpve2", rep.cpve[1]);
  }
  return out;
}

AlgoOutput run_lle(const Matrix& x, const Params& p, RunContext& ctx) {
  const LleModel model = lle_fit(x, p.integer("k"), p.integer("d"), p.real("reg"));
  ctx.extra("rss", model.weights.rss);
  return {model.embedding.coords, x};
}

AlgoOutput run_calc_k(const Matrix& x, const Params& p, std::uint64_t seed, RunContext& ctx) {
  const int pairs = p.integer("max-pairs");
  if (pairs < 1) throw Error(ErrorCode::bad_config, "max-pairs must be >= 1");
  const KScanResult res = calc_k(x, p.int_list("ks"), p.integer("d"), static_cast<std::size_t>(pairs), seed);
  std::string s = "k,rho,score,status\n";
  for (const auto& e : res.entries) {
    s += std::to_string(e.k) + ',' + (e.ok ? format_number(e.rho) : "NA") + ',' +
         (e.ok ? format_number(e.score) : "NA") + ',' + (e.ok ? "ok" : "error") + '\n';
    if (!e.ok) ctx.warn("k=" + std::to_string(e.k) + ": " + e.error);
  }
  ctx.write("calc_k.csv", s);
  ctx.extra("best_k", res.best_k);
  AlgoOutput out;
  out.has_embedding = false;
  return out;
}

AlgoOutput run_tsne(const Matrix& x, const Params& p, std::uint64_t seed, RunContext& ctx) {
  TsneConfig cfg;
  cfg.perplexity = p.real("perplexity");
  cfg.theta = p.real("theta");
  cfg.max_iter = p.integer("iters");
  cfg.learning_rate = p.real("eta");
  cfg.early_exaggeration = p.real("exaggeration");
  cfg.exaggeration_iters = p.integer("exaggeration-iters");
  cfg.momentum_switch_iter = cfg.exaggeration_iters;
  cfg.d = p.integer("d");
  cfg.seed = seed;
  TsneResult res = tsne_run(x, cfg);
  for (auto& w : res.warnings) ctx.warn(w);
  std::string s = "iter,kl\n";
  for (std::size_t i = 0; i < res.kl_trace.size(); ++i) {
    s += std::to_string(i + 1) + ',' + format_number(res.kl_trace[i]) + '\n';
  }
  ctx.write("kl_trace.csv", s);
  ctx.extra("final_kl", res.kl_trace.back());
  return {res.embedding.coords, x};
}

AlgoOutput run_umap(const Matrix& x, const Params& p, std::uint64_t seed, RunContext& ctx) {
  UmapConfig cfg;
  cfg.k = p.integer("k");
  cfg.epochs = p.integer("epochs");
  cfg.min_dist = p.real("min-dist");
  cfg.spread = p.real("spread");
  cfg.learning_rate = p.real("lr");
  cfg.negative_sample_rate = p.real("neg-rate");
  cfg.d = p.integer("d");
  cfg.seed = seed;
  const UmapResult res = umap_run(x, cfg);
  ctx.extra("a", res.curve.a);
  ctx.extra("b", res.curve.b);
  ctx.extra("degenerate_rows", res.graph.degenerate_rows);
  ctx.extra("cross_entropy", cross_entropy(res.graph, res.embedding.coords, res.curve.a, res.curve.b));
  if (res.graph.degenerate_rows > 0) {
    ctx.warn(std::to_string(res.graph.degenerate_rows) + " rows had tied neighbor distances (memberships set to 1)");
  }
  return {res.embedding.coords, x};
}

AlgoOutput run_som(const Matrix& x, const std::vector<std::string>& names, const Params& p, std::uint64_t seed,
                   RunContext& ctx) {
  const int rows = p.integer("rows"), cols = p.integer("cols");
  if (rows < 1 || cols < 1) throw Error(ErrorCode::bad_config, "lattice rows and cols must be >= 1");
  SomConfig cfg;
  cfg.rlen = p.integer("rlen");
  cfg.alpha_start = p.real("alpha-start");
  cfg.alpha_end = p.real("alpha-end");
  cfg.radius_start = p.real("radius");
  cfg.radius_end = p.real("radius-end");
  cfg.seed = derive_seed(seed, 1);
  const SomResult res = som_train(x, init_grid_from_data(x, rows, cols, derive_seed(seed, 0)), cfg);
  const SomMapping map = map_observations(res.grid, x);

  std::vector<std::string> header{"node_row", "node_col"};
  header.insert(header.end(), names.begin(), names.end());
  Matrix codes(res.grid.nodes(), 2 + res.grid.codes.cols());
  codes << res.grid.node_xy, res.grid.codes;
  ctx.write("codes.csv", matrix_csv(header, codes));

  std::string trace = "epoch,mean_bmu_distance\n";
  for (std::size_t e = 0; e < res.trace.mean_distance.size(); ++e) {
    trace += std::to_string(e + 1) + ',' + format_number(res.trace.mean_distance[e]) + '\n';
  }
  ctx.write("trace.csv", trace);

  AlgoOutput out;
  out.high = x;
  out.coords.resize(x.rows(), 2);
  std::string assign = "row_id,node,node_row,node_col\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int node = map.node[static_cast<std::size_t>(i)];
    out.coords(i, 0) = res.grid.node_xy(node, 1);
    out.coords(i, 1) = res.grid.node_xy(node, 0);
    assign += std::to_string(i + 1) + ',' + std::to_string(node) + ',' + format_number(res.grid.node_xy(node, 0)) +
              ',' + format_number(res.grid.node_xy(node, 1)) + '\n';
  }
  ctx.write("assignments.csv", assign);
  out.x_label = "lattice column";
  out.y_label = "lattice row";

  const int k = p.integer("clusters");
  if (k > 0) {
    const KMeansResult km = kmeans_codes(res.grid, k, derive_seed(seed, 2));
    const FcmResult fc = fcm_codes(res.grid, k, p.real("fuzzifier"), derive_seed(seed, 3));
    std::string s = "node_row,node_col,kmeans";
    for (int c = 0; c < k; ++c) s += ",fcm" + std::to_string(c + 1);
    s += '\n';
    for (int j = 0; j < res.grid.nodes(); ++j) {
      s += format_number(res.grid.node_xy(j, 0)) + ',' + format_number(res.grid.node_xy(j, 1)) + ',' +
           std::to_string(km.labels[static_cast<std::size_t>(j)] + 1);
      for (int c = 0; c < k; ++c) s += ',' + format_number(fc.memberships(j, c));
      s += '\n';
    }
    ctx.write("clusters.csv", s);
    ctx.extra("kmeans_within_ss", km.within_ss);
  }
  ctx.extra("final_mean_bmu_distance", res.trace.mean_distance.back());
  return out;
}

Matrix rows_of(const Matrix& m, const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(idx[r]);
  return out;
}

AlgoOutput run_autoencoder(const Matrix& x, const std::optional<std::vector<int>>& labels, const Params& p,
                           std::uint64_t seed, RunContext& ctx) {
  SplitSpec split_spec;
  split_spec.seed = derive_seed(seed, 0);
  const auto parts = split_indices(static_cast<int>(x.rows()), split_spec);
  const Matrix train = rows_of(x, parts[0]);
  const Matrix test = rows_of(x, parts[1]);
  const Matrix valid = rows_of(x, parts[2]);

  AeConfig cfg;
  cfg.hidden_sizes = p.int_list("hidden");
  cfg.epochs = p.integer("epochs");
  cfg.batch_size = p.integer("batch");
  cfg.learning_rate = p.real("lr");
  const std::string& opt = p.text("optimizer");
  if (opt == "sgd") {
    cfg.optimizer = Optimizer::sgd;
  } else if (opt == "momentum") {
    cfg.optimizer = Optimizer::momentum;
  } else {
    throw Error(ErrorCode::bad_config, "optimizer must be sgd or momentum");
  }
  cfg.momentum = p.real("momentum");
  cfg.denoise_sd = p.real("denoise");
  cfg.activation = parse_activation(p.text("activation"));
  cfg.overcomplete_ok = p.flag("overcomplete-ok");
  cfg.seed = derive_seed(seed, 1);
  const AeResult ae = train_autoencoder(train, cfg, valid.rows() > 0 ? &valid : nullptr);

  std::string loss = "epoch,train_loss,holdout_loss\n";
  for (std::size_t e = 0; e < ae.report.train_loss.size(); ++e) {
    loss += std::to_string(e) + ',' + format_number(ae.report.train_loss[e]) + ',' +
            (e < ae.report.holdout_loss.size() ? format_number(ae.report.holdout_loss[e]) : "NA") + '\n';
  }
  ctx.write("loss_curve.csv", loss);
  ctx.extra("final_train_loss", ae.report.train_loss.back());
  if (!ae.report.holdout_loss.empty()) ctx.extra("final_holdout_loss", ae.report.holdout_loss.back());

  const int layer = p.integer("layer");
  const DataMatrix all = deep_features(ae.params, x, layer);
  {
    std::vector<std::string> header{"row_id"};
    header.insert(header.end(), all.feature_names.begin(), all.feature_names.end());
    Matrix tbl(static_cast<Eigen::Index>(parts[0].size()), 1 + all.cols());
    for (std::size_t r = 0; r < parts[0].size(); ++r) {
      tbl(static_cast<Eigen::Index>(r), 0) = parts[0][r] + 1;
      tbl.row(static_cast<Eigen::Index>(r)).tail(all.cols()) = all.values.row(parts[0][r]);
    }
    ctx.write("deep_features.csv", matrix_csv(header, tbl));
  }
  ctx.extra("deep_feature_rows", static_cast<double>(parts[0].size()));
  ctx.extra("deep_feature_cols", static_cast<double>(all.cols()));

  if (labels) {
    auto labeled = [&](const std::vector<int>& idx, std::vector<int>& keep, std::vector<int>& y) {
      for (int r : idx) {
        const int l = (*labels)[static_cast<std::size_t>(r)];
        if (l == 0 || l == 1) {
          keep.push_back(r);
          y.push_back(l);
        }
      }
    };
    bool binary = true;
    for (int l : *labels) binary = binary && (l == 0 || l == 1 || l == -1);
    std::vector<int> tr_rows, tr_y, te_rows, te_y;
    labeled(parts[0], tr_rows, tr_y);
    labeled(parts[1], te_rows, te_y);
    if (!binary) {
      ctx.warn("label column is not binary 0/1; classifier skipped");
    } else if (te_rows.empty()) {
      ctx.warn("no labeled test rows; classifier skipped");
    } else {
      ClassifierConfig ccfg;
      ccfg.hidden_sizes = p.int_list("clf-hidden");
      ccfg.epochs = p.integer("clf-epochs");
      ccfg.batch_size = cfg.batch_size;
      ccfg.learning_rate = cfg.learning_rate;
      ccfg.momentum = cfg.optimizer == Optimizer::momentum ? cfg.momentum : 0.0;
      ccfg.activation = cfg.activation;
      ccfg.seed = derive_seed(seed, 2);
      const Matrix f_train = rows_of(all.values, tr_rows);
      const Matrix f_test = rows_of(all.values, te_rows);
      const MlpParams clf = train_classifier(f_train, tr_y, ccfg);
      const auto pred = predict(clf, f_test);
      const ConfusionMatrix cm = confusion_matrix(pred, te_y);
      std::string s = "predicted,observed_1,observed_0,observed_1_pct,observed_0_pct\n";
      for (int r = 0; r < 2; ++r) {
        s += std::string(r == 0 ? "1" : "0") + ',' + std::to_string(cm.counts[r][0]) + ',' +
             std::to_string(cm.counts[r][1]) + ',' + format_fixed(cm.column_pct[r][0], 1) + ',' +
             format_fixed(cm.column_pct[r][1], 1) + '\n';
      }
      ctx.write("confusion.csv", s);
      const double acc = accuracy(pred, te_y);
      ctx.extra("test_accuracy", acc);
      ctx.extra("train_accuracy", accuracy(predict(clf, f_train), tr_y));
      const int repeats = p.integer("importance-repeats");
      const FeatureImportance imp = permutation_importance(clf, f_test, te_y, repeats, derive_seed(seed, 3));
      std::string is = "feature,raw,relative\n";
      for (std::size_t f = 0; f < imp.raw_drop.size(); ++f) {
        is += all.feature_names[f] + ',' + format_number(imp.raw_drop[f]) + ',' + format_number(imp.relative[f]) + '\n';
      }
      ctx.write("importance.csv", is);
    }
  }
  return {all.values, x};
}

ordered_json params_json(const std::map<std::string, std::string>& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

void write_report(const RunConfig& cfg, const Params* params, const RunOutcome& outcome, Eigen::Index n,
                  Eigen::Index p, const std::exception* failure) {
  ordered_json j;
  j["status"] = outcome.status;
  j["command"] = cfg.algo;
  j["input"] = cfg.input.string();
  j["seed"] = cfg.seed;
  j["standardize"] = cfg.standardize;
  j["n"] = n;
  j["p"] = p;
  j["params"] = params ? params_json(params->values()) : params_json(cfg.params);
  j["config"] = params_json(cfg.config_echo);
  j["runtime_seconds"] = outcome.runtime_seconds;
  if (outcome.report) {
    j["metrics"] = ordered_json::parse(to_json(*outcome.report));
  } else {
    j["metrics"] = nullptr;
  }
  ordered_json extras = ordered_json::object();
  for (const auto& [k, v] : outcome.extras) extras[k] = v;
  j["extras"] = extras;
  j["warnings"] = outcome.warnings;
  std::vector<std::string> files = outcome.files;
  files.push_back("report.json");
  j["files"] = files;
  if (failure) {
    ordered_json err;
    if (const auto* e = dynamic_cast<const Error*>(failure)) {
      err["code"] = name_of(e->code());
      err["category"] = error_category_name(e->category());
    } else {
      err["code"] = "Internal";
      err["category"] = "data";
    }
    err["message"] = failure->what();
    j["error"] = err;
  }
  write_text(cfg.out / "report.json", j.dump(2) + "\n");
}

}  // namespace

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::bad_config, path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::vector<std::string> parse_select(const std::string& text) {
  if (!text.empty() && text[0] == '@') {
    std::ifstream in(text.substr(1));
    if (!in) throw Error(ErrorCode::io, "cannot open selection file " + text.substr(1));
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
      for (auto& s : split_commas(line)) out.push_back(s);
    }
    return out;
  }
  return split_commas(text);
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    cfg.config_echo[k] = v;
    if (k == "input") {
      cfg.input = v;
    } else if (k == "select") {
      cfg.select = parse_select(v);
    } else if (k == "label") {
      cfg.label = v;
    } else if (k == "seed") {
      cfg.seed = static_cast<std::uint64_t>(std::stoull(v));
    } else if (k == "out") {
      cfg.out = v;
    } else if (k == "standardize") {
      cfg.standardize = parse_flag(v);
    } else if (k == "algo") {
      cfg.algo = v;
    } else if (k == "eval-k") {
      cfg.eval_k = parse_int(v);
    } else if (k == "missing") {
      cfg.missing_tokens = split_commas(v);
      cfg.missing_tokens.push_back("");
    } else {
      cfg.params[k] = v;
    }
  }
}

RunOutcome run_algorithm(const RunConfig& cfg) {
  if (!is_algorithm(cfg.algo)) throw Error(ErrorCode::bad_config, "unknown algorithm '" + cfg.algo + "'");
  if (cfg.out.empty()) throw Error(ErrorCode::bad_config, "an output directory is required");
  if (cfg.eval_k < 1) throw Error(ErrorCode::bad_config, "eval-k must be >= 1");
  ensure_dir(cfg.out);

  RunOutcome outcome;
  RunContext ctx(cfg, outcome);
  Eigen::Index n = 0, p = 0;
  std::optional<Params> params;
  try {
    params = resolve_params(cfg.algo, cfg.params);
    const LoadedData loaded = load_input(cfg.input, cfg.select, cfg.label, cfg.missing_tokens, cfg.sentinels);
    const DataMatrix& data = loaded.data;
    n = data.rows();
    p = data.cols();
    if (data.has_missing()) {
      throw Error(ErrorCode::missing_data, cfg.input.string() + " has " + std::to_string(data.missing.count()) +
                                               " missing cells; run `impute` first");
    }

    const auto t0 = std::chrono::steady_clock::now();
    AlgoOutput out;
    if (cfg.algo == "pca") {
      out = run_pca(data, *params, cfg.standardize, ctx);
    } else {
      const Matrix x = prepared(data, cfg.standardize);
      if (cfg.algo == "lle") {
        out = run_lle(x, *params, ctx);
      } else if (cfg.algo == "calc-k") {
        out = run_calc_k(x, *params, cfg.seed, ctx);
      } else if (cfg.algo == "tsne") {
        out = run_tsne(x, *params, cfg.seed, ctx);
      } else if (cfg.algo == "umap") {
        out = run_umap(x, *params, cfg.seed, ctx);
      } else if (cfg.algo == "som") {
        out = run_som(x, data.feature_names, *params, cfg.seed, ctx);
      } else {
        out = run_autoencoder(x, loaded.labels, *params, cfg.seed, ctx);
      }
    }
    outcome.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (out.has_embedding) {
      if (!out.coords.allFinite()) throw Error(ErrorCode::numerical_divergence, "embedding has non-finite values");
      ctx.write("embedding.csv", embedding_csv(out.coords, loaded.labels));
      EmbeddingReport rep = evaluate_embedding(out.high, out.coords, cfg.algo, cfg.eval_k, cfg.eval_pairs,
                                               derive_seed(cfg.seed, 99));
      rep.runtime_seconds = outcome.runtime_seconds;
      rep.config = params->values();
      outcome.report = rep;
      ScatterSpec spec;
      spec.title = cfg.algo;
      spec.x_label = out.x_label;
      spec.y_label = out.y_label;
      ctx.write("scatter.svg", scatter_svg(out.coords, loaded.labels, spec));
    }
  } catch (const std::exception& e) {
    outcome.status = "error";
    try {
      write_report(cfg, params ? &*params : nullptr, outcome, n, p, &e);
    } catch (...) {
    }
    throw;
  }
  write_report(cfg, &*params, outcome, n, p, nullptr);
  outcome.files.push_back("report.json");
  return outcome;
}

std::pair<std::string, std::vector<std::string>> parse_grid_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::bad_config, "grid axis '" + text + "' must be name=v1,v2");
  std::string name = trim(text.substr(0, eq));
  std::vector<std::string> values = split_commas(text.substr(eq + 1));
  if (name.empty()) throw Error(ErrorCode::bad_config, "grid axis '" + text + "' has no parameter name");
  if (values.empty()) throw Error(ErrorCode::bad_config, "grid axis '" + name + "' has no values");
  return {std::move(name), std::move(values)};
}

GridResult run_grid(const GridSpec& spec, const RunConfig& base) {
  if (!is_algorithm(spec.algo)) throw Error(ErrorCode::bad_config, "unknown algorithm '" + spec.algo + "'");
  if (spec.axes.empty()) throw Error(ErrorCode::bad_config, "grid needs at least one --param axis");
  if (spec.workers < 1) throw Error(ErrorCode::bad_config, "workers must be >= 1");
  if (base.out.empty()) throw Error(ErrorCode::bad_config, "an output directory is required");
  std::set<std::string> seen;
  for (const auto& [name, values] : spec.axes) {
    if (values.empty()) throw Error(ErrorCode::bad_config, "grid axis '" + name + "' has no values");
    if (!seen.insert(name).second) throw Error(ErrorCode::bad_config, "grid axis '" + name + "' given twice");
    for (const auto& v : values) {
      auto probe = base.params;
      probe[name] = v;
      resolve_params(spec.algo, probe);  // rejects unknown names and bad values up front
    }
  }

  std::size_t total = 1;
  for (const auto& axis : spec.axes) total *= axis.second.size();
  GridResult result;
  result.cells.resize(total);
  for (std::size_t c = 0; c < total; ++c) {
    GridCell& cell = result.cells[c];
    std::size_t rest = c;
    std::vector<std::string> parts(spec.axes.size());
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const auto& values = spec.axes[a].second;
      const std::string& v = values[rest % values.size()];
      rest /= values.size();
      cell.params[spec.axes[a].first] = v;
      parts[a] = spec.axes[a].first + "=" + v;
    }
    for (std::size_t a = 0; a < parts.size(); ++a) cell.dir_name += (a ? "_" : "") + parts[a];
    cell.seed = derive_seed(base.seed, c);
  }
  ensure_dir(base.out);

  const auto t0 = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < total; c = next++) {
      GridCell& cell = result.cells[c];
      RunConfig cfg = base;
      cfg.algo = spec.algo;
      cfg.seed = cell.seed;
      cfg.out = base.out / cell.dir_name;
      for (const auto& [k, v] : cell.params) cfg.params[k] = v;
      try {
        const RunOutcome o = run_algorithm(cfg);
        cell.status = "ok";
        cell.runtime_seconds = o.runtime_seconds;
        if (o.report) {
          cell.trustworthiness = o.report->trustworthiness;
          cell.continuity = o.report->continuity;
          cell.rho = o.report->rho;
        }
      } catch (const std::exception& e) {
        cell.status = "error";
        cell.error = e.what();
      }
    }
  };
  const int n_threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(spec.workers), total));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string s = "cell";
  for (const auto& axis : spec.axes) s += ',' + csv_escape(axis.first);
  s += ",seed,status,trustworthiness,continuity,rho,runtime_seconds,error\n";
  for (std::size_t c = 0; c < total; ++c) {
    const GridCell& cell = result.cells[c];
    s += csv_escape(cell.dir_name);
    for (const auto& axis : spec.axes) s += ',' + csv_escape(cell.params.at(axis.first));
    const bool ok = cell.status == "ok";
    s += ',' + std::to_string(cell.seed) + ',' + cell.status + ',' +
         (ok ? format_number(cell.trustworthiness) : "NA") + ',' + (ok ? format_number(cell.continuity) : "NA") +
         ',' + (ok ? format_number(cell.rho) : "NA") + ',' + (ok ? format_number(cell.runtime_seconds) : "NA") +
         ',' + csv_escape(cell.error) + '\n';
  }
  write_text(base.out / "grid_summary.csv", s);
  return result;
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->category()) {
      case ErrorCategory::usage: return 1;
      case ErrorCategory::data: return 2;
      case ErrorCategory::numeric: return 3;
    }
  }
  if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e)) return 1;
  return 2;
}

void impute_command(const ImputeCommand& cmd) {
  if (cmd.k < 1) throw Error(ErrorCode::bad_config, "k must be >= 1");
  if (cmd.out.empty()) throw Error(ErrorCode::bad_config, "an output directory is required");
  ImputeConfig icfg;
  icfg.k = cmd.k;
  if (cmd.distance == "euclidean") {
    icfg.distance = DistanceKind::euclidean;
  } else if (cmd.distance == "manhattan") {
    icfg.distance = DistanceKind::manhattan;
  } else {
    throw Error(ErrorCode::bad_config, "distance must be euclidean or manhattan");
  }
  const LoadedData loaded = load_input(cmd.input, cmd.select, cmd.label, cmd.missing_tokens, cmd.sentinels);
  ensure_dir(cmd.out);
  std::vector<std::string> warnings;
  const DataMatrix imputed = knn_impute(loaded.data, icfg, &warnings);

  std::vector<std::string> header = imputed.feature_names;
  if (cmd.label) header.push_back(*cmd.label);
  std::string s;
  for (std::size_t h = 0; h < header.size(); ++h) s += (h ? "," : "") + csv_escape(header[h]);
  s += '\n';
  for (Eigen::Index i = 0; i < imputed.rows(); ++i) {
    for (Eigen::Index j = 0; j < imputed.cols(); ++j) s += (j ? "," : "") + format_number(imputed.values(i, j));
    if (cmd.label) {
      const int l = (*loaded.labels)[static_cast<std::size_t>(i)];
      s += ',' + (l < 0 ? std::string("NA") : csv_escape(loaded.label_names[static_cast<std::size_t>(l)]));
    }
    s += '\n';
  }
  write_text(cmd.out / "imputed.csv", s);

  const SummaryTable raw = summarize(loaded.data);
  const SummaryTable after = summarize(imputed);
  std::ostringstream a, b;
  write_summary_csv(a, raw);
  write_summary_csv(b, after);
  write_text(cmd.out / "summary_raw.csv", a.str());
  write_text(cmd.out / "summary_imputed.csv", b.str());

  std::string cmp = "feature,complete_raw,complete_imputed,mean_raw,mean_imputed,sd_raw,sd_imputed\n";
  for (std::size_t f = 0; f < raw.size(); ++f) {
    auto num = [](bool ok, double v) { return ok ? format_fixed(v, 2) : std::string("NA"); };
    cmp += csv_escape(raw[f].name) + ',' + format_fixed(raw[f].complete_pct, 1) + ',' +
           format_fixed(after[f].complete_pct, 1) + ',' + num(raw[f].defined, raw[f].mean) + ',' +
           num(after[f].defined, after[f].mean) + ',' + num(raw[f].defined, raw[f].sd) + ',' +
           num(after[f].defined, after[f].sd) + '\n';
  }
  write_text(cmd.out / "summary_compare.csv", cmp);

  ordered_json j;
  j["status"] = "ok";
  j["command"] = "impute";
  j["input"] = cmd.input.string();
  j["n"] = imputed.rows();
  j["p"] = imputed.cols();
  j["k"] = cmd.k;
  j["distance"] = cmd.distance;
  j["imputed_cells"] = loaded.data.missing.count();
  j["warnings"] = warnings;
  write_text(cmd.out / "report.json", j.dump(2) + "\n");
}

void summarize_command(const SummarizeCommand& cmd) {
  if (cmd.out.empty()) throw Error(ErrorCode::bad_config, "an output directory is required");
  const LoadedData loaded = load_input(cmd.input, cmd.select, cmd.label, cmd.missing_tokens, cmd.sentinels);
  ensure_dir(cmd.out);
  std::ostringstream s;
  write_summary_csv(s, summarize(loaded.data));
  write_text(cmd.out / "summary.csv", s.str());
  if (cmd.correlations || cmd.focus) {
    const Matrix corr = correlation_matrix(loaded.data);
    if (cmd.correlations) {
      std::vector<std::string> header{"feature"};
      header.insert(header.end(), loaded.data.feature_names.begin(), loaded.data.feature_names.end());
      write_text(cmd.out / "correlations.csv", matrix_csv(header, corr, &loaded.data.feature_names));
    }
    if (cmd.focus) {
      std::string f = "feature,r\n";
      for (const auto& [name, r] : focus_correlations(loaded.data, corr, *cmd.focus)) {
        f += csv_escape(name) + ',' + format_number(r) + '\n';
      }
      write_text(cmd.out / "focus.csv", f);
    }
  }
}

}  // namespace drkit::cli
