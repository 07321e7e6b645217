#include "drkit/autoencoder.hpp"
#include "drkit/datasets.hpp"
#include "drkit/error.hpp"
#include "drkit/ingest.hpp"
#include "drkit/lle.hpp"
#include "drkit/metrics.hpp"
#include "drkit/pca.hpp"
#include "drkit/preprocess.hpp"
#include "drkit/random.hpp"
#include "drkit/som.hpp"
#include "drkit/tsne.hpp"
#include "drkit/umap.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace drkit;

namespace {

DataMatrix to_data(const Matrix& x) {
  MissingMask mask = x.array().isNaN();
  return DataMatrix(x, default_feature_names(x.cols()), mask);
}

py::dict pca(const Matrix& x, int n_components, bool standardize_flag) {
  const DataMatrix d = to_data(x);
  const PcaModel model = fit_pca(d, standardize_flag);
  const VarianceReport rep = variance_report(model);
  py::dict out;
  out["scores"] = transform(model, d, n_components).coords;
  out["loadings"] = model.loadings;
  out["sdev"] = rep.sdev;
  out["pve"] = rep.pve;
  out["cpve"] = rep.cpve;
  return out;
}

Matrix lle(const Matrix& x, int k, int d, double reg) { return lle_fit(x, k, d, reg).embedding.coords; }

py::dict calc_k_py(const Matrix& x, const std::vector<int>& ks, int d, std::size_t max_pairs, std::uint64_t seed) {
  const KScanResult res = calc_k(x, ks, d, max_pairs, seed);
  std::vector<int> k;
  std::vector<double> rho, score;
  for (const auto& e : res.entries) {
    k.push_back(e.k);
    rho.push_back(e.ok ? e.rho : NAN);
    score.push_back(e.ok ? e.score : NAN);
  }
  py::dict out;
  out["best_k"] = res.best_k;
  out["k"] = k;
  out["rho"] = rho;
  out["score"] = score;
  return out;
}

py::tuple tsne(const Matrix& x, double perplexity, double theta, int max_iter, double learning_rate, int d,
               std::uint64_t seed) {
  TsneConfig cfg;
  cfg.perplexity = perplexity;
  cfg.theta = theta;
  cfg.max_iter = max_iter;
  cfg.learning_rate = learning_rate;
  cfg.d = d;
  cfg.seed = seed;
  if (cfg.exaggeration_iters > max_iter) cfg.exaggeration_iters = max_iter / 4;
  cfg.momentum_switch_iter = cfg.exaggeration_iters;
  TsneResult res;
  {
    py::gil_scoped_release release;
    res = tsne_run(x, cfg);
  }
  return py::make_tuple(res.embedding.coords, res.kl_trace);
}

Matrix umap(const Matrix& x, int k, int epochs, double min_dist, double spread, double learning_rate,
            double negative_sample_rate, int d, std::uint64_t seed) {
  UmapConfig cfg;
  cfg.k = k;
  cfg.epochs = epochs;
  cfg.min_dist = min_dist;
  cfg.spread = spread;
  cfg.learning_rate = learning_rate;
  cfg.negative_sample_rate = negative_sample_rate;
  cfg.d = d;
  cfg.seed = seed;
  py::gil_scoped_release release;
  return umap_run(x, cfg).embedding.coords;
}

py::dict som(const Matrix& x, int rows, int cols, int rlen, double alpha_start, double alpha_end, double radius,
             double radius_end, std::uint64_t seed) {
  SomConfig cfg;
  cfg.rlen = rlen;
  cfg.alpha_start = alpha_start;
  cfg.alpha_end = alpha_end;
  cfg.radius_start = radius;
  cfg.radius_end = radius_end;
  cfg.seed = derive_seed(seed, 1);
  const SomResult res = som_train(x, init_grid_from_data(x, rows, cols, derive_seed(seed, 0)), cfg);
  const SomMapping map = map_observations(res.grid, x);
  py::dict out;
  out["codes"] = res.grid.codes;
  out["node_xy"] = res.grid.node_xy;
  out["bmu"] = map.node;
  out["trace"] = res.trace.mean_distance;
  return out;
}

py::dict autoencoder(const Matrix& x, const std::vector<int>& hidden, int epochs, int batch_size,
                     double learning_rate, double momentum, const std::string& activation, double denoise_sd,
                     int layer, std::uint64_t seed) {
  AeConfig cfg;
  cfg.hidden_sizes = hidden;
  cfg.epochs = epochs;
  cfg.batch_size = batch_size;
  cfg.learning_rate = learning_rate;
  cfg.optimizer = momentum > 0 ? Optimizer::momentum : Optimizer::sgd;
  cfg.momentum = momentum;
  cfg.activation = parse_activation(activation);
  cfg.denoise_sd = denoise_sd;
  cfg.seed = seed;
  const AeResult res = train_autoencoder(x, cfg);
  py::dict out;
  out["features"] = deep_features(res.params, x, layer).values;
  out["train_loss"] = res.report.train_loss;
  return out;
}

Matrix impute(const Matrix& x, int k, const std::string& distance, std::uint64_t seed) {
  ImputeConfig cfg;
  cfg.k = k;
  cfg.seed = seed;
  if (distance == "euclidean") {
    cfg.distance = DistanceKind::euclidean;
  } else if (distance == "manhattan") {
    cfg.distance = DistanceKind::manhattan;
  } else {
    throw Error(ErrorCode::bad_config, "distance must be euclidean or manhattan");
  }
  return knn_impute(to_data(x), cfg).values;
}

py::dict evaluate(const Matrix& high, const Matrix& low, int k, std::size_t max_pairs, std::uint64_t seed) {
  const EmbeddingReport rep = evaluate_embedding(high, low, "python", k, max_pairs, seed);
  py::dict out;
  out["trustworthiness"] = rep.trustworthiness;
  out["continuity"] = rep.continuity;
  out["rho"] = rep.rho;
  out["one_minus_rho_sq"] = rep.one_minus_rho_sq;
  return out;
}

py::tuple s_curve(int n, double noise, std::uint64_t seed) {
  const SCurve s = make_s_curve(n, noise, seed);
  return py::make_tuple(s.data.values, s.arc);
}

py::tuple clusters(int n_per, const std::vector<Vector>& centers, double sd, std::uint64_t seed) {
  const LabeledData d = make_gaussian_clusters(n_per, centers, sd, seed);
  return py::make_tuple(d.data.values, d.labels);
}

}  // namespace

PYBIND11_MODULE(_drkit, m) {
  m.doc() = "Dimension reduction toolkit: PCA, LLE, t-SNE, UMAP, SOM and autoencoders";

  static py::exception<Error> error(m, "DrkitError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("standardize", [](const Matrix& x) { return standardize(to_data(x)).data.values; }, py::arg("x"));
  m.def("pca", &pca, py::arg("x"), py::arg("n_components") = 2, py::arg("standardize") = true);
  m.def("lle", &lle, py::arg("x"), py::arg("k") = 12, py::arg("d") = 2, py::arg("reg") = 1e-3);
  m.def("calc_k", &calc_k_py, py::arg("x"), py::arg("ks"), py::arg("d") = 2, py::arg("max_pairs") = 2000,
        py::arg("seed") = 0);
  m.def("tsne", &tsne, py::arg("x"), py::arg("perplexity") = 30.0, py::arg("theta") = 0.5, py::arg("max_iter") = 1000,
        py::arg("learning_rate") = 200.0, py::arg("d") = 2, py::arg("seed") = 0,
        "Returns (embedding, kl_trace).");
  m.def("umap", &umap, py::arg("x"), py::arg("k") = 15, py::arg("epochs") = 200, py::arg("min_dist") = 0.1,
        py::arg("spread") = 1.0, py::arg("learning_rate") = 1.0, py::arg("negative_sample_rate") = 5.0,
        py::arg("d") = 2, py::arg("seed") = 0);
  m.def("fit_ab", [](double min_dist, double spread) {
    const CurveParams c = fit_ab(min_dist, spread);
    return py::make_tuple(c.a, c.b);
  }, py::arg("min_dist") = 0.1, py::arg("spread") = 1.0);
  m.def("som", &som, py::arg("x"), py::arg("rows") = 10, py::arg("cols") = 10, py::arg("rlen") = 100,
        py::arg("alpha_start") = 0.1, py::arg("alpha_end") = 0.001, py::arg("radius") = 0.0,
        py::arg("radius_end") = 1e-3, py::arg("seed") = 0);
  m.def("autoencoder", &autoencoder, py::arg("x"), py::arg("hidden") = std::vector<int>{16}, py::arg("epochs") = 100,
        py::arg("batch_size") = 32, py::arg("learning_rate") = 1e-2, py::arg("momentum") = 0.9,
        py::arg("activation") = "tanh", py::arg("denoise_sd") = 0.0, py::arg("layer") = 1, py::arg("seed") = 0);
  m.def("knn_impute", &impute, py::arg("x"), py::arg("k") = 5, py::arg("distance") = "euclidean",
        py::arg("seed") = 0, "NaN cells are treated as missing.");
  m.def("trustworthiness", &trustworthiness, py::arg("high"), py::arg("low"), py::arg("k") = 10);
  m.def("continuity", &continuity, py::arg("high"), py::arg("low"), py::arg("k") = 10);
  m.def("evaluate", &evaluate, py::arg("high"), py::arg("low"), py::arg("k") = 10, py::arg("max_pairs") = 2000,
        py::arg("seed") = 0);
  m.def("make_s_curve", &s_curve, py::arg("n"), py::arg("noise") = 0.0, py::arg("seed") = 0);
  m.def("make_clusters", &clusters, py::arg("n_per"), py::arg("centers"), py::arg("sd") = 1.0, py::arg("seed") = 0);
}
