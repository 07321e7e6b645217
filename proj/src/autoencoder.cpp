#include "drkit/autoencoder.hpp"

#include "drkit/error.hpp"
#include "drkit/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace drkit {
namespace {

Matrix apply(Activation a, const Matrix& z) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::logistic: return (1.0 / (1.0 + (-z.array()).exp())).matrix();
  }
  return z;
}

// Derivative expressed through the activation output.
Matrix derivative_from_output(Activation a, const Matrix& out) {
  switch (a) {
    case Activation::identity: return Matrix::Ones(out.rows(), out.cols());
    case Activation::tanh: return (1.0 - out.array().square()).matrix();
    case Activation::relu: return (out.array() > 0.0).cast<double>().matrix();
    case Activation::logistic: return (out.array() * (1.0 - out.array())).matrix();
  }
  return Matrix::Ones(out.rows(), out.cols());
}

double bce(const Matrix& prob, const Matrix& target) {
  constexpr double eps = 1e-12;
  const auto p = prob.array().max(eps).min(1.0 - eps);
  return -(target.array() * p.log() + (1.0 - target.array()) * (1.0 - p).log()).mean();
}

struct SgdOptions {
  int epochs = 1;
  int batch_size = 32;
  double learning_rate = 1e-2;
  double momentum = 0.0;
  double input_noise = 0.0;
  Loss loss = Loss::mse;
};

// Mini-batch descent; `on_epoch` runs after each epoch.
void sgd_train(MlpParams& params, const Matrix& x, const Matrix& target, const SgdOptions& opt, RngStream& rng,
               const std::function<void(int)>& on_epoch) {
  const int n = static_cast<int>(x.rows());
  const int batch = std::max(1, std::min(opt.batch_size, n));
  Gradients velocity;
  for (int l = 0; l < params.transitions(); ++l) {
    velocity.weights.push_back(Matrix::Zero(params.weights[l].rows(), params.weights[l].cols()));
    velocity.biases.push_back(Vector::Zero(params.biases[l].size()));
  }
  Matrix xb, tb;
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    const std::vector<int> order = rng.permutation(n);
    for (int start = 0; start < n; start += batch) {
      const int m = std::min(batch, n - start);
      xb.resize(m, x.cols());
      tb.resize(m, target.cols());
      for (int r = 0; r < m; ++r) {
        xb.row(r) = x.row(order[static_cast<std::size_t>(start + r)]);
        tb.row(r) = target.row(order[static_cast<std::size_t>(start + r)]);
      }
      if (opt.input_noise > 0.0) {
        for (Eigen::Index i = 0; i < xb.rows(); ++i) {
          for (Eigen::Index j = 0; j < xb.cols(); ++j) xb(i, j) += opt.input_noise * rng.normal();
        }
      }
      const Gradients g = backprop_grads(params, xb, tb, opt.loss);
      for (int l = 0; l < params.transitions(); ++l) {
        velocity.weights[l] = opt.momentum * velocity.weights[l] - opt.learning_rate * g.weights[l];
        velocity.biases[l] = opt.momentum * velocity.biases[l] - opt.learning_rate * g.biases[l];
        params.weights[l] += velocity.weights[l];
        params.biases[l] += velocity.biases[l];
      }
    }
    if (!params.all_finite()) {
      throw Error(ErrorCode::numerical_divergence, "network parameters became non-finite at epoch " +
                                                       std::to_string(epoch));
    }
    if (on_epoch) on_epoch(epoch);
  }
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "identity" || name == "linear") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  if (name == "logistic" || name == "sigmoid") return Activation::logistic;
  throw Error(ErrorCode::bad_config, "unknown activation '" + name + "'");
}

const char* activation_name(Activation a) noexcept {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::logistic: return "logistic";
  }
  return "identity";
}

bool MlpParams::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

MlpParams init_mlp(const std::vector<int>& layer_sizes, Activation hidden, Activation output, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw Error(ErrorCode::bad_config, "a network needs input and output layers");
  for (int s : layer_sizes) {
    if (s < 1) throw Error(ErrorCode::bad_config, "layer sizes must be positive");
  }
  RngStream rng(seed);
  MlpParams p;
  p.layer_sizes = layer_sizes;
  const std::size_t transitions = layer_sizes.size() - 1;
  for (std::size_t l = 0; l < transitions; ++l) {
    const int in = layer_sizes[l];
    const int out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    Matrix w(out, in);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-limit, limit);
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(Vector::Zero(out));
    p.activations.push_back(l + 1 == transitions ? output : hidden);
  }
  return p;
}

std::vector<Matrix> forward(const MlpParams& params, const Matrix& batch) {
  if (batch.cols() != params.layer_sizes.front()) {
    throw Error(ErrorCode::dimension_mismatch, "batch width " + std::to_string(batch.cols()) +
                                                   " does not match input size " +
                                                   std::to_string(params.layer_sizes.front()));
  }
  std::vector<Matrix> acts;
  acts.reserve(params.weights.size() + 1);
  acts.push_back(batch);
  for (int l = 0; l < params.transitions(); ++l) {
    Matrix z = acts.back() * params.weights[l].transpose();
    z.rowwise() += params.biases[l].transpose();
    acts.push_back(apply(params.activations[l], z));
  }
  return acts;
}

double reconstruction_loss(const Matrix& output, const Matrix& target) {
  if (output.rows() != target.rows() || output.cols() != target.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "output and target shapes differ");
  }
  return (output - target).array().square().mean();
}

double loss_value(const MlpParams& params, const Matrix& batch, const Matrix& target, Loss loss) {
  const Matrix out = forward(params, batch).back();
  return loss == Loss::mse ? reconstruction_loss(out, target) : bce(out, target);
}

Gradients backprop_grads(const MlpParams& params, const Matrix& batch, const Matrix& target, Loss loss) {
  const std::vector<Matrix> acts = forward(params, batch);
  const Matrix& out = acts.back();
  if (out.rows() != target.rows() || out.cols() != target.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "output and target shapes differ");
  }
  const double cells = static_cast<double>(out.size());
  const int last = params.transitions() - 1;

  // delta = dL/dz for the current layer.
  Matrix delta;
  if (loss == Loss::binary_cross_entropy) {
    if (params.activations[static_cast<std::size_t>(last)] != Activation::logistic) {
      throw Error(ErrorCode::bad_config, "cross-entropy loss needs a logistic output layer");
    }
    delta = (out - target) / cells;
  } else {
    delta = (2.0 / cells) * (out - target).cwiseProduct(
                                derivative_from_output(params.activations[static_cast<std::size_t>(last)], out));
  }

  Gradients g;
  g.weights.resize(params.weights.size());
  g.biases.resize(params.biases.size());
  for (int l = last; l >= 0; --l) {
    g.weights[static_cast<std::size_t>(l)] = delta.transpose() * acts[static_cast<std::size_t>(l)];
    g.biases[static_cast<std::size_t>(l)] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * params.weights[static_cast<std::size_t>(l)])
                  .cwiseProduct(derivative_from_output(params.activations[static_cast<std::size_t>(l - 1)],
                                                       acts[static_cast<std::size_t>(l)]));
    }
  }
  return g;
}

void AeConfig::validate(Eigen::Index p) const {
  if (hidden_sizes.empty()) throw Error(ErrorCode::bad_config, "autoencoder needs at least one hidden layer");
  for (int h : hidden_sizes) {
    if (h < 1) throw Error(ErrorCode::bad_config, "hidden sizes must be positive");
    if (!overcomplete_ok && h > p - 1) {
      throw Error(ErrorCode::bad_config, "hidden size " + std::to_string(h) + " is not undercomplete for p=" +
                                             std::to_string(p) + " (allow with overcomplete_ok)");
    }
  }
  if (epochs < 0 || batch_size < 1 || !(learning_rate > 0.0) || !(denoise_sd >= 0.0)) {
    throw Error(ErrorCode::bad_config, "invalid autoencoder training settings");
  }
}

AeResult train_autoencoder(const Matrix& train, const AeConfig& cfg, const Matrix* holdout) {
  const Eigen::Index p = train.cols();
  cfg.validate(p);
  if (!train.allFinite()) throw Error(ErrorCode::missing_data, "autoencoder needs complete, finite data");
  if (holdout && holdout->cols() != p) throw Error(ErrorCode::dimension_mismatch, "holdout width differs");

  std::vector<int> sizes{static_cast<int>(p)};
  sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  sizes.push_back(static_cast<int>(p));

  AeResult res{init_mlp(sizes, cfg.activation, Activation::identity, derive_seed(cfg.seed, 0)), {}};
  auto record = [&](int) {
    const double tl = loss_value(res.params, train, train);
    if (!std::isfinite(tl)) throw Error(ErrorCode::numerical_divergence, "reconstruction loss became non-finite");
    res.report.train_loss.push_back(tl);
    if (holdout) res.report.holdout_loss.push_back(loss_value(res.params, *holdout, *holdout));
  };
  record(0);

  SgdOptions opt;
  opt.epochs = cfg.epochs;
  opt.batch_size = cfg.batch_size;
  opt.learning_rate = cfg.learning_rate;
  opt.momentum = cfg.optimizer == Optimizer::momentum ? cfg.momentum : 0.0;
  opt.input_noise = cfg.denoise_sd;
  RngStream rng(derive_seed(cfg.seed, 1));
  sgd_train(res.params, train, train, opt, rng, record);
  return res;
}

DataMatrix deep_features(const MlpParams& params, const Matrix& data, int layer) {
  if (layer < 1 || layer > params.hidden_layers()) {
    throw Error(ErrorCode::bad_layer, "layer " + std::to_string(layer) + " is not a hidden layer (1.." +
                                          std::to_string(params.hidden_layers()) + ")");
  }
  Matrix feats = forward(params, data)[static_cast<std::size_t>(layer)];
  std::vector<std::string> names;
  for (Eigen::Index c = 0; c < feats.cols(); ++c) {
    names.push_back("DF.L" + std::to_string(layer) + ".C" + std::to_string(c + 1));
  }
  return DataMatrix(std::move(feats), std::move(names));
}

MlpParams train_classifier(const Matrix& features, std::span<const int> labels, const ClassifierConfig& cfg) {
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw Error(ErrorCode::length_mismatch, "one label per feature row required");
  }
  if (!features.allFinite()) throw Error(ErrorCode::missing_data, "classifier features must be finite");
  bool has0 = false, has1 = false;
  Matrix target(features.rows(), 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw Error(ErrorCode::bad_config, "labels must be binary 0/1");
    has0 |= labels[i] == 0;
    has1 |= labels[i] == 1;
    target(static_cast<Eigen::Index>(i), 0) = labels[i];
  }
  if (!(has0 && has1)) throw Error(ErrorCode::single_class_data, "classifier needs both classes present");

  std::vector<int> sizes{static_cast<int>(features.cols())};
  sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  sizes.push_back(1);
  MlpParams params = init_mlp(sizes, cfg.activation, Activation::logistic, derive_seed(cfg.seed, 0));
  SgdOptions opt;
  opt.epochs = cfg.epochs;
  opt.batch_size = cfg.batch_size;
  opt.learning_rate = cfg.learning_rate;
  opt.momentum = cfg.momentum;
  opt.loss = Loss::binary_cross_entropy;
  RngStream rng(derive_seed(cfg.seed, 1));
  sgd_train(params, features, target, opt, rng, nullptr);
  return params;
}

Vector predict_proba(const MlpParams& classifier, const Matrix& features) {
  return forward(classifier, features).back().col(0);
}

std::vector<int> predict(const MlpParams& classifier, const Matrix& features) {
  const Vector p = predict_proba(classifier, features);
  std::vector<int> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p[i] >= 0.5 ? 1 : 0;
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> observed) {
  if (predicted.size() != observed.size()) throw Error(ErrorCode::length_mismatch, "prediction/label lengths differ");
  if (predicted.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hit += predicted[i] == observed[i];
  return static_cast<double>(hit) / static_cast<double>(predicted.size());
}

ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> observed) {
  if (predicted.size() != observed.size()) throw Error(ErrorCode::length_mismatch, "prediction/label lengths differ");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if ((predicted[i] != 0 && predicted[i] != 1) || (observed[i] != 0 && observed[i] != 1)) {
      throw Error(ErrorCode::bad_config, "confusion matrix needs binary labels");
    }
    ++cm.counts[predicted[i] == 1 ? 0 : 1][observed[i] == 1 ? 0 : 1];
  }
  for (int c = 0; c < 2; ++c) {
    const long col = cm.counts[0][c] + cm.counts[1][c];
    for (int r = 0; r < 2; ++r) cm.column_pct[r][c] = col > 0 ? 100.0 * cm.counts[r][c] / col : 0.0;
  }
  return cm;
}

FeatureImportance permutation_importance(const MlpParams& classifier, const Matrix& features,
                                         std::span<const int> labels, int repeats, std::uint64_t seed) {
  if (repeats < 1) throw Error(ErrorCode::bad_config, "repeats must be >= 1");
  const double base = accuracy(predict(classifier, features), labels);
  RngStream rng(seed);
  FeatureImportance imp;
  const Eigen::Index p = features.cols();
  imp.raw_drop.assign(static_cast<std::size_t>(p), 0.0);
  Matrix shuffled = features;
  for (Eigen::Index f = 0; f < p; ++f) {
    double drop = 0.0;
    for (int r = 0; r < repeats; ++r) {
      const std::vector<int> perm = rng.permutation(static_cast<int>(features.rows()));
      for (Eigen::Index i = 0; i < features.rows(); ++i) shuffled(i, f) = features(perm[static_cast<std::size_t>(i)], f);
      drop += base - accuracy(predict(classifier, shuffled), labels);
    }
    shuffled.col(f) = features.col(f);
    imp.raw_drop[static_cast<std::size_t>(f)] = drop / repeats;
  }
  double total = 0.0;
  for (double d : imp.raw_drop) total += std::max(d, 0.0);
  imp.relative.resize(imp.raw_drop.size());
  for (std::size_t f = 0; f < imp.raw_drop.size(); ++f) {
    imp.relative[f] = total > 0.0 ? std::max(imp.raw_drop[f], 0.0) / total : 0.0;
  }
  return imp;
}

}  // namespace drkit
