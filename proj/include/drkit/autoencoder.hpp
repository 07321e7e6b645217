#pragma once

#include "drkit/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace drkit {

enum class Activation { identity, tanh, relu, logistic };

Activation parse_activation(const std::string& name);
const char* activation_name(Activation a) noexcept;

/// Fully connected feedforward network. weights[l] maps layer l to layer l+1
/// (shape out x in) and activations[l] is applied to layer l+1.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  std::vector<Activation> activations;

  int transitions() const { return static_cast<int>(weights.size()); }
  int hidden_layers() const { return static_cast<int>(layer_sizes.size()) - 2; }
  bool all_finite() const;
};

/// Glorot-uniform weights, zero biases.
MlpParams init_mlp(const std::vector<int>& layer_sizes, Activation hidden, Activation output, std::uint64_t seed);

/// Activations of every layer for a batch (rows = samples); element 0 is the input.
std::vector<Matrix> forward(const MlpParams& params, const Matrix& batch);

/// Mean over cells of the squared difference.
double reconstruction_loss(const Matrix& output, const Matrix& target);

enum class Loss { mse, binary_cross_entropy };

double loss_value(const MlpParams& params, const Matrix& batch, const Matrix& target, Loss loss = Loss::mse);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// Exact gradients of the mean batch loss. Binary cross-entropy expects a
/// logistic output layer.
Gradients backprop_grads(const MlpParams& params, const Matrix& batch, const Matrix& target, Loss loss = Loss::mse);

enum class Optimizer { sgd, momentum };

struct AeConfig {
  std::vector<int> hidden_sizes{16};
  int epochs = 100;
  int batch_size = 32;
  double learning_rate = 1e-2;
  Optimizer optimizer = Optimizer::momentum;
  double momentum = 0.9;
  double denoise_sd = 0.0;
  Activation activation = Activation::tanh;
  bool overcomplete_ok = false;
  std::uint64_t seed = 0;

  /// Rejects hidden layers of width >= p unless overcomplete_ok.
  void validate(Eigen::Index p) const;
};

/// Reconstruction loss per epoch; index 0 is the untrained network.
struct TrainReport {
  std::vector<double> train_loss;
  std::vector<double> holdout_loss;
};

struct AeResult {
  MlpParams params;
  TrainReport report;
};

/// Mini-batch descent on the reconstruction loss. With denoise_sd > 0 the
/// inputs are perturbed with Gaussian noise while the targets stay clean.
AeResult train_autoencoder(const Matrix& train, const AeConfig& cfg, const Matrix* holdout = nullptr);

/// Hidden-layer activations, columns named DF.L<layer>.C<k> (layer is 1-based).
DataMatrix deep_features(const MlpParams& params, const Matrix& data, int layer);

struct ClassifierConfig {
  std::vector<int> hidden_sizes{8, 8};
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 1e-2;
  double momentum = 0.9;
  Activation activation = Activation::tanh;
  std::uint64_t seed = 0;
};

/// Binary classifier with a logistic output trained on cross-entropy.
MlpParams train_classifier(const Matrix& features, std::span<const int> labels, const ClassifierConfig& cfg);

Vector predict_proba(const MlpParams& classifier, const Matrix& features);
std::vector<int> predict(const MlpParams& classifier, const Matrix& features);
double accuracy(std::span<const int> predicted, std::span<const int> observed);

/// Rows are predictions, columns observations; index 0 is the positive class (1).
struct ConfusionMatrix {
  long counts[2][2] = {{0, 0}, {0, 0}};
  /// Share of each observed class (column) falling in each predicted row.
  double column_pct[2][2] = {{0, 0}, {0, 0}};

  long total() const { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }
};

ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> observed);

struct FeatureImportance {
  std::vector<double> raw_drop;  // mean accuracy decrease when permuted
  std::vector<double> relative;  // raw drops floored at 0, normalized to sum 1
};

FeatureImportance permutation_importance(const MlpParams& classifier, const Matrix& features,
                                         std::span<const int> labels, int repeats, std::uint64_t seed);

}  // namespace drkit
