#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "asag/types.hpp"

namespace asag::nnet {

using ConstMatrixMap = Eigen::Map<const Matrix>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstVectorMap = Eigen::Map<const Vector>;

/// Feedforward classifier: ReLU hidden layers and a two-way softmax output.
///
/// Parameters live in one flat buffer. Layer l stores its weight matrix
/// (out x in, row-major) followed by its bias vector.
class MlpModel {
 public:
  MlpModel() = default;
  /// Zero-initialised model. Throws ConfigError unless every size is >= 1
  /// and the last one is 2.
  explicit MlpModel(std::vector<int> layer_sizes);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  std::size_t num_layers() const { return layer_sizes_.empty() ? 0 : layer_sizes_.size() - 1; }
  std::size_t hidden_layers() const { return num_layers() ? num_layers() - 1 : 0; }
  int input_size() const { return layer_sizes_.front(); }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  ConstMatrixMap weights(std::size_t layer) const;
  MatrixMap weights(std::size_t layer);
  ConstVectorMap bias(std::size_t layer) const;
  Eigen::Map<Vector> bias(std::size_t layer);

  /// Offset of layer `layer`'s weights in params().
  std::size_t offset(std::size_t layer) const { return offsets_[layer]; }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;

 private:
  std::vector<int> layer_sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// Total parameter count for the given layer sizes.
std::size_t parameter_count(const std::vector<int>& layer_sizes);

/// Glorot-uniform weights, zero biases; deterministic in seed.
MlpModel init_mlp(std::vector<int> layer_sizes, std::uint64_t seed);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grads;  // same layout as MlpModel::params()
};

/// Mean softmax cross-entropy and its exact gradient. Throws ShapeError on
/// a column/row mismatch and ValidationError on non-finite input.
LossAndGrad loss_and_grad(const MlpModel& model, const Matrix& X, const Labels& y);

/// Mean cross-entropy only.
double loss(const MlpModel& model, const Matrix& X, const Labels& y);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-10;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr);

struct TrainSpec {
  double learning_rate = 1e-3;
  int iterations = 100;  // full-batch epochs, one Adam step each
  std::uint64_t seed = 0;  // initialisation seed used by callers; training itself is deterministic
};

/// Runs spec.iterations full-batch Adam epochs from `model`. Throws
/// DivergenceError when the loss becomes non-finite. When `loss_trace` is
/// given it receives the loss before each step and the final loss.
MlpModel train_mlp(MlpModel model, const Matrix& X, const Labels& y, const TrainSpec& spec,
                   std::vector<double>* loss_trace = nullptr);

/// n x 2 class probabilities.
Matrix predict_proba(const MlpModel& model, const Matrix& X);

}  // namespace asag::nnet
