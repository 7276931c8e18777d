#include "asag/nnet.hpp"

#include <cmath>

#include "asag/error.hpp"
#include "asag/rng.hpp"

namespace asag::nnet {

namespace {

void check_inputs(const MlpModel& model, const Matrix& X) {
  if (model.num_layers() == 0) throw ShapeError("model has no layers");
  if (X.cols() != model.input_size())
    throw ShapeError("input has " + std::to_string(X.cols()) + " columns, model expects " +
                     std::to_string(model.input_size()));
  if (!X.allFinite()) throw ValidationError("non-finite value in network input");
}

// Activations per layer; acts[0] is X, acts.back() holds the output logits.
std::vector<Matrix> forward(const MlpModel& model, const Matrix& X) {
  std::vector<Matrix> acts;
  acts.reserve(model.num_layers() + 1);
  acts.push_back(X);
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    Matrix z = acts.back() * model.weights(l).transpose();
    z.rowwise() += model.bias(l).transpose();
    if (l + 1 < model.num_layers()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  return acts;
}

}  // namespace

std::size_t parameter_count(const std::vector<int>& layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    n += static_cast<std::size_t>(layer_sizes[l] + 1) * static_cast<std::size_t>(layer_sizes[l + 1]);
  return n;
}

MlpModel::MlpModel(std::vector<int> layer_sizes) : layer_sizes_(std::move(layer_sizes)) {
  if (layer_sizes_.size() < 2) throw ConfigError("an MLP needs an input and an output layer");
  for (int s : layer_sizes_)
    if (s < 1) throw ConfigError("layer sizes must be positive");
  if (layer_sizes_.back() != 2) throw ConfigError("output layer must have two units");
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    offsets_.push_back(off);
    off += static_cast<std::size_t>(layer_sizes_[l] + 1) * static_cast<std::size_t>(layer_sizes_[l + 1]);
  }
  params_.assign(off, 0.0);
}

ConstMatrixMap MlpModel::weights(std::size_t l) const {
  return {params_.data() + offsets_[l], layer_sizes_[l + 1], layer_sizes_[l]};
}
MatrixMap MlpModel::weights(std::size_t l) {
  return {params_.data() + offsets_[l], layer_sizes_[l + 1], layer_sizes_[l]};
}
ConstVectorMap MlpModel::bias(std::size_t l) const {
  return {params_.data() + offsets_[l] + static_cast<std::size_t>(layer_sizes_[l + 1] * layer_sizes_[l]),
          layer_sizes_[l + 1]};
}
Eigen::Map<Vector> MlpModel::bias(std::size_t l) {
  return {params_.data() + offsets_[l] + static_cast<std::size_t>(layer_sizes_[l + 1] * layer_sizes_[l]),
          layer_sizes_[l + 1]};
}

MlpModel init_mlp(std::vector<int> layer_sizes, std::uint64_t seed) {
  MlpModel model(std::move(layer_sizes));
  Rng rng(seed);
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    const int fan_in = model.layer_sizes()[l];
    const int fan_out = model.layer_sizes()[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    auto W = model.weights(l);
    for (Eigen::Index r = 0; r < W.rows(); ++r)
      for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = rng.uniform(-limit, limit);
  }
  return model;
}

LossAndGrad loss_and_grad(const MlpModel& model, const Matrix& X, const Labels& y) {
  check_inputs(model, X);
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ShapeError("X rows != |y|");
  if (y.empty()) throw ShapeError("empty batch");

  const auto acts = forward(model, X);
  const Matrix& logits = acts.back();
  const auto n = static_cast<double>(y.size());

  LossAndGrad out;
  out.grads.assign(model.params().size(), 0.0);

  // dL/dlogits = (softmax - onehot) / n
  Matrix delta(logits.rows(), 2);
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double z0 = logits(i, 0), z1 = logits(i, 1);
    const double mx = std::max(z0, z1);
    const double lse = mx + std::log(std::exp(z0 - mx) + std::exp(z1 - mx));
    const int yi = y[static_cast<std::size_t>(i)];
    total += lse - (yi ? z1 : z0);
    const double p0 = std::exp(z0 - lse), p1 = std::exp(z1 - lse);
    delta(i, 0) = (p0 - (yi ? 0.0 : 1.0)) / n;
    delta(i, 1) = (p1 - (yi ? 1.0 : 0.0)) / n;
  }
  out.loss = total / n;

  for (std::size_t l = model.num_layers(); l-- > 0;) {
    const int fan_out = model.layer_sizes()[l + 1];
    const int fan_in = model.layer_sizes()[l];
    MatrixMap dW(out.grads.data() + model.offset(l), fan_out, fan_in);
    Eigen::Map<Vector> db(out.grads.data() + model.offset(l) + static_cast<std::size_t>(fan_out * fan_in),
                          fan_out);
    dW.noalias() = delta.transpose() * acts[l];
    db = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix prev = delta * model.weights(l);
    // ReLU derivative: zero where the activation was clamped.
    prev = prev.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
    delta = std::move(prev);
  }
  return out;
}

double loss(const MlpModel& model, const Matrix& X, const Labels& y) {
  check_inputs(model, X);
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ShapeError("X rows != |y|");
  const Matrix logits = forward(model, X).back();
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double z0 = logits(i, 0), z1 = logits(i, 1);
    const double mx = std::max(z0, z1);
    const double lse = mx + std::log(std::exp(z0 - mx) + std::exp(z1 - mx));
    total += lse - (y[static_cast<std::size_t>(i)] ? z1 : z0);
  }
  return total / static_cast<double>(y.size());
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr) {
  if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size())
    throw ShapeError("adam_step: parameter, gradient and moment sizes differ");
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

MlpModel train_mlp(MlpModel model, const Matrix& X, const Labels& y, const TrainSpec& spec,
                   std::vector<double>* loss_trace) {
  if (!(spec.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (spec.iterations < 1) throw ConfigError("iterations must be at least 1");
  AdamState state(model.params().size());
  for (int epoch = 0; epoch < spec.iterations; ++epoch) {
    const auto lg = loss_and_grad(model, X, y);
    if (!std::isfinite(lg.loss))
      throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch));
    if (loss_trace) loss_trace->push_back(lg.loss);
    adam_step(model.params(), lg.grads, state, spec.learning_rate);
  }
  for (double p : model.params())
    if (!std::isfinite(p)) throw DivergenceError("non-finite parameter after training");
  if (loss_trace) loss_trace->push_back(loss(model, X, y));
  return model;
}

Matrix predict_proba(const MlpModel& model, const Matrix& X) {
  check_inputs(model, X);
  Matrix logits = forward(model, X).back();
  Matrix P(logits.rows(), 2);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double d = logits(i, 1) - logits(i, 0);
    // Two-way softmax as a sigmoid of the logit gap; p0 + p1 == 1 exactly up to rounding.
    const double p1 = d >= 0.0 ? 1.0 / (1.0 + std::exp(-d)) : std::exp(d) / (1.0 + std::exp(d));
    P(i, 0) = 1.0 - p1;
    P(i, 1) = p1;
  }
  return P;
}

}  // namespace asag::nnet
