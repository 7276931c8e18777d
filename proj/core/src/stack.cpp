#include "asag/stack.hpp"

#include <algorithm>

#include "asag/corpus.hpp"
#include "asag/error.hpp"
#include "asag/rng.hpp"

namespace asag::stack {

namespace {

enum SeedStream : std::uint64_t { kFolds = 1, kBaseMlp = 2, kBaseGbdt = 3, kMeta = 4, kFoldBase = 100 };

Matrix take_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Labels take(const Labels& y, const std::vector<std::size_t>& rows) {
  Labels out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(y[r]);
  return out;
}

std::vector<int> meta_layer_sizes(const Hyperparameters& hp) {
  if (hp.meta_layers == 0) return {4, 2};
  return {4, hp.meta_neurons, 2};
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::stacking: return "stacking";
    case ModelKind::mlp_only: return "mlp";
    case ModelKind::gbdt_only: return "gbdt";
  }
  return "stacking";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "stacking") return ModelKind::stacking;
  if (name == "mlp") return ModelKind::mlp_only;
  if (name == "gbdt") return ModelKind::gbdt_only;
  throw ConfigError("unknown model kind '" + std::string(name) + "' (expected stacking, mlp or gbdt)");
}

Matrix meta_features(const nnet::MlpModel& base_mlp, const gbdt::GbdtModel& base_gbdt, const Matrix& X) {
  Matrix out(X.rows(), 4);
  out.leftCols(2) = nnet::predict_proba(base_mlp, X);
  out.rightCols(2) = gbdt::predict_proba(base_gbdt, X);
  return out;
}

nnet::MlpModel fit_base_mlp(const Matrix& X, const Labels& y, const Hyperparameters& hp, std::uint64_t seed) {
  const int d = static_cast<int>(X.cols());
  auto model = nnet::init_mlp({d, hp.base_neurons, hp.base_neurons, 2}, seed);
  return nnet::train_mlp(std::move(model), X, y, {hp.base_lr, hp.base_iters, seed});
}

gbdt::GbdtModel fit_base_gbdt(const Matrix& X, const Labels& y, const Hyperparameters& hp,
                              const StackingConfig& cfg, std::uint64_t seed) {
  gbdt::GbdtParams params;
  params.n_estimators = hp.gbdt_estimators;
  params.learning_rate = hp.gbdt_lr;
  params.subsample = hp.gbdt_subsample;
  params.max_depth = cfg.gbdt_max_depth;
  params.lambda = cfg.gbdt_lambda;
  params.seed = seed;
  return gbdt::train_gbdt(X, y, params);
}

StackingModel fit_stacking(const Matrix& X, const Labels& y, const Hyperparameters& hp, std::uint64_t seed,
                           const StackingConfig& cfg, FoldLog* log) {
  validate(hp);
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ShapeError("fit_stacking: X rows != |y|");
  const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
  const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
  if (!has0 || !has1) throw ValidationError("stacking needs both classes in the training labels");

  StackingModel model;
  model.kind = cfg.kind;
  model.hp = hp;

  if (cfg.kind != ModelKind::gbdt_only) model.base_mlp = fit_base_mlp(X, y, hp, derive_seed(seed, kBaseMlp));
  if (cfg.kind != ModelKind::mlp_only)
    model.base_gbdt = fit_base_gbdt(X, y, hp, cfg, derive_seed(seed, kBaseGbdt));
  if (cfg.kind != ModelKind::stacking) return model;

  Matrix meta_X(X.rows(), 4);
  if (cfg.out_of_fold) {
    const auto folds = corpus::split_folds(y, cfg.internal_folds, derive_seed(seed, kFolds));
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<std::size_t> train_rows;
      for (std::size_t g = 0; g < folds.size(); ++g)
        if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
      std::sort(train_rows.begin(), train_rows.end());
      const Matrix Xt = take_rows(X, train_rows);
      const Labels yt = take(y, train_rows);
      const auto fold_seed = derive_seed(seed, kFoldBase + f);
      const auto mlp = fit_base_mlp(Xt, yt, hp, derive_seed(fold_seed, kBaseMlp));
      const auto gb = fit_base_gbdt(Xt, yt, hp, cfg, derive_seed(fold_seed, kBaseGbdt));
      const Matrix held = meta_features(mlp, gb, take_rows(X, folds[f]));
      for (std::size_t i = 0; i < folds[f].size(); ++i)
        meta_X.row(static_cast<Eigen::Index>(folds[f][i])) = held.row(static_cast<Eigen::Index>(i));
      if (log) log->entries.push_back({train_rows, folds[f]});
    }
  } else {
    meta_X = meta_features(model.base_mlp, model.base_gbdt, X);
  }

  auto meta = nnet::init_mlp(meta_layer_sizes(hp), derive_seed(seed, kMeta));
  model.meta = nnet::train_mlp(std::move(meta), meta_X, y, {hp.meta_lr, hp.meta_iters, seed});
  return model;
}

Prediction predict(const StackingModel& model, const Matrix& X) {
  Prediction out;
  switch (model.kind) {
    case ModelKind::stacking:
      out.proba = nnet::predict_proba(model.meta, meta_features(model.base_mlp, model.base_gbdt, X));
      break;
    case ModelKind::mlp_only:
      out.proba = nnet::predict_proba(model.base_mlp, X);
      break;
    case ModelKind::gbdt_only:
      out.proba = gbdt::predict_proba(model.base_gbdt, X);
      break;
  }
  out.labels.reserve(static_cast<std::size_t>(out.proba.rows()));
  for (Eigen::Index i = 0; i < out.proba.rows(); ++i) out.labels.push_back(out.proba(i, 1) >= out.proba(i, 0) ? 1 : 0);
  return out;
}

}  // namespace asag::stack
