#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "asag/embedding.hpp"
#include "asag/gbdt.hpp"
#include "asag/hyperparameters.hpp"
#include "asag/nnet.hpp"
#include "asag/types.hpp"

namespace asag::stack {

/// Which classifier makes the final decision.
enum class ModelKind { stacking, mlp_only, gbdt_only };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct StackingConfig {
  ModelKind kind = ModelKind::stacking;
  int internal_folds = 5;
  /// false trains the meta model on in-sample base predictions (leaky; kept
  /// for comparison runs only).
  bool out_of_fold = true;
  int gbdt_max_depth = 6;
  double gbdt_lambda = 1.0;
};

struct StackingModel {
  ModelKind kind = ModelKind::stacking;
  nnet::MlpModel base_mlp;
  gbdt::GbdtModel base_gbdt;
  nnet::MlpModel meta;  // input size 4, zero or one hidden layer
  embedding::FeaturizerConfig featurizer;
  Hyperparameters hp;
};

/// Records which rows trained the base models that produced each
/// out-of-fold meta row.
struct FoldLog {
  struct Entry {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> predicted_rows;
  };
  std::vector<Entry> entries;
};

/// n x 4 rows [mlp_p0, mlp_p1, gbdt_p0, gbdt_p1].
Matrix meta_features(const nnet::MlpModel& base_mlp, const gbdt::GbdtModel& base_gbdt, const Matrix& X);

/// Trains the base MLP ([d, n, n, 2]) and GBDT for `hp` on (X, y).
nnet::MlpModel fit_base_mlp(const Matrix& X, const Labels& y, const Hyperparameters& hp, std::uint64_t seed);
gbdt::GbdtModel fit_base_gbdt(const Matrix& X, const Labels& y, const Hyperparameters& hp,
                              const StackingConfig& cfg, std::uint64_t seed);

/// Out-of-fold stacking: meta features from `internal_folds` stratified
/// folds, meta MLP trained on them, then both bases refit on all rows.
/// Throws ValidationError when y has a single class.
StackingModel fit_stacking(const Matrix& X, const Labels& y, const Hyperparameters& hp, std::uint64_t seed,
                           const StackingConfig& cfg = {}, FoldLog* log = nullptr);

struct Prediction {
  std::vector<int> labels;
  Matrix proba;  // n x 2
};

/// Label = 1 when p1 >= p0.
Prediction predict(const StackingModel& model, const Matrix& X);

}  // namespace asag::stack
