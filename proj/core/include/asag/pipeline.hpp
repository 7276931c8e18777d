#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "asag/balance.hpp"
#include "asag/corpus.hpp"
#include "asag/embedding.hpp"
#include "asag/hyperparameters.hpp"
#include "asag/stack.hpp"

namespace asag {

/// Everything besides the hyperparameters that decides how a model is fit.
struct PipelineSettings {
  corpus::Lexicon lexicon = corpus::default_lexicon();
  corpus::StopPolicy stop_policy;
  corpus::PreprocessOptions preprocess;
  double synth_fraction = 0.10;  // 0 disables SMOTE
  int k_neighbors = 5;
  stack::StackingConfig stacking;
  int positive_label = 1;
};

/// Training-time data flow, reported per stage with the ids of the rows used.
enum class FitStage { stoplist, length_normalizer, smote, training };

std::string_view to_string(FitStage stage);

using FitObserver = std::function<void(FitStage, const std::vector<std::string>& ids)>;

/// A fitted model together with the preprocessing state it was trained with.
struct Scorer {
  corpus::Lexicon lexicon;
  corpus::PreprocessOptions preprocess;
  corpus::Stoplist stoplist;
  stack::StackingModel model;

  /// Token sequences under this scorer's preprocessing.
  std::vector<std::vector<std::string>> tokenize(const corpus::Dataset& ds) const;
  /// Feature matrix; throws ConfigError when the store dim does not match.
  Matrix features(const corpus::Dataset& ds, const embedding::VectorStore& store) const;
  stack::Prediction predict(const corpus::Dataset& ds, const embedding::VectorStore& store) const;
};

/// Fits stoplist, length normaliser, SMOTE and the classifier on `train`
/// only. Throws ValidationError when `train` has a single class.
Scorer fit_scorer(const Hyperparameters& hp, const corpus::Dataset& train,
                  const embedding::VectorStore& store, const PipelineSettings& settings,
                  std::uint64_t seed, const FitObserver& observer = {});

}  // namespace asag
