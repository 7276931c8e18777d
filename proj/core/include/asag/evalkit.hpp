#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asag/corpus.hpp"
#include "asag/embedding.hpp"
#include "asag/pipeline.hpp"
#include "asag/tpe.hpp"

namespace asag::evalkit {

struct MetricReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  int positive_label = 1;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// Precision, recall and F1 of `preds` against `golds`. Zero denominators
/// give 0. Throws ShapeError on empty or unequal inputs.
MetricReport f1_score(const Labels& preds, const Labels& golds, int positive = 1);

/// F1 over the concatenation of every (preds, golds) pair.
MetricReport combined_f1(const std::vector<std::pair<Labels, Labels>>& per_question, int positive = 1);

/// k-fold cross-validated objective. Every fold refits the whole pipeline on
/// its training portion and scores F1 on the held-out portion; the trial
/// objective is the mean fold F1. A fold that cannot be fit marks the trial
/// failed. `params` holds the values in default_space() order.
tpe::Trial cross_validate(const Hyperparameters& hp, const corpus::Dataset& ds,
                          const embedding::VectorStore& store, const PipelineSettings& settings,
                          int k, std::uint64_t seed, const FitObserver& observer = {});

struct Evaluation {
  std::size_t trial_index = 0;
  MetricReport report;
};

struct SelectionReport {
  std::vector<std::size_t> ranked;  // complete trial indices by CV objective
  std::vector<Evaluation> dev_evaluations;
  std::vector<Evaluation> test_evaluations;
  std::size_t chosen_trial = 0;
  std::uint64_t chosen_seed = 0;  // seed the chosen model was refit with
  MetricReport chosen_test;
  Scorer chosen;
  stack::Prediction chosen_test_prediction;
  std::vector<std::string> warnings;
};

struct SelectionBudget {
  std::size_t dev = 20;
  std::size_t test = 5;
};

/// Refits the top `budget.dev` trials on `train` and scores them on `dev`;
/// the top `budget.test` of those by dev F1 are scored on `test`. The chosen
/// model is the one with the best test F1. Budgets larger than the number of
/// complete trials are clamped with a warning.
SelectionReport selection_protocol(const std::vector<tpe::Trial>& history, const corpus::Dataset& train,
                                   const corpus::Dataset& dev, const corpus::Dataset& test,
                                   const embedding::VectorStore& store, const PipelineSettings& settings,
                                   SelectionBudget budget = {});

}  // namespace asag::evalkit
