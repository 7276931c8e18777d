#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "asag/types.hpp"

namespace asag::gbdt {

/// Internal nodes send rows with x[feature] <= threshold to `left`.
/// Leaves have feature == -1 and carry a log-odds contribution in `value`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Flat tree; nodes[0] is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  int depth() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct GbdtModel {
  std::vector<Tree> trees;
  double learning_rate = 0.1;
  double base_score = 0.0;  // initial log-odds
  int max_depth = 6;
  double lambda = 1.0;
  double subsample = 1.0;
  int n_features = 0;
  bool single_class = false;  // trained on one label; trees are zero leaves

  /// base_score + learning_rate * sum of tree outputs.
  double margin(std::span<const double> x) const;
  friend bool operator==(const GbdtModel&, const GbdtModel&) = default;
};

struct GbdtParams {
  int n_estimators = 100;
  double learning_rate = 0.1;
  double subsample = 1.0;
  int max_depth = 6;
  double lambda = 1.0;
  std::uint64_t seed = 0;
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

/// Second-order split gain
///   0.5 * [G_L^2/(H_L+l) + G_R^2/(H_R+l) - (G_L+G_R)^2/(H_L+H_R+l)].
double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda);

/// Exact greedy split over every feature and every midpoint between
/// consecutive distinct values of `rows`. Ties go to the lower feature, then
/// the lower threshold. Empty when |rows| < 2 or the best gain is <= 0.
std::optional<Split> best_split(std::span<const std::size_t> rows, const Matrix& X,
                                std::span<const double> g, std::span<const double> h, double lambda);

/// Logistic-loss boosting. When `logloss_trace` is given it receives the
/// training log loss before the first round and after every round.
GbdtModel train_gbdt(const Matrix& X, const Labels& y, const GbdtParams& params,
                     std::vector<double>* logloss_trace = nullptr);

/// n x 2 matrix of (1 - p1, p1). Throws ShapeError on a feature mismatch.
Matrix predict_proba(const GbdtModel& model, const Matrix& X);

/// Mean binary log loss of probabilities p1 against y.
double logloss(std::span<const double> p1, const Labels& y);

}  // namespace asag::gbdt
