#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "asag/hyperparameters.hpp"
#include "asag/rng.hpp"

namespace asag::tpe {

enum class TrialStatus { complete, failed };

struct Trial {
  std::size_t index = 0;
  std::vector<double> params;  // one value per search dimension
  double objective = 0.0;      // mean of fold_scores for complete trials
  std::uint64_t seed = 0;
  std::vector<double> fold_scores;
  TrialStatus status = TrialStatus::complete;
  std::string message;  // failure reason

  bool complete() const { return status == TrialStatus::complete; }
};

struct TpeConfig {
  std::size_t n_startup = 20;
  std::size_t n_candidates = 24;
  double gamma = 0.25;
};

/// Independent uniform draw on every dimension's lattice.
std::vector<double> sample_uniform(const SearchSpace& space, Rng& rng);

/// Ranks complete trials by objective (descending, earlier index first on
/// ties). good = top max(1, ceil(gamma * n)); bad = the rest. Failed trials
/// are ignored. Throws ConfigError when no complete trial is given.
std::pair<std::vector<Trial>, std::vector<Trial>> split_trials(const std::vector<Trial>& history,
                                                               double gamma);

/// One-dimensional Parzen density: equally weighted truncated Gaussians at
/// the observations plus one uniform component over the support. Categorical
/// dimensions use smoothed category frequencies instead.
class ParzenEstimator {
 public:
  ParzenEstimator(const Dimension& dim, std::vector<double> observations);

  double sample(Rng& rng) const;
  double log_pdf(double x) const;

  const std::vector<double>& mus() const { return mus_; }
  const std::vector<double>& sigmas() const { return sigmas_; }
  double support_low() const { return lo_; }
  double support_high() const { return hi_; }

 private:
  Dimension dim_;
  double lo_ = 0.0, hi_ = 0.0;  // continuous support
  std::vector<double> mus_, sigmas_, log_norm_;
  std::vector<double> category_weight_;
};

/// Next point to evaluate. Uniform while fewer than cfg.n_startup trials are
/// complete; afterwards the candidate from l(x) maximising log l - log g.
std::vector<double> suggest(const std::vector<Trial>& history, const SearchSpace& space, Rng& rng,
                            const TpeConfig& cfg = {});

/// What an objective returns for one trial.
struct Evaluation {
  std::vector<double> fold_scores;
  double objective = 0.0;

  /// objective = mean(scores).
  static Evaluation from_folds(std::vector<double> scores);
};

/// Objective called with (params, trial seed). Throwing marks the trial failed.
using Objective = std::function<Evaluation(const std::vector<double>&, std::uint64_t)>;

struct OptimizeOptions {
  std::size_t n_trials = 200;
  std::uint64_t seed = 0;
  TpeConfig tpe;
  /// Trials suggested from one history snapshot and evaluated concurrently.
  /// 1 gives the sequential, bit-reproducible mode.
  std::size_t parallelism = 1;
  /// Called after each trial is recorded.
  std::function<void(const Trial&)> on_trial;
};

struct OptimizeResult {
  Trial best;
  std::vector<Trial> history;
};

/// The suggest -> evaluate -> record loop. Throws Error when every trial
/// failed.
OptimizeResult optimize(const Objective& objective, const SearchSpace& space,
                        const OptimizeOptions& options);

/// One JSON object per line: index, params by name, fold_scores, objective,
/// seed, status (and message for failures).
std::string history_to_jsonl(const std::vector<Trial>& history, const SearchSpace& space);

}  // namespace asag::tpe
