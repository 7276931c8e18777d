#include "asag/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "asag/error.hpp"

namespace asag::tpe {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_sum_exp(const std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

std::vector<double> column(const std::vector<Trial>& trials, std::size_t d) {
  std::vector<double> out;
  out.reserve(trials.size());
  for (const auto& t : trials) out.push_back(t.params[d]);
  return out;
}

}  // namespace

std::vector<double> sample_uniform(const SearchSpace& space, Rng& rng) {
  std::vector<double> out;
  out.reserve(space.size());
  for (const auto& d : space.dimensions()) out.push_back(d.value_at(rng.below(d.count())));
  return out;
}

std::pair<std::vector<Trial>, std::vector<Trial>> split_trials(const std::vector<Trial>& history,
                                                               double gamma) {
  std::vector<Trial> ranked;
  for (const auto& t : history)
    if (t.complete()) ranked.push_back(t);
  if (ranked.empty()) throw ConfigError("split_trials needs at least one complete trial");
  std::stable_sort(ranked.begin(), ranked.end(), [](const Trial& a, const Trial& b) {
    if (a.objective != b.objective) return a.objective > b.objective;
    return a.index < b.index;
  });
  const auto n_good = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(ranked.size()))), 1, ranked.size());
  std::vector<Trial> bad(std::make_move_iterator(ranked.begin() + static_cast<std::ptrdiff_t>(n_good)),
                         std::make_move_iterator(ranked.end()));
  ranked.resize(n_good);
  return {std::move(ranked), std::move(bad)};
}

ParzenEstimator::ParzenEstimator(const Dimension& dim, std::vector<double> observations) : dim_(dim) {
  if (dim.kind == DimensionKind::categorical) {
    const std::size_t k = dim.count();
    category_weight_.assign(k, 1.0);  // uniform prior pseudo-count
    for (double x : observations) category_weight_[dim.index_of(x)] += 1.0;
    const double total = std::accumulate(category_weight_.begin(), category_weight_.end(), 0.0);
    for (auto& w : category_weight_) w /= total;
    return;
  }
  // Each lattice point owns a cell of width `step`.
  lo_ = dim.low - dim.step / 2.0;
  hi_ = dim.high + dim.step / 2.0;
  std::sort(observations.begin(), observations.end());
  // Repeated observations give zero gaps; the floor keeps l(x) from
  // collapsing onto them and shrinks as observations accumulate.
  const double range = dim.high - dim.low;
  const double max_bw = std::max(dim.step, range / 2.0);
  const double min_bw = std::clamp(range / static_cast<double>(std::min<std::size_t>(100, observations.size() + 1)),
                                   dim.step, max_bw);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    double bw = max_bw;
    if (observations.size() > 1) {
      bw = 0.0;
      if (i > 0) bw = std::max(bw, observations[i] - observations[i - 1]);
      if (i + 1 < observations.size()) bw = std::max(bw, observations[i + 1] - observations[i]);
    }
    bw = std::clamp(bw, min_bw, max_bw);
    mus_.push_back(observations[i]);
    sigmas_.push_back(bw);
    const double z = normal_cdf((hi_ - observations[i]) / bw) - normal_cdf((lo_ - observations[i]) / bw);
    log_norm_.push_back(std::log(std::max(z, std::numeric_limits<double>::min())));
  }
}

double ParzenEstimator::sample(Rng& rng) const {
  if (!category_weight_.empty()) {
    double u = rng.uniform();
    for (std::size_t c = 0; c < category_weight_.size(); ++c) {
      if (u < category_weight_[c]) return dim_.value_at(c);
      u -= category_weight_[c];
    }
    return dim_.value_at(category_weight_.size() - 1);
  }
  const std::size_t c = rng.below(mus_.size() + 1);
  if (c == mus_.size()) return rng.uniform(lo_, hi_);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x = mus_[c] + sigmas_[c] * rng.normal();
    if (x >= lo_ && x <= hi_) return x;
  }
  return std::clamp(mus_[c], lo_, hi_);
}

double ParzenEstimator::log_pdf(double x) const {
  if (!category_weight_.empty()) return std::log(category_weight_[dim_.index_of(x)]);
  const double log_w = -std::log(static_cast<double>(mus_.size() + 1));
  std::vector<double> terms;
  terms.reserve(mus_.size() + 1);
  terms.push_back(log_w - std::log(hi_ - lo_));
  for (std::size_t i = 0; i < mus_.size(); ++i) {
    const double z = (x - mus_[i]) / sigmas_[i];
    terms.push_back(log_w - 0.5 * z * z - kLogSqrt2Pi - std::log(sigmas_[i]) - log_norm_[i]);
  }
  return log_sum_exp(terms);
}

std::vector<double> suggest(const std::vector<Trial>& history, const SearchSpace& space, Rng& rng,
                            const TpeConfig& cfg) {
  const auto n_complete = static_cast<std::size_t>(
      std::count_if(history.begin(), history.end(), [](const Trial& t) { return t.complete(); }));
  if (n_complete < std::max<std::size_t>(cfg.n_startup, 1)) return sample_uniform(space, rng);

  const auto [good, bad] = split_trials(history, cfg.gamma);
  std::vector<ParzenEstimator> l_est, g_est;
  for (std::size_t d = 0; d < space.size(); ++d) {
    l_est.emplace_back(space[d], column(good, d));
    g_est.emplace_back(space[d], column(bad, d));
  }

  std::vector<double> best;
  double best_score = -std::numeric_limits<double>::infinity();
  const std::size_t n_cand = std::max<std::size_t>(cfg.n_candidates, 1);
  for (std::size_t c = 0; c < n_cand; ++c) {
    std::vector<double> cand(space.size());
    double score = 0.0;
    for (std::size_t d = 0; d < space.size(); ++d) {
      cand[d] = l_est[d].sample(rng);
      score += l_est[d].log_pdf(cand[d]) - g_est[d].log_pdf(cand[d]);
    }
    if (best.empty() || score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  for (std::size_t d = 0; d < space.size(); ++d) best[d] = space[d].snap(best[d]);
  return best;
}

Evaluation Evaluation::from_folds(std::vector<double> scores) {
  Evaluation e;
  e.objective = scores.empty() ? 0.0
                               : std::accumulate(scores.begin(), scores.end(), 0.0) /
                                     static_cast<double>(scores.size());
  e.fold_scores = std::move(scores);
  return e;
}

OptimizeResult optimize(const Objective& objective, const SearchSpace& space,
                        const OptimizeOptions& options) {
  Rng rng(options.seed);
  OptimizeResult result;
  auto run_trial = [&](std::size_t index, std::vector<double> params) {
    Trial t;
    t.index = index;
    t.params = std::move(params);
    t.seed = derive_seed(options.seed, index);
    try {
      auto eval = objective(t.params, t.seed);
      if (!std::isfinite(eval.objective)) throw Error("objective is not finite");
      t.objective = eval.objective;
      t.fold_scores = std::move(eval.fold_scores);
    } catch (const std::exception& e) {
      t.status = TrialStatus::failed;
      t.objective = 0.0;
      t.fold_scores.clear();
      t.message = e.what();
    }
    return t;
  };

  const std::size_t batch = std::max<std::size_t>(options.parallelism, 1);
  while (result.history.size() < options.n_trials) {
    const std::size_t first = result.history.size();
    const std::size_t count = std::min(batch, options.n_trials - first);
    std::vector<std::vector<double>> proposals;
    for (std::size_t i = 0; i < count; ++i) proposals.push_back(suggest(result.history, space, rng, options.tpe));

    std::vector<Trial> done;
    if (count == 1) {
      done.push_back(run_trial(first, std::move(proposals[0])));
    } else {
      std::vector<std::future<Trial>> futures;
      for (std::size_t i = 0; i < count; ++i)
        futures.push_back(std::async(std::launch::async, run_trial, first + i, std::move(proposals[i])));
      for (auto& f : futures) done.push_back(f.get());
    }
    for (auto& t : done) {
      result.history.push_back(std::move(t));
      if (options.on_trial) options.on_trial(result.history.back());
    }
  }

  const Trial* best = nullptr;
  for (const auto& t : result.history)
    if (t.complete() && (!best || t.objective > best->objective)) best = &t;
  if (!best) throw Error("all " + std::to_string(result.history.size()) + " trials failed");
  result.best = *best;
  return result;
}

std::string history_to_jsonl(const std::vector<Trial>& history, const SearchSpace& space) {
  std::string out;
  for (const auto& t : history) {
    nlohmann::ordered_json j;
    j["index"] = t.index;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (std::size_t d = 0; d < space.size() && d < t.params.size(); ++d) params[space[d].name] = t.params[d];
    j["params"] = std::move(params);
    j["fold_scores"] = t.fold_scores;
    j["objective"] = t.objective;
    j["seed"] = t.seed;
    j["status"] = t.complete() ? "complete" : "failed";
    if (!t.complete()) j["message"] = t.message;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace asag::tpe
