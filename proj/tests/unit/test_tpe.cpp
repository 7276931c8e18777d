#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "asag/error.hpp"
#include "asag/tpe.hpp"

using namespace asag;
using namespace asag::tpe;

namespace {

Trial make_trial(std::size_t index, double x, double objective) {
  Trial t;
  t.index = index;
  t.params = {x};
  t.objective = objective;
  t.fold_scores = {objective};
  return t;
}

SearchSpace unit_space() { return SearchSpace({{"x", DimensionKind::float_step, 0.0, 1.0, 0.01}}); }

}  // namespace

TEST(SearchSpace, DefaultLatticeSizes) {
  const auto s = default_space();
  ASSERT_EQ(s.size(), 10u);
  EXPECT_EQ(s[s.index("base_neurons")].count(), 71u);
  EXPECT_EQ(s[s.index("base_iters")].count(), 100u);
  EXPECT_EQ(s[s.index("gbdt_estimators")].count(), 326u);
  EXPECT_EQ(s[s.index("gbdt_subsample")].count(), 11u);
  EXPECT_EQ(s[s.index("meta_layers")].count(), 2u);
  EXPECT_EQ(s[s.index("meta_iters")].count(), 50u);
  EXPECT_EQ(s[s.index("base_lr")].count(), 9999u);
  EXPECT_DOUBLE_EQ(s[s.index("gbdt_subsample")].value_at(10), 1.0);
  EXPECT_THROW(s.index("depth"), ConfigError);
}

TEST(SearchSpace, SnapAndLatticeMembership) {
  const Dimension d{"n", DimensionKind::int_step, 50, 750, 10};
  EXPECT_EQ(d.snap(54), 50);
  EXPECT_EQ(d.snap(56), 60);
  EXPECT_EQ(d.snap(9999), 750);
  EXPECT_TRUE(d.on_lattice(370));
  EXPECT_FALSE(d.on_lattice(375));
  EXPECT_FALSE(d.on_lattice(760));
}

TEST(SearchSpace, OverrideReplacesBounds) {
  auto s = default_space();
  s.override_dimension("base_neurons", 10, 30);
  EXPECT_EQ(s[s.index("base_neurons")].count(), 3u);
  EXPECT_THROW(s.override_dimension("base_neurons", 30, 10), ConfigError);
}

TEST(Hyperparameters, RoundTripAndValidation) {
  Hyperparameters hp;
  hp.base_neurons = 120;
  hp.meta_layers = 1;
  EXPECT_EQ(Hyperparameters::from_values(hp.to_values()), hp);
  EXPECT_TRUE(default_space().contains(hp.to_values()));
  EXPECT_THROW(Hyperparameters::from_values({1, 2}), ConfigError);
  hp.gbdt_subsample = 0.0;
  EXPECT_THROW(validate(hp), ConfigError);
}

TEST(SampleUniform, CoversEveryLatticePoint) {
  const SearchSpace s({{"c", DimensionKind::int_step, 0, 4, 1}});
  Rng rng(1);
  std::vector<int> seen(5, 0);
  for (int i = 0; i < 5000; ++i) ++seen[static_cast<std::size_t>(sample_uniform(s, rng)[0])];
  for (int c : seen) {
    EXPECT_GT(c, 850);
    EXPECT_LT(c, 1150);
  }
}

TEST(SplitTrials, Examples) {
  std::vector<Trial> h;
  for (std::size_t i = 0; i < 8; ++i) h.push_back(make_trial(i, 0.1 * static_cast<double>(i), static_cast<double>(i)));
  auto [good, bad] = split_trials(h, 0.25);
  ASSERT_EQ(good.size(), 2u);
  EXPECT_EQ(good[0].index, 7u);
  EXPECT_EQ(good[1].index, 6u);
  EXPECT_EQ(bad.size(), 6u);

  const auto one = split_trials({make_trial(0, 0.5, 0.3)}, 0.25);
  EXPECT_EQ(one.first.size(), 1u);
  EXPECT_TRUE(one.second.empty());

  // ties keep the earlier trial in the good set
  const auto tied = split_trials({make_trial(0, 0.1, 0.5), make_trial(1, 0.2, 0.5), make_trial(2, 0.3, 0.1)}, 0.25);
  EXPECT_EQ(tied.first[0].index, 0u);
}

TEST(SplitTrials, IgnoresFailedAndRejectsEmpty) {
  auto failed = make_trial(0, 0.1, 9.0);
  failed.status = TrialStatus::failed;
  auto [good, bad] = split_trials({failed, make_trial(1, 0.2, 0.1)}, 0.25);
  ASSERT_EQ(good.size(), 1u);
  EXPECT_EQ(good[0].index, 1u);
  EXPECT_THROW(split_trials({failed}, 0.25), ConfigError);
  EXPECT_THROW(split_trials({}, 0.25), ConfigError);
}

TEST(ParzenEstimator, DensityIntegratesToOneOverLattice) {
  const Dimension d{"x", DimensionKind::float_step, 0, 1, 0.01};
  ParzenEstimator pe(d, {0.2, 0.25, 0.9});
  // midpoint rule over the continuous support
  double total = 0.0;
  const int n = 20000;
  const double w = (pe.support_high() - pe.support_low()) / n;
  for (int i = 0; i < n; ++i) total += std::exp(pe.log_pdf(pe.support_low() + (i + 0.5) * w)) * w;
  EXPECT_NEAR(total, 1.0, 1e-6);
  EXPECT_EQ(pe.mus().size(), 3u);
  for (double s : pe.sigmas()) {
    EXPECT_GE(s, d.step);
    EXPECT_LE(s, 0.5);
  }
}

TEST(ParzenEstimator, CategoricalWeightsAreSmoothedFrequencies) {
  const Dimension d{"c", DimensionKind::categorical, 0, 1, 1};
  ParzenEstimator pe(d, {1, 1, 1});
  EXPECT_NEAR(std::exp(pe.log_pdf(1)), 4.0 / 5.0, 1e-12);
  EXPECT_NEAR(std::exp(pe.log_pdf(0)), 1.0 / 5.0, 1e-12);
}

TEST(Suggest, UniformDuringStartup) {
  const auto s = default_space();
  Rng a(5), b(5);
  EXPECT_EQ(suggest({}, s, a), sample_uniform(s, b));
}

TEST(Suggest, ConcentratesNearGoodRegion) {
  const auto s = unit_space();
  std::vector<Trial> h;
  Rng rng(3);
  for (std::size_t i = 0; i < 40; ++i) {
    const double x = s[0].snap(rng.uniform());
    h.push_back(make_trial(i, x, -std::abs(x - 0.3)));
  }
  int near = 0;
  for (int i = 0; i < 200; ++i) {
    const double x = suggest(h, s, rng)[0];
    near += std::abs(x - 0.3) <= 0.15;
  }
  EXPECT_GE(near, 180);
}

TEST(Suggest, AlwaysOnLatticeFuzz) {
  const auto s = default_space();
  Rng rng(77);
  std::vector<Trial> h;
  for (std::size_t i = 0; i < 30; ++i) {
    Trial t;
    t.index = i;
    t.params = sample_uniform(s, rng);
    t.objective = rng.uniform();
    h.push_back(t);
  }
  for (int i = 0; i < 10000; ++i) {
    // vary the history a little so the estimators change too
    h[static_cast<std::size_t>(i) % h.size()].objective = rng.uniform();
    const auto x = suggest(h, s, rng);
    ASSERT_TRUE(s.contains(x)) << "iteration " << i;
  }
}

TEST(Optimize, SingleTrialAndBestIsMaximum) {
  const auto s = unit_space();
  const Objective f = [](const std::vector<double>& p, std::uint64_t) {
    return Evaluation::from_folds({1.0 - std::abs(p[0] - 0.7), 1.0 - std::abs(p[0] - 0.7)});
  };
  OptimizeOptions opts;
  opts.n_trials = 1;
  const auto one = optimize(f, s, opts);
  ASSERT_EQ(one.history.size(), 1u);
  EXPECT_EQ(one.best.index, 0u);

  opts.n_trials = 40;
  opts.seed = 9;
  const auto r = optimize(f, s, opts);
  ASSERT_EQ(r.history.size(), 40u);
  for (const auto& t : r.history) EXPECT_GE(r.best.objective, t.objective);
  EXPECT_EQ(r.best.seed, derive_seed(9, r.best.index));
}

TEST(Optimize, FailedTrialsAreRecorded) {
  const auto s = unit_space();
  const Objective f = [](const std::vector<double>& p, std::uint64_t) -> Evaluation {
    if (p[0] < 0.5) throw ValidationError("low");
    return Evaluation::from_folds({p[0]});
  };
  OptimizeOptions opts;
  opts.n_trials = 30;
  const auto r = optimize(f, s, opts);
  bool any_failed = false;
  for (const auto& t : r.history) any_failed |= !t.complete();
  EXPECT_TRUE(any_failed);
  EXPECT_TRUE(r.best.complete());

  const Objective always = [](const std::vector<double>&, std::uint64_t) -> Evaluation { throw ValidationError("no"); };
  opts.n_trials = 3;
  EXPECT_THROW(optimize(always, s, opts), Error);
}

TEST(Optimize, SequentialRunIsReproducibleAndParallelRunCompletes) {
  const auto s = default_space();
  const Objective f = [](const std::vector<double>& p, std::uint64_t seed) {
    return Evaluation::from_folds({p[0] / 750.0, static_cast<double>(seed % 7) / 7.0});
  };
  OptimizeOptions opts;
  opts.n_trials = 25;
  opts.seed = 4;
  EXPECT_EQ(history_to_jsonl(optimize(f, s, opts).history, s), history_to_jsonl(optimize(f, s, opts).history, s));
  opts.parallelism = 4;
  EXPECT_EQ(optimize(f, s, opts).history.size(), 25u);
}

TEST(HistoryJsonl, OneObjectPerTrialWithNamedParams) {
  const auto s = unit_space();
  std::vector<Trial> h{make_trial(0, 0.25, 0.5)};
  auto bad = make_trial(1, 0.5, 0.0);
  bad.status = TrialStatus::failed;
  bad.message = "diverged";
  h.push_back(bad);
  std::istringstream in(history_to_jsonl(h, s));
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0]["params"]["x"].get<double>(), 0.25);
  EXPECT_EQ(rows[1]["status"], "failed");
  EXPECT_EQ(rows[1]["message"], "diverged");
}
