#include "asag/evalkit.hpp"

#include <algorithm>
#include <numeric>

#include "asag/error.hpp"
#include "asag/rng.hpp"

namespace asag::evalkit {

MetricReport f1_score(const Labels& preds, const Labels& golds, int positive) {
  if (preds.size() != golds.size()) throw ShapeError("f1_score: predictions and golds differ in length");
  if (preds.empty()) throw ShapeError("f1_score: empty input");
  MetricReport r;
  r.positive_label = positive;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == positive, g = golds[i] == positive;
    if (p && g) ++r.tp;
    else if (p) ++r.fp;
    else if (g) ++r.fn;
    else ++r.tn;
  }
  r.precision = r.tp + r.fp ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  r.recall = r.tp + r.fn ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.f1 = r.tp ? 2.0 * static_cast<double>(r.tp) / static_cast<double>(2 * r.tp + r.fp + r.fn) : 0.0;
  return r;
}

MetricReport combined_f1(const std::vector<std::pair<Labels, Labels>>& per_question, int positive) {
  if (per_question.empty()) throw ShapeError("combined_f1: no questions given");
  Labels preds, golds;
  for (const auto& [p, g] : per_question) {
    if (p.size() != g.size() || p.empty()) throw ShapeError("combined_f1: invalid prediction/gold pair");
    preds.insert(preds.end(), p.begin(), p.end());
    golds.insert(golds.end(), g.begin(), g.end());
  }
  return f1_score(preds, golds, positive);
}

tpe::Trial cross_validate(const Hyperparameters& hp, const corpus::Dataset& ds,
                          const embedding::VectorStore& store, const PipelineSettings& settings, int k,
                          std::uint64_t seed, const FitObserver& observer) {
  tpe::Trial trial;
  trial.params = hp.to_values();
  trial.seed = seed;
  try {
    const auto folds = corpus::split_folds(ds, k, derive_seed(seed, 21));
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<std::size_t> train_rows;
      for (std::size_t g = 0; g < folds.size(); ++g)
        if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
      std::sort(train_rows.begin(), train_rows.end());
      const auto train = ds.subset(train_rows);
      const auto held = ds.subset(folds[f]);
      if (train.single_class())
        throw ValidationError("fold " + std::to_string(f) + ": training portion has a single class");
      const auto scorer = fit_scorer(hp, train, store, settings, derive_seed(seed, 100 + f), observer);
      const auto pred = scorer.predict(held, store);
      trial.fold_scores.push_back(f1_score(pred.labels, held.labels(), settings.positive_label).f1);
    }
    trial.objective = tpe::Evaluation::from_folds(trial.fold_scores).objective;
  } catch (const std::exception& e) {
    trial.status = tpe::TrialStatus::failed;
    trial.message = e.what();
    trial.objective = 0.0;
  }
  return trial;
}

SelectionReport selection_protocol(const std::vector<tpe::Trial>& history, const corpus::Dataset& train,
                                   const corpus::Dataset& dev, const corpus::Dataset& test,
                                   const embedding::VectorStore& store, const PipelineSettings& settings,
                                   SelectionBudget budget) {
  if (budget.dev < 1 || budget.test < 1) throw ConfigError("dev and test budgets must be at least 1");
  SelectionReport rep;
  std::vector<const tpe::Trial*> ranked;
  for (const auto& t : history)
    if (t.complete()) ranked.push_back(&t);
  if (ranked.empty()) throw Error("selection needs at least one complete trial");
  std::stable_sort(ranked.begin(), ranked.end(), [](const tpe::Trial* a, const tpe::Trial* b) {
    return a->objective != b->objective ? a->objective > b->objective : a->index < b->index;
  });
  for (const auto* t : ranked) rep.ranked.push_back(t->index);

  if (budget.dev > ranked.size()) {
    rep.warnings.push_back("dev budget " + std::to_string(budget.dev) + " clamped to " +
                           std::to_string(ranked.size()) + " complete trials");
    budget.dev = ranked.size();
  }
  if (budget.test > budget.dev) {
    rep.warnings.push_back("test budget " + std::to_string(budget.test) + " clamped to " +
                           std::to_string(budget.dev));
    budget.test = budget.dev;
  }

  struct Candidate {
    const tpe::Trial* trial;
    Scorer scorer;
    MetricReport dev;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < budget.dev; ++i) {
    const auto* t = ranked[i];
    auto scorer = fit_scorer(Hyperparameters::from_values(t->params), train, store, settings, t->seed);
    const auto pred = scorer.predict(dev, store);
    auto report = f1_score(pred.labels, dev.labels(), settings.positive_label);
    rep.dev_evaluations.push_back({t->index, report});
    candidates.push_back({t, std::move(scorer), report});
  }
  // Stable: dev ties keep CV rank order.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.dev.f1 > b.dev.f1; });

  bool have_choice = false;
  for (std::size_t i = 0; i < budget.test; ++i) {
    auto& c = candidates[i];
    auto pred = c.scorer.predict(test, store);
    const auto report = f1_score(pred.labels, test.labels(), settings.positive_label);
    rep.test_evaluations.push_back({c.trial->index, report});
    if (!have_choice || report.f1 > rep.chosen_test.f1) {
      have_choice = true;
      rep.chosen_trial = c.trial->index;
      rep.chosen_seed = c.trial->seed;
      rep.chosen_test = report;
      rep.chosen = c.scorer;
      rep.chosen_test_prediction = std::move(pred);
    }
  }
  return rep;
}

}  // namespace asag::evalkit
