#include "asag/pipeline.hpp"

#include "asag/error.hpp"
#include "asag/rng.hpp"

namespace asag {

namespace {

std::vector<std::string> ids_of(const corpus::Dataset& ds) {
  std::vector<std::string> ids;
  ids.reserve(ds.size());
  for (const auto& it : ds.items) ids.push_back(it.id);
  return ids;
}

}  // namespace

std::string_view to_string(FitStage stage) {
  switch (stage) {
    case FitStage::stoplist: return "stoplist";
    case FitStage::length_normalizer: return "length_normalizer";
    case FitStage::smote: return "smote";
    case FitStage::training: return "training";
  }
  return "training";
}

std::vector<std::vector<std::string>> Scorer::tokenize(const corpus::Dataset& ds) const {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(ds.size());
  for (const auto& item : ds.items) docs.push_back(corpus::preprocess(item.raw_text, lexicon, stoplist, preprocess));
  return docs;
}

Matrix Scorer::features(const corpus::Dataset& ds, const embedding::VectorStore& store) const {
  return embedding::featurize_all(tokenize(ds), store, model.featurizer);
}

stack::Prediction Scorer::predict(const corpus::Dataset& ds, const embedding::VectorStore& store) const {
  return stack::predict(model, features(ds, store));
}

Scorer fit_scorer(const Hyperparameters& hp, const corpus::Dataset& train,
                  const embedding::VectorStore& store, const PipelineSettings& settings,
                  std::uint64_t seed, const FitObserver& observer) {
  if (train.single_class()) throw ValidationError("training data for '" + train.question_id + "' has a single class");
  Scorer scorer;
  scorer.lexicon = settings.lexicon;
  scorer.preprocess = settings.preprocess;

  const auto ids = observer ? ids_of(train) : std::vector<std::string>{};
  const auto raw = corpus::tokenize(train, settings.lexicon, corpus::Stoplist{}, settings.preprocess);
  scorer.stoplist = corpus::build_stoplist(raw, settings.stop_policy);
  if (observer) observer(FitStage::stoplist, ids);

  const auto docs = scorer.tokenize(train);
  embedding::FeaturizerConfig fcfg;
  fcfg.dim = store.dim();
  fcfg.max_train_word_count = embedding::max_word_count(docs);
  if (observer) observer(FitStage::length_normalizer, ids);

  Matrix X = embedding::featurize_all(docs, store, fcfg);
  Labels y = train.labels();

  if (settings.synth_fraction > 0.0) {
    balance::BalanceConfig bcfg{settings.synth_fraction, settings.k_neighbors, derive_seed(seed, 11)};
    auto balanced = balance::balance_dataset(X, y, bcfg);
    X = std::move(balanced.X);
    y = std::move(balanced.y);
    if (observer) observer(FitStage::smote, ids);
  }

  scorer.model = stack::fit_stacking(X, y, hp, derive_seed(seed, 12), settings.stacking);
  scorer.model.featurizer = fcfg;
  if (observer) observer(FitStage::training, ids);
  return scorer;
}

}  // namespace asag
