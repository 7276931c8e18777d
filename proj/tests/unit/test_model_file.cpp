#include <gtest/gtest.h>

#include "asag/error.hpp"
#include "asag/io.hpp"
#include "asag/model_file.hpp"
#include "support/synthetic.hpp"

using namespace asag;

namespace {

struct Fixture {
  std::filesystem::path dir, vectors;
  embedding::VectorStore store{1};
  corpus::Dataset train, test;
  ModelFile model;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    out.dir = asag::testing::scratch_dir("model_file");
    out.vectors = asag::testing::write_vectors(out.dir, 10, 4);
    out.store = embedding::load_vectors(out.vectors);
    const auto q = asag::testing::write_question(out.dir, "q", {});
    out.train = corpus::load_dataset(q.train, corpus::Split::train);
    out.test = corpus::load_dataset(q.test, corpus::Split::test);
    Hyperparameters hp;
    hp.base_neurons = 10;
    hp.base_iters = 30;
    hp.gbdt_estimators = 10;
    hp.meta_layers = 1;
    hp.meta_iters = 30;
    PipelineSettings settings;
    settings.stop_policy = {corpus::StopMode::top_k, 2};
    out.model.question_id = "q";
    out.model.seed = 99;
    out.model.embedding_path = out.vectors.string();
    out.model.embedding_digest = io::sha256_file(out.vectors);
    out.model.scorer = fit_scorer(hp, out.train, out.store, settings, 99);
    return out;
  }();
  return f;
}

}  // namespace

TEST(ModelFile, SaveLoadSaveIsByteIdentical) {
  const auto& f = fixture();
  const auto a = f.dir / "a.json", b = f.dir / "b.json";
  save_model(f.model, a);
  save_model(load_model(a), b);
  EXPECT_EQ(io::read_file(a), io::read_file(b));
}

TEST(ModelFile, ReloadedModelPredictsIdentically) {
  const auto& f = fixture();
  const auto reloaded = model_from_json(to_json(f.model));
  EXPECT_EQ(reloaded.question_id, "q");
  EXPECT_EQ(reloaded.seed, 99u);
  EXPECT_EQ(reloaded.scorer.stoplist.removed_tokens, f.model.scorer.stoplist.removed_tokens);
  const auto p = f.model.scorer.predict(f.test, f.store);
  const auto q = reloaded.scorer.predict(f.test, f.store);
  EXPECT_EQ(p.labels, q.labels);
  EXPECT_TRUE(p.proba == q.proba);
}

TEST(ModelFile, RejectsMalformedAndFutureVersions) {
  const auto& f = fixture();
  EXPECT_THROW(model_from_json("{"), ParseError);
  EXPECT_THROW(model_from_json("{}"), ParseError);
  auto text = to_json(f.model);
  const auto pos = text.find("\"format_version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 19, "\"format_version\": 7");
  EXPECT_THROW(model_from_json(text), ParseError);
}

TEST(ModelFile, DigestCheck) {
  const auto& f = fixture();
  EXPECT_TRUE(check_embedding_digest(f.model, f.vectors).empty());
  const auto other = f.dir / "other.vec";
  std::ofstream(other) << "1 10\nx 1 2 3 4 5 6 7 8 9 10\n";
  EXPECT_FALSE(check_embedding_digest(f.model, other).empty());
}
