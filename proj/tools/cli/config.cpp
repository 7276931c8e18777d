#include "cli/config.hpp"

#include <json.hpp>

#include "asag/error.hpp"
#include "asag/io.hpp"

namespace asag::cli {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

Hyperparameters hp_from(const json& j) {
  const auto space = default_space();
  reject_unknown(j, {"base_neurons", "base_lr", "base_iters", "gbdt_estimators", "gbdt_lr", "gbdt_subsample",
                     "meta_layers", "meta_neurons", "meta_lr", "meta_iters"},
                 "hyperparameters.");
  auto values = Hyperparameters{}.to_values();
  for (std::size_t i = 0; i < space.size(); ++i)
    if (j.contains(space[i].name)) values[i] = j.at(space[i].name).get<double>();
  auto hp = Hyperparameters::from_values(values);
  asag::validate(hp);
  return hp;
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  PipelineConfig cfg;
  try {
    reject_unknown(j, {"preprocess", "features", "balance", "model", "search", "eval", "hyperparameters"}, "");
    if (j.contains("preprocess")) {
      const auto& p = j["preprocess"];
      reject_unknown(p, {"lexicon", "stoplist", "strip_punctuation"}, "preprocess.");
      if (p.contains("lexicon") && !p["lexicon"].is_null()) {
        std::filesystem::path lex = p["lexicon"].get<std::string>();
        if (lex.is_relative()) lex = path.parent_path() / lex;
        cfg.lexicon_path = lex;
      }
      if (p.contains("stoplist")) {
        const auto& s = p["stoplist"];
        reject_unknown(s, {"mode", "threshold"}, "preprocess.stoplist.");
        if (s.contains("mode")) cfg.settings.stop_policy.mode = corpus::stop_mode_from_string(s["mode"].get<std::string>());
        if (s.contains("threshold")) cfg.settings.stop_policy.threshold = s["threshold"].get<double>();
      }
      if (p.contains("strip_punctuation")) cfg.settings.preprocess.strip_punctuation = p["strip_punctuation"].get<bool>();
    }
    if (j.contains("features")) {
      const auto& f = j["features"];
      reject_unknown(f, {"embeddings", "dim"}, "features.");
      if (f.contains("embeddings")) {
        std::filesystem::path emb = f["embeddings"].get<std::string>();
        if (emb.is_relative()) emb = path.parent_path() / emb;
        cfg.embeddings = emb;
      }
      if (f.contains("dim")) cfg.dim = f["dim"].get<std::size_t>();
    }
    if (j.contains("balance")) {
      const auto& b = j["balance"];
      reject_unknown(b, {"synth_fraction", "k_neighbors"}, "balance.");
      if (b.contains("synth_fraction")) cfg.settings.synth_fraction = b["synth_fraction"].get<double>();
      if (b.contains("k_neighbors")) cfg.settings.k_neighbors = b["k_neighbors"].get<int>();
    }
    if (j.contains("model")) {
      const auto& m = j["model"];
      reject_unknown(m, {"kind", "out_of_fold", "internal_folds", "gbdt_max_depth", "gbdt_lambda"}, "model.");
      auto& st = cfg.settings.stacking;
      if (m.contains("kind")) st.kind = stack::model_kind_from_string(m["kind"].get<std::string>());
      if (m.contains("out_of_fold")) st.out_of_fold = m["out_of_fold"].get<bool>();
      if (m.contains("internal_folds")) st.internal_folds = m["internal_folds"].get<int>();
      if (m.contains("gbdt_max_depth")) st.gbdt_max_depth = m["gbdt_max_depth"].get<int>();
      if (m.contains("gbdt_lambda")) st.gbdt_lambda = m["gbdt_lambda"].get<double>();
    }
    if (j.contains("search")) {
      const auto& s = j["search"];
      reject_unknown(s, {"n_trials", "seed", "parallelism", "space", "n_startup", "n_candidates", "gamma"}, "search.");
      if (s.contains("n_trials")) cfg.n_trials = s["n_trials"].get<std::size_t>();
      if (s.contains("seed")) cfg.seed = s["seed"].get<std::uint64_t>();
      if (s.contains("parallelism")) cfg.parallelism = s["parallelism"].get<std::size_t>();
      if (s.contains("n_startup")) cfg.tpe.n_startup = s["n_startup"].get<std::size_t>();
      if (s.contains("n_candidates")) cfg.tpe.n_candidates = s["n_candidates"].get<std::size_t>();
      if (s.contains("gamma")) cfg.tpe.gamma = s["gamma"].get<double>();
      if (s.contains("space")) {
        for (const auto& [name, range] : s["space"].items()) {
          reject_unknown(range, {"low", "high", "step"}, "search.space." + name + ".");
          const auto& dim = cfg.space[cfg.space.index(name)];
          cfg.space.override_dimension(name, range.value("low", dim.low), range.value("high", dim.high),
                                       range.value("step", 0.0));
        }
      }
    }
    if (j.contains("eval")) {
      const auto& e = j["eval"];
      reject_unknown(e, {"k", "dev_budget", "test_budget", "positive_label"}, "eval.");
      if (e.contains("k")) cfg.k_folds = e["k"].get<int>();
      if (e.contains("dev_budget")) cfg.budget.dev = e["dev_budget"].get<std::size_t>();
      if (e.contains("test_budget")) cfg.budget.test = e["test_budget"].get<std::size_t>();
      if (e.contains("positive_label")) cfg.settings.positive_label = e["positive_label"].get<int>();
    }
    if (j.contains("hyperparameters")) cfg.hyperparameters = hp_from(j["hyperparameters"]);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return cfg;
}

void validate(const PipelineConfig& cfg) {
  const auto& s = cfg.settings;
  if (!(s.synth_fraction >= 0.0 && s.synth_fraction <= 1.0)) throw ConfigError("balance.synth_fraction must lie in [0,1]");
  if (s.k_neighbors < 1) throw ConfigError("balance.k_neighbors must be at least 1");
  if (s.stop_policy.mode == corpus::StopMode::doc_fraction &&
      !(s.stop_policy.threshold >= 0.0 && s.stop_policy.threshold <= 1.0))
    throw ConfigError("preprocess.stoplist.threshold must lie in [0,1] for doc_fraction");
  if (s.positive_label != 0 && s.positive_label != 1) throw ConfigError("eval.positive_label must be 0 or 1");
  if (s.stacking.internal_folds < 2) throw ConfigError("model.internal_folds must be at least 2");
  if (cfg.k_folds < 2) throw ConfigError("eval.k must be at least 2");
  if (cfg.n_trials < 1) throw ConfigError("search.n_trials must be at least 1");
  if (cfg.budget.dev < 1 || cfg.budget.test < 1) throw ConfigError("eval budgets must be at least 1");
  if (!(cfg.tpe.gamma > 0.0 && cfg.tpe.gamma <= 1.0)) throw ConfigError("search.gamma must lie in (0,1]");
}

Hyperparameters load_hyperparameters(const std::filesystem::path& path) {
  try {
    auto j = json::parse(io::read_file(path));
    if (j.contains("hyperparameters")) j = j["hyperparameters"];
    return hp_from(j);
  } catch (const json::exception& e) {
    throw ConfigError("hyperparameter file " + path.string() + ": " + e.what());
  }
}

}  // namespace asag::cli
