#include "cli/commands.hpp"

#include <charconv>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "asag/csv.hpp"
#include "asag/error.hpp"
#include "asag/evalkit.hpp"
#include "asag/io.hpp"
#include "asag/model_file.hpp"
#include "cli/config.hpp"

namespace asag::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void require_file(const fs::path& p, const std::string& flag) {
  if (p.empty()) throw UsageError(flag + " is required");
  if (!fs::is_regular_file(p)) throw Error(flag + ": file not found: " + p.string());
}

json metric_json(const evalkit::MetricReport& r) {
  json j;
  j["f1"] = r.f1;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["tn"] = r.tn;
  j["positive_label"] = r.positive_label;
  return j;
}

struct Common {
  std::string config_path;
  std::string embeddings;
  std::string lexicon;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model_kind;
  std::optional<double> synth_fraction;
  std::optional<std::string> stop_mode;
  std::optional<double> stop_threshold;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_path, "JSON pipeline configuration file")->check(CLI::ExistingFile);
    app.add_option("--lexicon", lexicon, "Normalisation lexicon (nonstandard<TAB>standard per line)");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--model-kind", model_kind, "stacking | mlp | gbdt");
    app.add_option("--synth-fraction", synth_fraction, "SMOTE synthetic rows as a fraction of all rows (0 disables)");
    app.add_option("--stoplist-mode", stop_mode, "none | doc_fraction | top_k");
    app.add_option("--stoplist-threshold", stop_threshold, "Document-frequency fraction or k");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (!embeddings.empty()) cfg.embeddings = embeddings;
    if (!lexicon.empty()) cfg.lexicon_path = lexicon;
    if (seed) cfg.seed = *seed;
    if (model_kind) cfg.settings.stacking.kind = stack::model_kind_from_string(*model_kind);
    if (synth_fraction) cfg.settings.synth_fraction = *synth_fraction;
    if (stop_mode) cfg.settings.stop_policy.mode = corpus::stop_mode_from_string(*stop_mode);
    if (stop_threshold) cfg.settings.stop_policy.threshold = *stop_threshold;
    if (cfg.lexicon_path) {
      require_file(*cfg.lexicon_path, "--lexicon");
      cfg.settings.lexicon = corpus::load_lexicon(*cfg.lexicon_path);
    }
    return cfg;
  }
};

embedding::VectorStore load_store(const PipelineConfig& cfg, std::ostream& err) {
  require_file(cfg.embeddings, "--embeddings");
  auto store = embedding::load_vectors(cfg.embeddings);
  for (const auto& w : store.warnings) err << "warning: " << w << '\n';
  if (cfg.dim && *cfg.dim != store.dim())
    throw ConfigError("configured dim " + std::to_string(*cfg.dim) + " does not match vector file dim " +
                      std::to_string(store.dim()));
  return store;
}

corpus::Dataset load_labeled(const std::string& path, corpus::Split split, const std::string& flag,
                             std::ostream& err) {
  require_file(path, flag);
  auto ds = corpus::load_dataset(path, split);
  for (const auto& w : ds.warnings) err << "warning: " << w << '\n';
  return ds;
}

// --- tune -------------------------------------------------------------------

struct TuneArgs {
  Common common;
  std::vector<std::string> train, dev, test, questions;
  std::optional<std::size_t> trials, parallelism, dev_budget, test_budget;
  std::optional<int> k;
  std::string out_dir, report;
};

int cmd_tune(const TuneArgs& a, std::ostream& out, std::ostream& err) {
  if (a.common.embeddings.empty() && a.common.config_path.empty()) throw UsageError("--embeddings is required");
  PipelineConfig cfg = a.common.resolve();
  if (a.trials) cfg.n_trials = *a.trials;
  if (a.parallelism) cfg.parallelism = *a.parallelism;
  if (a.dev_budget) cfg.budget.dev = *a.dev_budget;
  if (a.test_budget) cfg.budget.test = *a.test_budget;
  if (a.k) cfg.k_folds = *a.k;
  validate(cfg);
  if (cfg.embeddings.empty()) throw UsageError("--embeddings is required");

  if (a.dev.size() != a.train.size() || a.test.size() != a.train.size())
    throw UsageError("--train, --dev and --test must be given the same number of times");
  if (!a.questions.empty() && a.questions.size() != a.train.size())
    throw UsageError("--question must be given once per --train");

  const auto store = load_store(cfg, err);
  const fs::path out_dir = a.out_dir;
  fs::create_directories(out_dir);

  json report;
  json questions = json::array();
  json manifest;
  json manifest_questions = json::array();
  std::vector<std::pair<Labels, Labels>> pooled;
  std::set<std::string> seen;

  for (std::size_t q = 0; q < a.train.size(); ++q) {
    auto train = load_labeled(a.train[q], corpus::Split::train, "--train", err);
    auto dev = load_labeled(a.dev[q], corpus::Split::dev, "--dev", err);
    auto test = load_labeled(a.test[q], corpus::Split::test, "--test", err);
    const std::string qid = a.questions.empty() ? train.question_id : a.questions[q];
    if (!seen.insert(qid).second) throw UsageError("duplicate question id '" + qid + "'; use --question");
    if (train.items.empty()) throw ValidationError("training set for '" + qid + "' is empty");

    err << "[" << qid << "] tuning " << cfg.n_trials << " trials on " << train.size() << " responses\n";
    tpe::OptimizeOptions opts;
    opts.n_trials = cfg.n_trials;
    opts.seed = cfg.seed;
    opts.tpe = cfg.tpe;
    opts.parallelism = cfg.parallelism;
    opts.on_trial = [&](const tpe::Trial& t) {
      err << "[" << qid << "] trial " << t.index << ": "
          << (t.complete() ? "f1=" + format_double(t.objective) : "failed (" + t.message + ")") << '\n';
    };
    const auto objective = [&](const std::vector<double>& params, std::uint64_t seed) {
      const auto trial = evalkit::cross_validate(Hyperparameters::from_values(params), train, store, cfg.settings,
                                                 cfg.k_folds, seed);
      if (!trial.complete()) throw Error(trial.message);
      return tpe::Evaluation{trial.fold_scores, trial.objective};
    };
    const auto result = tpe::optimize(objective, cfg.space, opts);
    const fs::path history_path = out_dir / (qid + ".history.jsonl");
    io::write_file_atomic(history_path, tpe::history_to_jsonl(result.history, cfg.space));

    auto sel = evalkit::selection_protocol(result.history, train, dev, test, store, cfg.settings, cfg.budget);
    for (const auto& w : sel.warnings) err << "warning: [" << qid << "] " << w << '\n';

    ModelFile model;
    model.question_id = qid;
    model.seed = sel.chosen_seed;
    model.embedding_path = fs::absolute(cfg.embeddings).lexically_normal().string();
    model.embedding_digest = io::sha256_file(cfg.embeddings);
    model.scorer = sel.chosen;
    const fs::path model_path = out_dir / (qid + ".model.json");
    save_model(model, model_path);

    json qj;
    qj["question_id"] = qid;
    const auto m = metric_json(sel.chosen_test);
    for (const auto& [key, value] : m.items()) qj[key] = value;
    qj["trial_count"] = result.history.size();
    qj["complete_trials"] = sel.ranked.size();
    qj["best_cv_f1"] = result.best.objective;
    qj["chosen_trial"] = sel.chosen_trial;
    qj["seeds"] = {{"search", cfg.seed}, {"model", sel.chosen_seed}};
    json devs = json::array(), tests = json::array();
    for (const auto& e : sel.dev_evaluations) devs.push_back({{"trial", e.trial_index}, {"f1", e.report.f1}});
    for (const auto& e : sel.test_evaluations) tests.push_back({{"trial", e.trial_index}, {"f1", e.report.f1}});
    qj["dev_evaluations"] = std::move(devs);
    qj["test_evaluations"] = std::move(tests);
    qj["model_file"] = model_path.filename().string();
    qj["history_file"] = history_path.filename().string();
    questions.push_back(std::move(qj));
    manifest_questions.push_back({{"question_id", qid}, {"model", model_path.filename().string()}});

    pooled.emplace_back(sel.chosen_test_prediction.labels, test.labels());
    err << "[" << qid << "] chosen trial " << sel.chosen_trial << " test f1=" << format_double(sel.chosen_test.f1)
        << '\n';
  }

  report["questions"] = std::move(questions);
  if (pooled.size() >= 2) report["combined"] = metric_json(evalkit::combined_f1(pooled, cfg.settings.positive_label));
  report["combined_f1"] = evalkit::combined_f1(pooled, cfg.settings.positive_label).f1;
  report["model_kind"] = std::string(stack::to_string(cfg.settings.stacking.kind));
  report["synth_fraction"] = cfg.settings.synth_fraction;
  manifest["questions"] = std::move(manifest_questions);

  io::write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  const fs::path report_path = a.report.empty() ? out_dir / "report.json" : fs::path(a.report);
  io::write_file_atomic(report_path, report.dump(2) + "\n");
  out << report.dump(2) << '\n';
  return kOk;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string train, hp, out, question;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg = a.common.resolve();
  validate(cfg);
  if (cfg.embeddings.empty()) throw UsageError("--embeddings is required");
  Hyperparameters hp;
  if (!a.hp.empty()) hp = load_hyperparameters(a.hp);
  else if (cfg.hyperparameters) hp = *cfg.hyperparameters;
  else throw UsageError("--hp (or a config with a hyperparameters section) is required");

  const auto store = load_store(cfg, err);
  const auto train = load_labeled(a.train, corpus::Split::train, "--train", err);
  ModelFile model;
  model.question_id = a.question.empty() ? train.question_id : a.question;
  model.seed = cfg.seed;
  model.embedding_path = fs::absolute(cfg.embeddings).lexically_normal().string();
  model.embedding_digest = io::sha256_file(cfg.embeddings);
  model.scorer = fit_scorer(hp, train, store, cfg.settings, cfg.seed);
  save_model(model, a.out);
  out << "wrote " << a.out << '\n';
  return kOk;
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string model, input, out, embeddings;
};

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
  require_file(a.model, "--model");
  require_file(a.input, "--input");
  const auto model = load_model(a.model);
  const fs::path emb = a.embeddings.empty() ? fs::path(model.embedding_path) : fs::path(a.embeddings);
  if (!fs::is_regular_file(emb))
    throw Error("embedding file " + emb.string() + " used to train the model is not available; pass --embeddings");
  if (auto msg = check_embedding_digest(model, emb); !msg.empty()) err << "warning: " << msg << '\n';
  const auto store = embedding::load_vectors(emb);
  if (store.dim() != model.scorer.model.featurizer.dim)
    throw ShapeError("model expects " + std::to_string(model.scorer.model.featurizer.dim) +
                     "-dim vectors, embedding file has " + std::to_string(store.dim()));

  const auto ds = corpus::load_unlabeled(a.input);
  for (const auto& w : ds.warnings) err << "warning: " << w << '\n';
  std::string csv = "id,label,p_correct\n";
  if (!ds.items.empty()) {
    const auto pred = model.scorer.predict(ds, store);
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
      csv += csv::escape(ds.items[i].id);
      csv += ',';
      csv += std::to_string(pred.labels[i]);
      csv += ',';
      csv += format_double(pred.proba(static_cast<Eigen::Index>(i), 1));
      csv += '\n';
    }
  }
  io::write_file_atomic(a.out, csv);
  out << "wrote " << ds.items.size() << " predictions to " << a.out << '\n';
  return kOk;
}

// --- evaluate ---------------------------------------------------------------

std::map<std::string, int> read_labels(const std::string& path, const std::string& flag) {
  require_file(path, flag);
  const auto rows = csv::parse(io::read_file(path));
  if (rows.empty()) throw ParseError(path + ": missing header", 1);
  std::size_t id_col = SIZE_MAX, label_col = SIZE_MAX;
  for (std::size_t c = 0; c < rows[0].fields.size(); ++c) {
    if (rows[0].fields[c] == "id") id_col = c;
    if (rows[0].fields[c] == "label") label_col = c;
  }
  if (id_col == SIZE_MAX || label_col == SIZE_MAX) throw ParseError(path + ": header needs id and label columns", 1);
  std::map<std::string, int> labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != rows[0].fields.size())
      throw ParseError(path + ": wrong column count", row.line);
    const auto& lab = row.fields[label_col];
    if (lab != "0" && lab != "1")
      throw ValidationError(path + ": unknown label value '" + lab + "' at line " + std::to_string(row.line));
    if (!labels.emplace(row.fields[id_col], lab == "1").second)
      throw ValidationError(path + ": duplicate id '" + row.fields[id_col] + "'");
  }
  return labels;
}

std::pair<Labels, Labels> join(const std::string& pred_path, const std::string& gold_path) {
  const auto preds = read_labels(pred_path, "--pred");
  const auto golds = read_labels(gold_path, "--gold");
  std::pair<Labels, Labels> out;
  for (const auto& [id, g] : golds) {
    const auto it = preds.find(id);
    if (it == preds.end()) throw ValidationError(pred_path + ": no prediction for id '" + id + "'");
    out.first.push_back(it->second);
    out.second.push_back(g);
  }
  if (preds.size() != golds.size()) throw ValidationError(pred_path + ": contains ids missing from " + gold_path);
  return out;
}

struct EvaluateArgs {
  std::string pred, gold, report;
  std::vector<std::pair<std::string, std::string>> pairs;
  int positive = 1;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream&) {
  if (a.positive != 0 && a.positive != 1) throw UsageError("--positive-label must be 0 or 1");
  std::vector<std::pair<std::string, std::string>> files{{a.pred, a.gold}};
  files.insert(files.end(), a.pairs.begin(), a.pairs.end());
  std::vector<std::pair<Labels, Labels>> pooled;
  json report;
  json per = json::array();
  for (const auto& [p, g] : files) {
    pooled.push_back(join(p, g));
    auto m = metric_json(evalkit::f1_score(pooled.back().first, pooled.back().second, a.positive));
    json entry;
    entry["question_id"] = fs::path(g).stem().string();
    entry["pred"] = p;
    entry["gold"] = g;
    for (const auto& [k, v] : m.items()) entry[k] = v;
    per.push_back(std::move(entry));
  }
  report["questions"] = std::move(per);
  if (pooled.size() >= 2) {
    const auto combined = evalkit::combined_f1(pooled, a.positive);
    report["combined"] = metric_json(combined);
    report["combined_f1"] = combined.f1;
  }
  const auto text = report.dump(2) + "\n";
  if (!a.report.empty()) io::write_file_atomic(a.report, text);
  out << text;
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"asag: automatic short answer scoring with a stacked MLP + GBDT classifier"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  TuneArgs tune;
  auto* t = app.add_subcommand("tune", "Search hyperparameters, select on dev/test and write models and a report");
  t->add_option("--train", tune.train, "Training CSV (id,response,label); repeat once per question")->required();
  t->add_option("--dev", tune.dev, "Dev CSV; one per --train")->required();
  t->add_option("--test", tune.test, "Test CSV; one per --train")->required();
  t->add_option("--question", tune.questions, "Question id per --train (default: train file stem)");
  t->add_option("--embeddings", tune.common.embeddings, "Word-vector text file ('count dim' header)");
  t->add_option("--trials", tune.trials, "Number of search trials (default 200)");
  t->add_option("--parallelism", tune.parallelism, "Trials evaluated concurrently (1 = reproducible sequential mode)");
  t->add_option("--k", tune.k, "Cross-validation folds (default 5)");
  t->add_option("--dev-budget", tune.dev_budget, "Models scored on dev (default 20)");
  t->add_option("--test-budget", tune.test_budget, "Models scored on test (default 5)");
  t->add_option("--out", tune.out_dir, "Output directory for models, histories and manifest")->required();
  t->add_option("--report", tune.report, "Report path (default <out>/report.json)");
  tune.common.add_to(*t);

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "Fit one model with fixed hyperparameters");
  tr->add_option("--train", train.train, "Training CSV (id,response,label)")->required();
  tr->add_option("--embeddings", train.common.embeddings, "Word-vector text file");
  tr->add_option("--hp", train.hp, "JSON file of hyperparameters");
  tr->add_option("--question", train.question, "Question id (default: train file stem)");
  tr->add_option("--out", train.out, "Model file to write")->required();
  train.common.add_to(*tr);

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "Score responses with a trained model");
  p->add_option("--model", predict.model, "Model file")->required();
  p->add_option("--input", predict.input, "CSV with id,response (a label column is ignored)")->required();
  p->add_option("--out", predict.out, "Prediction CSV to write (id,label,p_correct)")->required();
  p->add_option("--embeddings", predict.embeddings, "Word-vector file (default: path recorded in the model)");

  EvaluateArgs evaluate;
  auto* e = app.add_subcommand("evaluate", "F1 of predictions against gold labels, pooled across pairs");
  e->add_option("--pred", evaluate.pred, "Prediction CSV (id,label,...)")->required();
  e->add_option("--gold", evaluate.gold, "Gold CSV (id,...,label)")->required();
  e->add_option("--pair", evaluate.pairs, "Extra PRED GOLD pair for combined F1; repeatable");
  e->add_option("--positive-label", evaluate.positive, "Label treated as positive (default 1)");
  e->add_option("--report", evaluate.report, "Also write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int rc = app.exit(ex, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*t) return cmd_tune(tune, out, err);
    if (*tr) return cmd_train(train, out, err);
    if (*p) return cmd_predict(predict, out, err);
    if (*e) return cmd_evaluate(evaluate, out, err);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace asag::cli
