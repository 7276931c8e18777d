#include "asag/model_file.hpp"

#include <json.hpp>

#include "asag/error.hpp"
#include "asag/io.hpp"

namespace asag {

namespace {

using json = nlohmann::ordered_json;

json mlp_to_json(const nnet::MlpModel& m) {
  json j;
  j["layer_sizes"] = m.layer_sizes();
  j["params"] = std::vector<double>(m.params().begin(), m.params().end());
  return j;
}

nnet::MlpModel mlp_from_json(const json& j) {
  const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
  if (sizes.empty()) return {};
  nnet::MlpModel m(sizes);
  const auto params = j.at("params").get<std::vector<double>>();
  if (params.size() != m.params().size()) throw ParseError("MLP parameter count does not match layer sizes", 0);
  std::copy(params.begin(), params.end(), m.params().begin());
  return m;
}

json gbdt_to_json(const gbdt::GbdtModel& m) {
  json j;
  j["base_score"] = m.base_score;
  j["learning_rate"] = m.learning_rate;
  j["max_depth"] = m.max_depth;
  j["lambda"] = m.lambda;
  j["subsample"] = m.subsample;
  j["n_features"] = m.n_features;
  j["single_class"] = m.single_class;
  json trees = json::array();
  for (const auto& t : m.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes) nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j;
}

gbdt::GbdtModel gbdt_from_json(const json& j) {
  gbdt::GbdtModel m;
  m.base_score = j.at("base_score").get<double>();
  m.learning_rate = j.at("learning_rate").get<double>();
  m.max_depth = j.at("max_depth").get<int>();
  m.lambda = j.at("lambda").get<double>();
  m.subsample = j.at("subsample").get<double>();
  m.n_features = j.at("n_features").get<int>();
  m.single_class = j.at("single_class").get<bool>();
  for (const auto& jt : j.at("trees")) {
    gbdt::Tree t;
    for (const auto& jn : jt) {
      gbdt::TreeNode n;
      n.feature = jn.at(0).get<int>();
      n.threshold = jn.at(1).get<double>();
      n.left = jn.at(2).get<int>();
      n.right = jn.at(3).get<int>();
      n.value = jn.at(4).get<double>();
      t.nodes.push_back(n);
    }
    const auto size = static_cast<int>(t.nodes.size());
    for (const auto& n : t.nodes)
      if (!n.is_leaf() && (n.feature >= m.n_features || n.left <= 0 || n.right <= 0 || n.left >= size ||
                           n.right >= size))
        throw ParseError("GBDT tree node out of range", 0);
    if (t.nodes.empty()) throw ParseError("empty GBDT tree", 0);
    m.trees.push_back(std::move(t));
  }
  return m;
}

json hp_to_json(const Hyperparameters& hp) {
  const auto space = default_space();
  const auto values = hp.to_values();
  json j;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space[i].kind == DimensionKind::float_step) j[space[i].name] = values[i];
    else j[space[i].name] = static_cast<long long>(std::llround(values[i]));
  }
  return j;
}

Hyperparameters hp_from_json(const json& j) {
  const auto space = default_space();
  std::vector<double> values;
  for (const auto& d : space.dimensions()) values.push_back(j.at(d.name).get<double>());
  return Hyperparameters::from_values(values);
}

}  // namespace

std::string to_json(const ModelFile& model) {
  const auto& sc = model.scorer;
  json j;
  j["format_version"] = model.format_version;
  j["question_id"] = model.question_id;
  j["seed"] = model.seed;
  j["model_kind"] = std::string(stack::to_string(sc.model.kind));
  j["hyperparameters"] = hp_to_json(sc.model.hp);

  json pre;
  pre["strip_punctuation"] = sc.preprocess.strip_punctuation;
  json lex = json::object();
  for (const auto& [k, v] : sc.lexicon) lex[k] = v;
  pre["lexicon"] = std::move(lex);
  pre["stoplist_mode"] = std::string(corpus::to_string(sc.stoplist.policy.mode));
  pre["stoplist_threshold"] = sc.stoplist.policy.threshold;
  pre["stoplist"] = std::vector<std::string>(sc.stoplist.removed_tokens.begin(), sc.stoplist.removed_tokens.end());
  j["preprocess"] = std::move(pre);

  json feat;
  feat["dim"] = sc.model.featurizer.dim;
  feat["max_train_word_count"] = sc.model.featurizer.max_train_word_count;
  feat["oov_policy"] = "skip";
  feat["embedding_path"] = model.embedding_path;
  feat["embedding_sha256"] = model.embedding_digest;
  j["featurizer"] = std::move(feat);

  j["base_mlp"] = mlp_to_json(sc.model.base_mlp);
  j["base_gbdt"] = gbdt_to_json(sc.model.base_gbdt);
  j["meta_mlp"] = mlp_to_json(sc.model.meta);
  return j.dump(1) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what(), 0);
  }
  try {
    ModelFile m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != ModelFile::kFormatVersion)
      throw ParseError("unsupported model format_version " + std::to_string(m.format_version), 0);
    m.question_id = j.at("question_id").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    auto& sc = m.scorer;
    sc.model.kind = stack::model_kind_from_string(j.at("model_kind").get<std::string>());
    sc.model.hp = hp_from_json(j.at("hyperparameters"));

    const auto& pre = j.at("preprocess");
    sc.preprocess.strip_punctuation = pre.at("strip_punctuation").get<bool>();
    for (const auto& [k, v] : pre.at("lexicon").items()) sc.lexicon.emplace(k, v.get<std::string>());
    sc.stoplist.policy.mode = corpus::stop_mode_from_string(pre.at("stoplist_mode").get<std::string>());
    sc.stoplist.policy.threshold = pre.at("stoplist_threshold").get<double>();
    for (const auto& tok : pre.at("stoplist")) sc.stoplist.removed_tokens.insert(tok.get<std::string>());

    const auto& feat = j.at("featurizer");
    sc.model.featurizer.dim = feat.at("dim").get<std::size_t>();
    sc.model.featurizer.max_train_word_count = feat.at("max_train_word_count").get<std::size_t>();
    m.embedding_path = feat.at("embedding_path").get<std::string>();
    m.embedding_digest = feat.at("embedding_sha256").get<std::string>();

    sc.model.base_mlp = mlp_from_json(j.at("base_mlp"));
    sc.model.base_gbdt = gbdt_from_json(j.at("base_gbdt"));
    sc.model.meta = mlp_from_json(j.at("meta_mlp"));
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what(), 0);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("malformed model file: ") + e.what(), 0);
  }
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, to_json(model));
}

ModelFile load_model(const std::filesystem::path& path) { return model_from_json(io::read_file(path)); }

std::string check_embedding_digest(const ModelFile& model, const std::filesystem::path& embedding_path) {
  const auto digest = io::sha256_file(embedding_path);
  if (digest == model.embedding_digest) return {};
  return "embedding file " + embedding_path.string() + " (sha256 " + digest +
         ") differs from the one the model was trained with (sha256 " + model.embedding_digest + ")";
}

}  // namespace asag
