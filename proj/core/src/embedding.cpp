#include "asag/embedding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "asag/error.hpp"

namespace asag::embedding {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

VectorStore::VectorStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ConfigError("vector dimension must be positive");
}

bool VectorStore::insert(std::string token, std::span<const double> values) {
  if (values.size() != dim_) throw ShapeError("vector length does not match store dimension");
  const auto [it, inserted] = index_.try_emplace(std::move(token), data_.size() / dim_);
  if (!inserted) return false;
  data_.insert(data_.end(), values.begin(), values.end());
  return true;
}

const double* VectorStore::find(std::string_view token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? nullptr : data_.data() + it->second * dim_;
}

VectorStore load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vector file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty vector file", 1);
  const auto header = split_ws(line);
  std::size_t count = 0, dim = 0;
  if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], dim) || dim == 0)
    throw ParseError("header must be 'vocab_count dim'", 1);

  VectorStore store(dim);
  std::vector<double> values(dim);
  std::size_t lineno = 1, rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto parts = split_ws(line);
    if (parts.empty()) continue;
    if (parts.size() != dim + 1)
      throw ParseError("expected token and " + std::to_string(dim) + " values, found " +
                           std::to_string(parts.size() - 1) + " values",
                       lineno);
    for (std::size_t d = 0; d < dim; ++d) {
      if (!parse_number(parts[d + 1], values[d]) || !std::isfinite(values[d]))
        throw ParseError("invalid or non-finite value '" + std::string(parts[d + 1]) + "'", lineno);
    }
    ++rows;
    if (!store.insert(std::string(parts[0]), values))
      store.warnings.push_back("duplicate token '" + std::string(parts[0]) + "' at line " +
                               std::to_string(lineno) + " ignored");
  }
  if (rows != count)
    store.warnings.push_back("header declares " + std::to_string(count) + " vectors, file has " +
                             std::to_string(rows));
  return store;
}

SentenceEmbedding sentence_embedding(std::span<const std::string> tokens, const VectorStore& store) {
  const std::size_t dim = store.dim();
  SentenceEmbedding out;
  out.values.assign(dim, 0.0);
  for (const auto& tok : tokens) {
    const double* w = store.find(tok);
    if (!w) continue;
    double sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) sq += w[d] * w[d];
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0)) continue;
    for (std::size_t d = 0; d < dim; ++d) out.values[d] += w[d] / norm;
    ++out.tokens_used;
  }
  if (out.tokens_used == 0) {
    out.all_oov = true;
    return out;
  }
  const double n = static_cast<double>(out.tokens_used);
  for (auto& v : out.values) v /= n;
  return out;
}

FeatureVector featurize(std::span<const std::string> tokens, const VectorStore& store,
                        const FeaturizerConfig& cfg) {
  if (cfg.dim != store.dim())
    throw ConfigError("featurizer dim " + std::to_string(cfg.dim) + " does not match vector store dim " +
                      std::to_string(store.dim()));
  if (cfg.max_train_word_count < 1) throw ConfigError("max_train_word_count must be at least 1");
  auto emb = sentence_embedding(tokens, store);
  FeatureVector fv;
  fv.all_oov = emb.all_oov;
  fv.values = std::move(emb.values);
  fv.values.push_back(std::min(1.0, static_cast<double>(tokens.size()) /
                                        static_cast<double>(cfg.max_train_word_count)));
  return fv;
}

Matrix featurize_all(const std::vector<std::vector<std::string>>& docs, const VectorStore& store,
                     const FeaturizerConfig& cfg) {
  Matrix X(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(cfg.dim + 1));
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto fv = featurize(docs[i], store, cfg);
    X.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(fv.values.data(), static_cast<Eigen::Index>(fv.values.size()));
  }
  return X;
}

std::size_t max_word_count(const std::vector<std::vector<std::string>>& docs) {
  std::size_t m = 1;
  for (const auto& d : docs) m = std::max(m, d.size());
  return m;
}

}  // namespace asag::embedding
