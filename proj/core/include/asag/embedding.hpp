#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "asag/types.hpp"

namespace asag::embedding {

/// Pretrained word vectors, immutable after load.
class VectorStore {
 public:
  explicit VectorStore(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }

  /// Adds a vector; returns false (and keeps the old one) for a duplicate.
  bool insert(std::string token, std::span<const double> values);

  /// Null when the token is absent.
  const double* find(std::string_view token) const;

  /// Messages produced while loading (e.g. duplicate tokens).
  std::vector<std::string> warnings;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::size_t dim_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
  std::vector<double> data_;
};

/// Reads the plain-text vector format: a `vocab_count dim` header line,
/// then `token v1 ... v_dim` per line.
VectorStore load_vectors(const std::filesystem::path& path);

struct SentenceEmbedding {
  std::vector<double> values;
  std::size_t tokens_used = 0;  // N: in-store tokens with nonzero norm
  bool all_oov = false;         // N == 0, values are all zero
};

/// Mean of the L2-normalised vectors of the tokens found in the store.
SentenceEmbedding sentence_embedding(std::span<const std::string> tokens, const VectorStore& store);

enum class OovPolicy { skip };

struct FeaturizerConfig {
  std::size_t max_train_word_count = 1;
  OovPolicy oov_policy = OovPolicy::skip;
  std::size_t dim = 300;
};

/// dim + 1 values: the sentence embedding followed by the length feature.
struct FeatureVector {
  std::vector<double> values;
  bool all_oov = false;

  double length_feature() const { return values.back(); }
};

/// Throws ConfigError when cfg.dim != store.dim().
FeatureVector featurize(std::span<const std::string> tokens, const VectorStore& store,
                        const FeaturizerConfig& cfg);

/// One row per token sequence.
Matrix featurize_all(const std::vector<std::vector<std::string>>& docs, const VectorStore& store,
                     const FeaturizerConfig& cfg);

/// Largest token count in `docs` (at least 1); the length normaliser.
std::size_t max_word_count(const std::vector<std::vector<std::string>>& docs);

}  // namespace asag::embedding
