#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "asag/pipeline.hpp"

namespace asag {

/// Persisted per-question model: hyperparameters, preprocessing state and
/// all trained weights, as a versioned JSON document. Vectors are not
/// stored; the embedding file is identified by path and SHA-256 digest.
struct ModelFile {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  std::string question_id;
  std::uint64_t seed = 0;
  std::string embedding_path;
  std::string embedding_digest;
  Scorer scorer;
};

std::string to_json(const ModelFile& model);
/// Throws ParseError on malformed documents or an unsupported version.
ModelFile model_from_json(const std::string& text);

void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

/// Empty when `embedding_path` hashes to the stored digest, otherwise a
/// warning message.
std::string check_embedding_digest(const ModelFile& model, const std::filesystem::path& embedding_path);

}  // namespace asag
