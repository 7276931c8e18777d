#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "asag/evalkit.hpp"
#include "asag/hyperparameters.hpp"
#include "asag/pipeline.hpp"
#include "asag/tpe.hpp"

namespace asag::cli {

/// Run configuration, read from an optional JSON file and then overridden
/// by command-line flags.
struct PipelineConfig {
  std::optional<std::filesystem::path> lexicon_path;
  std::filesystem::path embeddings;
  std::optional<std::size_t> dim;  // checked against the vector file when set

  PipelineSettings settings;

  std::size_t n_trials = 200;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  tpe::TpeConfig tpe;
  SearchSpace space = default_space();

  int k_folds = 5;
  evalkit::SelectionBudget budget;

  std::optional<Hyperparameters> hyperparameters;  // fixed point for `train`
};

/// Parses the JSON config document; unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);

/// Range checks; throws ConfigError.
void validate(const PipelineConfig& cfg);

Hyperparameters load_hyperparameters(const std::filesystem::path& path);

}  // namespace asag::cli
