#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "asag/types.hpp"

namespace asag::balance {

struct BalanceConfig {
  double synth_fraction = 0.10;  // synthetic rows as a fraction of all rows
  int k_neighbors = 5;
  std::uint64_t seed = 0;
};

/// a + u * (b - a), componentwise. Throws ShapeError on length mismatch.
std::vector<double> smote_interpolate(std::span<const double> a, std::span<const double> b, double u);

/// Where one synthetic row came from.
struct SyntheticOrigin {
  std::size_t base = 0;      // row index of the minority sample
  std::size_t neighbor = 0;  // row index of the chosen neighbour
  double u = 0.0;
};

struct Balanced {
  Matrix X;
  Labels y;
  int minority_label = 0;
  std::vector<SyntheticOrigin> origins;  // one per appended row
};

/// Number of rows SMOTE appends: round-half-up of synth_fraction * n.
std::size_t synthetic_count(std::size_t n, double synth_fraction);

/// The k nearest rows among `candidates` to row `target` by Euclidean
/// distance, excluding the target itself; ties go to the lower index.
std::vector<std::size_t> nearest_neighbors(const Matrix& X, std::size_t target,
                                           std::span<const std::size_t> candidates, int k);

/// SMOTE: appends synthetic_count(|y|, synth_fraction) rows of the rarer
/// label (ties: label 1 is treated as the minority). Original rows are kept
/// unchanged and in order. Throws ValidationError for single-class input or
/// a minority with fewer than two rows.
Balanced balance_dataset(const Matrix& X, const Labels& y, const BalanceConfig& cfg);

}  // namespace asag::balance
