#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace asag {

enum class DimensionKind { int_step, float_step, categorical };

std::string_view to_string(DimensionKind kind);

/// One axis of the search space: values low + j * step for j = 0..count()-1.
struct Dimension {
  std::string name;
  DimensionKind kind = DimensionKind::float_step;
  double low = 0.0;
  double high = 0.0;
  double step = 1.0;

  /// Number of lattice points.
  std::size_t count() const;
  /// Lattice value j, clamped to [low, high].
  double value_at(std::size_t j) const;
  /// Nearest lattice index to x (clamped into range).
  std::size_t index_of(double x) const;
  double snap(double x) const { return value_at(index_of(x)); }
  /// True when v lies in [low, high] and within 1e-9 steps of the lattice.
  bool on_lattice(double v) const;
};

class SearchSpace {
 public:
  SearchSpace() = default;
  explicit SearchSpace(std::vector<Dimension> dims);

  const std::vector<Dimension>& dimensions() const { return dims_; }
  std::size_t size() const { return dims_.size(); }
  const Dimension& operator[](std::size_t i) const { return dims_[i]; }

  /// Index of a named dimension; throws ConfigError when absent.
  std::size_t index(std::string_view name) const;

  /// Replaces the bounds (and optionally the step) of one dimension.
  void override_dimension(std::string_view name, double low, double high, double step = 0.0);

  bool contains(const std::vector<double>& values) const;

 private:
  std::vector<Dimension> dims_;
};

/// The ten-dimensional stacking search space.
SearchSpace default_space();

/// One point of the default space, by name.
struct Hyperparameters {
  int base_neurons = 100;
  double base_lr = 1e-3;
  int base_iters = 200;
  int gbdt_estimators = 100;
  double gbdt_lr = 0.1;
  double gbdt_subsample = 1.0;
  int meta_layers = 0;
  int meta_neurons = 10;
  double meta_lr = 1e-3;
  int meta_iters = 100;

  /// Values in default_space() order.
  std::vector<double> to_values() const;
  /// Inverse of to_values(); throws ConfigError on the wrong length.
  static Hyperparameters from_values(const std::vector<double>& values);

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/// Throws ConfigError when a field is outside the ranges the models accept.
void validate(const Hyperparameters& hp);

}  // namespace asag
