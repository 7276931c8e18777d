#include "asag/hyperparameters.hpp"

#include <algorithm>
#include <cmath>

#include "asag/error.hpp"

namespace asag {

std::string_view to_string(DimensionKind kind) {
  switch (kind) {
    case DimensionKind::int_step: return "int_step";
    case DimensionKind::float_step: return "float_step";
    case DimensionKind::categorical: return "categorical";
  }
  return "float_step";
}

std::size_t Dimension::count() const {
  return static_cast<std::size_t>(std::llround((high - low) / step)) + 1;
}

double Dimension::value_at(std::size_t j) const {
  return std::clamp(low + static_cast<double>(j) * step, low, high);
}

std::size_t Dimension::index_of(double x) const {
  const double j = std::round((x - low) / step);
  if (!(j > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(j), count() - 1);
}

bool Dimension::on_lattice(double v) const {
  if (v < low || v > high) return false;
  const double j = (v - low) / step;
  return std::abs(j - std::round(j)) <= 1e-9 * std::max(1.0, std::abs(j));
}

SearchSpace::SearchSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  for (const auto& d : dims_) {
    if (!(d.low <= d.high)) throw ConfigError("dimension " + d.name + ": low > high");
    if (!(d.step > 0.0)) throw ConfigError("dimension " + d.name + ": step must be positive");
  }
}

std::size_t SearchSpace::index(std::string_view name) const {
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (dims_[i].name == name) return i;
  throw ConfigError("unknown search dimension '" + std::string(name) + "'");
}

void SearchSpace::override_dimension(std::string_view name, double low, double high, double step) {
  auto& d = dims_[index(name)];
  if (!(low <= high)) throw ConfigError("override for " + d.name + ": low > high");
  if (step < 0.0) throw ConfigError("override for " + d.name + ": negative step");
  d.low = low;
  d.high = high;
  if (step > 0.0) d.step = step;
}

bool SearchSpace::contains(const std::vector<double>& values) const {
  if (values.size() != dims_.size()) return false;
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (!dims_[i].on_lattice(values[i])) return false;
  return true;
}

SearchSpace default_space() {
  using K = DimensionKind;
  return SearchSpace({
      {"base_neurons", K::int_step, 50, 750, 10},
      {"base_lr", K::float_step, 2e-5, 0.1, 1e-5},
      {"base_iters", K::int_step, 10, 1000, 10},
      {"gbdt_estimators", K::int_step, 50, 700, 2},
      {"gbdt_lr", K::float_step, 2e-5, 0.1, 2e-5},
      {"gbdt_subsample", K::float_step, 0.80, 1.00, 0.02},
      {"meta_layers", K::categorical, 0, 1, 1},
      {"meta_neurons", K::int_step, 10, 200, 2},
      {"meta_lr", K::float_step, 1e-5, 0.01, 1e-5},
      {"meta_iters", K::int_step, 10, 500, 10},
  });
}

std::vector<double> Hyperparameters::to_values() const {
  return {static_cast<double>(base_neurons), base_lr,     static_cast<double>(base_iters),
          static_cast<double>(gbdt_estimators), gbdt_lr, gbdt_subsample,
          static_cast<double>(meta_layers), static_cast<double>(meta_neurons), meta_lr,
          static_cast<double>(meta_iters)};
}

Hyperparameters Hyperparameters::from_values(const std::vector<double>& v) {
  if (v.size() != 10) throw ConfigError("expected 10 hyperparameter values");
  auto as_int = [](double x) { return static_cast<int>(std::llround(x)); };
  Hyperparameters hp;
  hp.base_neurons = as_int(v[0]);
  hp.base_lr = v[1];
  hp.base_iters = as_int(v[2]);
  hp.gbdt_estimators = as_int(v[3]);
  hp.gbdt_lr = v[4];
  hp.gbdt_subsample = v[5];
  hp.meta_layers = as_int(v[6]);
  hp.meta_neurons = as_int(v[7]);
  hp.meta_lr = v[8];
  hp.meta_iters = as_int(v[9]);
  return hp;
}

void validate(const Hyperparameters& hp) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid hyperparameter: ") + what);
  };
  require(hp.base_neurons >= 1, "base_neurons >= 1");
  require(hp.base_lr > 0.0, "base_lr > 0");
  require(hp.base_iters >= 1, "base_iters >= 1");
  require(hp.gbdt_estimators >= 1, "gbdt_estimators >= 1");
  require(hp.gbdt_lr > 0.0, "gbdt_lr > 0");
  require(hp.gbdt_subsample > 0.0 && hp.gbdt_subsample <= 1.0, "gbdt_subsample in (0,1]");
  require(hp.meta_layers == 0 || hp.meta_layers == 1, "meta_layers in {0,1}");
  require(hp.meta_neurons >= 1, "meta_neurons >= 1");
  require(hp.meta_lr > 0.0, "meta_lr > 0");
  require(hp.meta_iters >= 1, "meta_iters >= 1");
}

}  // namespace asag
