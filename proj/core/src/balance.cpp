#include "asag/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "asag/error.hpp"
#include "asag/rng.hpp"

namespace asag::balance {

std::vector<double> smote_interpolate(std::span<const double> a, std::span<const double> b, double u) {
  if (a.size() != b.size()) throw ShapeError("smote_interpolate: vectors differ in length");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + u * (b[i] - a[i]);
  return out;
}

std::size_t synthetic_count(std::size_t n, double synth_fraction) {
  return static_cast<std::size_t>(std::floor(synth_fraction * static_cast<double>(n) + 0.5));
}

std::vector<std::size_t> nearest_neighbors(const Matrix& X, std::size_t target,
                                           std::span<const std::size_t> candidates, int k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(candidates.size());
  const auto t = static_cast<Eigen::Index>(target);
  for (auto c : candidates) {
    if (c == target) continue;
    dist.emplace_back((X.row(static_cast<Eigen::Index>(c)) - X.row(t)).squaredNorm(), c);
  }
  const auto keep = std::min(dist.size(), static_cast<std::size_t>(std::max(k, 0)));
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(keep), dist.end());
  std::vector<std::size_t> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(dist[i].second);
  return out;
}

Balanced balance_dataset(const Matrix& X, const Labels& y, const BalanceConfig& cfg) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ShapeError("balance_dataset: X rows != |y|");
  if (!(cfg.synth_fraction >= 0.0 && cfg.synth_fraction <= 1.0))
    throw ConfigError("synth_fraction must lie in [0,1]");
  if (cfg.k_neighbors < 1) throw ConfigError("k_neighbors must be at least 1");

  std::vector<std::size_t> ones, zeros;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? ones : zeros).push_back(i);
  if (ones.empty() || zeros.empty()) throw ValidationError("SMOTE needs both classes present");

  Balanced out;
  out.minority_label = ones.size() <= zeros.size() ? 1 : 0;
  const auto& minority = out.minority_label ? ones : zeros;
  if (minority.size() < 2) throw ValidationError("SMOTE needs at least two minority rows");

  const std::size_t n_synth = synthetic_count(y.size(), cfg.synth_fraction);
  out.X.resize(X.rows() + static_cast<Eigen::Index>(n_synth), X.cols());
  out.X.topRows(X.rows()) = X;
  out.y = y;
  if (n_synth == 0) return out;

  std::vector<std::vector<std::size_t>> neighbors(minority.size());
  for (std::size_t m = 0; m < minority.size(); ++m)
    neighbors[m] = nearest_neighbors(X, minority[m], minority, cfg.k_neighbors);

  Rng rng(cfg.seed);
  for (std::size_t s = 0; s < n_synth; ++s) {
    const std::size_t m = rng.below(minority.size());
    const auto& nn = neighbors[m];
    const std::size_t neighbor = nn[rng.below(nn.size())];
    const double u = rng.uniform();
    const auto row = X.rows() + static_cast<Eigen::Index>(s);
    const auto base = static_cast<Eigen::Index>(minority[m]);
    out.X.row(row) = X.row(base) + u * (X.row(static_cast<Eigen::Index>(neighbor)) - X.row(base));
    out.y.push_back(out.minority_label);
    out.origins.push_back({minority[m], neighbor, u});
  }
  return out;
}

}  // namespace asag::balance
