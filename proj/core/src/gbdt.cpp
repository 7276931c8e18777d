#include "asag/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "asag/error.hpp"
#include "asag/rng.hpp"

namespace asag::gbdt {

namespace {

double sigmoid(double m) {
  return m >= 0.0 ? 1.0 / (1.0 + std::exp(-m)) : std::exp(m) / (1.0 + std::exp(m));
}

// Threshold between two consecutive distinct values a < b, kept in [a, b)
// so that `x <= threshold` separates them.
double midpoint(double a, double b) {
  const double mid = a + (b - a) / 2.0;
  return mid < b ? mid : a;
}

struct NodeStats {
  double G = 0.0;
  double H = 0.0;
};

// Scans one node's rows for one feature. `sorted` holds the node's rows in
// ascending (x[feature], row) order. A gain must beat `best` by more than a
// relative 1e-12 to replace it: the same partition reached through another
// feature differs only by rounding in the prefix sums, and the earlier
// (feature, threshold) wins when callers visit features in ascending order.
void scan_feature(std::span<const std::size_t> sorted, int feature, const Matrix& X,
                  std::span<const double> g, std::span<const double> h, NodeStats node,
                  double lambda, Split& best) {
  double gl = 0.0, hl = 0.0;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const std::size_t r = sorted[i];
    gl += g[r];
    hl += h[r];
    const double a = X(static_cast<Eigen::Index>(r), feature);
    const double b = X(static_cast<Eigen::Index>(sorted[i + 1]), feature);
    if (!(a < b)) continue;
    const double gain = split_gain(gl, hl, node.G - gl, node.H - hl, lambda);
    if (gain > best.gain + 1e-12 * std::max(1.0, std::abs(best.gain))) best = Split{feature, midpoint(a, b), gain};
  }
}

NodeStats sum_stats(std::span<const std::size_t> rows_by_index, std::span<const double> g,
                    std::span<const double> h) {
  NodeStats s;
  for (auto r : rows_by_index) {
    s.G += g[r];
    s.H += h[r];
  }
  return s;
}

void sort_by_feature(std::vector<std::size_t>& rows, const Matrix& X, int f) {
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    const double xa = X(static_cast<Eigen::Index>(a), f), xb = X(static_cast<Eigen::Index>(b), f);
    return xa != xb ? xa < xb : a < b;
  });
}

// Level-wise exact greedy tree growth. For every feature the sampled rows
// are kept sorted by (value, row) and grouped into contiguous node segments;
// a split stably partitions each segment, so sorted order survives.
Tree grow_tree(const Matrix& X, std::span<const std::size_t> sample, std::span<const double> g,
               std::span<const double> h, int max_depth, double lambda) {
  const int d = static_cast<int>(X.cols());
  std::vector<std::vector<std::size_t>> order(static_cast<std::size_t>(d));
  for (int f = 0; f < d; ++f) {
    order[static_cast<std::size_t>(f)].assign(sample.begin(), sample.end());
    sort_by_feature(order[static_cast<std::size_t>(f)], X, f);
  }
  std::vector<std::size_t> by_index(sample.begin(), sample.end());

  struct Segment {
    int node;
    std::size_t begin, end;
  };
  Tree tree;
  tree.nodes.emplace_back();
  std::vector<Segment> level{{0, 0, by_index.size()}};
  std::vector<std::size_t> scratch;

  for (int depth = 0; !level.empty(); ++depth) {
    std::vector<Segment> next;
    for (const auto& seg : level) {
      std::span<const std::size_t> rows(by_index.data() + seg.begin, seg.end - seg.begin);
      const NodeStats stats = sum_stats(rows, g, h);
      auto& leaf = tree.nodes[static_cast<std::size_t>(seg.node)];
      leaf.value = -stats.G / (stats.H + lambda);
      if (depth >= max_depth || rows.size() < 2) continue;

      Split best;
      for (int f = 0; f < d; ++f)
        scan_feature({order[static_cast<std::size_t>(f)].data() + seg.begin, rows.size()}, f, X, g, h,
                     stats, lambda, best);
      if (!(best.gain > 0.0)) continue;

      auto goes_left = [&](std::size_t r) {
        return X(static_cast<Eigen::Index>(r), best.feature) <= best.threshold;
      };
      auto partition = [&](std::vector<std::size_t>& v) {
        const auto first = v.begin() + static_cast<std::ptrdiff_t>(seg.begin);
        const auto last = v.begin() + static_cast<std::ptrdiff_t>(seg.end);
        return static_cast<std::size_t>(std::stable_partition(first, last, goes_left) - first);
      };
      const std::size_t n_left = partition(by_index);
      for (auto& o : order) partition(o);

      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[static_cast<std::size_t>(seg.node)];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = left;
      node.right = left + 1;
      node.value = 0.0;
      next.push_back({left, seg.begin, seg.begin + n_left});
      next.push_back({left + 1, seg.begin + n_left, seg.end});
    }
    level = std::move(next);
  }
  return tree;
}

}  // namespace

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf())
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold
                                     ? nodes[i].left
                                     : nodes[i].right);
  return nodes[i].value;
}

int Tree::depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, depth[i]);
    if (!nodes[i].is_leaf()) {
      depth[static_cast<std::size_t>(nodes[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes[i].right)] = depth[i] + 1;
    }
  }
  return best;
}

double GbdtModel::margin(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(x);
  return base_score + learning_rate * sum;
}

double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda) {
  const double G = g_left + g_right, H = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                G * G / (H + lambda));
}

std::optional<Split> best_split(std::span<const std::size_t> rows, const Matrix& X,
                                std::span<const double> g, std::span<const double> h, double lambda) {
  if (rows.size() < 2) return std::nullopt;
  std::vector<std::size_t> by_index(rows.begin(), rows.end());
  std::sort(by_index.begin(), by_index.end());
  const NodeStats stats = sum_stats(by_index, g, h);
  Split best;
  std::vector<std::size_t> sorted;
  for (int f = 0; f < static_cast<int>(X.cols()); ++f) {
    sorted = by_index;
    sort_by_feature(sorted, X, f);
    scan_feature(sorted, f, X, g, h, stats, lambda, best);
  }
  if (!(best.gain > 0.0)) return std::nullopt;
  return best;
}

double logloss(std::span<const double> p1, const Labels& y) {
  constexpr double kEps = 1e-15;
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p = std::clamp(p1[i], kEps, 1.0 - kEps);
    total -= y[i] ? std::log(p) : std::log(1.0 - p);
  }
  return total / static_cast<double>(y.size());
}

GbdtModel train_gbdt(const Matrix& X, const Labels& y, const GbdtParams& params,
                     std::vector<double>* logloss_trace) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (n != y.size()) throw ShapeError("train_gbdt: X rows != |y|");
  if (n == 0) throw ShapeError("train_gbdt: empty training set");
  if (params.n_estimators < 1) throw ConfigError("n_estimators must be at least 1");
  if (!(params.subsample > 0.0 && params.subsample <= 1.0)) throw ConfigError("subsample must lie in (0,1]");
  if (!(params.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (params.max_depth < 0) throw ConfigError("max_depth must be non-negative");
  if (!(params.lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!X.allFinite()) throw ValidationError("non-finite value in GBDT input");

  GbdtModel model;
  model.learning_rate = params.learning_rate;
  model.max_depth = params.max_depth;
  model.lambda = params.lambda;
  model.subsample = params.subsample;
  model.n_features = static_cast<int>(X.cols());

  std::size_t positives = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw ValidationError("GBDT labels must be 0 or 1");
    positives += static_cast<std::size_t>(v);
  }
  const double mean = static_cast<double>(positives) / static_cast<double>(n);
  model.base_score = std::clamp(std::log(mean / (1.0 - mean)), -10.0, 10.0);
  model.single_class = positives == 0 || positives == n;

  std::vector<double> margins(n, model.base_score), p(n), g(n), h(n);
  auto refresh = [&] {
    for (std::size_t i = 0; i < n; ++i) p[i] = sigmoid(margins[i]);
  };
  refresh();
  if (logloss_trace) logloss_trace->push_back(logloss(p, y));

  const std::size_t n_sample = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(params.subsample * static_cast<double>(n) + 0.5)), 1, n);
  Rng rng(params.seed);
  std::vector<std::size_t> perm(n);

  for (int round = 0; round < params.n_estimators; ++round) {
    if (model.single_class) {
      model.trees.push_back(Tree{{TreeNode{}}});
      if (logloss_trace) logloss_trace->push_back(logloss(p, y));
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = p[i] - y[i];
      h[i] = p[i] * (1.0 - p[i]);
    }
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    if (n_sample < n)
      for (std::size_t i = 0; i < n_sample; ++i) std::swap(perm[i], perm[i + rng.below(n - i)]);
    std::vector<std::size_t> sample(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_sample));
    std::sort(sample.begin(), sample.end());

    Tree tree = grow_tree(X, sample, g, h, params.max_depth, params.lambda);
    for (std::size_t i = 0; i < n; ++i)
      margins[i] += params.learning_rate *
                    tree.predict({X.row(static_cast<Eigen::Index>(i)).data(), static_cast<std::size_t>(X.cols())});
    model.trees.push_back(std::move(tree));
    refresh();
    if (logloss_trace) logloss_trace->push_back(logloss(p, y));
  }
  return model;
}

Matrix predict_proba(const GbdtModel& model, const Matrix& X) {
  if (X.cols() != model.n_features)
    throw ShapeError("input has " + std::to_string(X.cols()) + " features, GBDT expects " +
                     std::to_string(model.n_features));
  Matrix P(X.rows(), 2);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double p1 = sigmoid(model.margin({X.row(i).data(), static_cast<std::size_t>(X.cols())}));
    P(i, 0) = 1.0 - p1;
    P(i, 1) = p1;
  }
  return P;
}

}  // namespace asag::gbdt
