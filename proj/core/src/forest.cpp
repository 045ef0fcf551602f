#include "flowgraph/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flowgraph/error.hpp"
#include "flowgraph/rng.hpp"

namespace flowgraph {

double RegressionTree::predict(std::span<const double> row) const {
  int node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& n = nodes[node];
    node = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[node].value;
}

int RegressionTree::depth() const {
  // nodes are appended parent-first, so depths can be propagated in order
  std::vector<int> depth_of(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, depth_of[i]);
    if (!nodes[i].is_leaf()) {
      depth_of[static_cast<std::size_t>(nodes[i].left)] = depth_of[i] + 1;
      depth_of[static_cast<std::size_t>(nodes[i].right)] = depth_of[i] + 1;
    }
  }
  return deepest;
}

namespace {

struct TreeBuilder {
  const std::vector<std::vector<double>>& x;
  const std::vector<double>& y;
  const ForestConfig& config;
  std::size_t n_features;
  std::size_t mtry;
  Rng rng;
  std::vector<TreeNode> nodes;

  double node_mean(const std::vector<std::size_t>& idx) const {
    double sum = 0.0;
    for (std::size_t i : idx) sum += y[i];
    return sum / static_cast<double>(idx.size());
  }

  int make_leaf(const std::vector<std::size_t>& idx) {
    TreeNode leaf;
    leaf.value = node_mean(idx);
    leaf.count = idx.size();
    nodes.push_back(leaf);
    return static_cast<int>(nodes.size() - 1);
  }

  struct BestSplit {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double sse_reduction = 0.0;
  };

  // Greedy scan over a random feature subset; a split is accepted only when
  // it strictly reduces the summed squared error.
  BestSplit find_split(const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> features(n_features);
    std::iota(features.begin(), features.end(), 0);
    // Partial Fisher-Yates: first mtry entries form the candidate subset.
    for (std::size_t i = 0; i < mtry; ++i) {
      const std::size_t j = i + rng.uniform_index(n_features - i);
      std::swap(features[i], features[j]);
    }
    std::sort(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(mtry));

    const double n = static_cast<double>(idx.size());
    double sum_total = 0.0;
    for (std::size_t i : idx) sum_total += y[i];

    BestSplit best;
    std::vector<std::pair<double, double>> points(idx.size());  // (feature value, target)
    for (std::size_t f_pos = 0; f_pos < mtry; ++f_pos) {
      const std::size_t f = features[f_pos];
      for (std::size_t k = 0; k < idx.size(); ++k) {
        points[k] = {x[idx[k]][f], y[idx[k]]};
      }
      std::sort(points.begin(), points.end());
      double sum_left = 0.0;
      for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        sum_left += points[k].second;
        if (points[k].first == points[k + 1].first) continue;
        const double n_left = static_cast<double>(k + 1);
        const double n_right = n - n_left;
        const double sum_right = sum_total - sum_left;
        // SSE reduction = between-group sum of squares
        const double diff = sum_left / n_left - sum_right / n_right;
        const double reduction = n_left * n_right / n * diff * diff;
        if (reduction > best.sse_reduction) {
          best.found = true;
          best.feature = f;
          best.threshold = 0.5 * (points[k].first + points[k + 1].first);
          best.sse_reduction = reduction;
        }
      }
    }
    return best;
  }

  int build(std::vector<std::size_t> idx, int depth) {
    const bool depth_capped = config.max_depth > 0 && depth >= config.max_depth;
    if (depth_capped || idx.size() < config.min_samples_split) return make_leaf(idx);

    const BestSplit split = find_split(idx);
    if (!split.found) return make_leaf(idx);

    std::vector<std::size_t> left_idx, right_idx;
    left_idx.reserve(idx.size());
    right_idx.reserve(idx.size());
    for (std::size_t i : idx) {
      (x[i][split.feature] <= split.threshold ? left_idx : right_idx).push_back(i);
    }

    TreeNode node;
    node.feature = static_cast<int>(split.feature);
    node.threshold = split.threshold;
    node.value = node_mean(idx);
    node.count = idx.size();
    nodes.push_back(node);
    const int self = static_cast<int>(nodes.size() - 1);
    idx.clear();
    idx.shrink_to_fit();
    nodes[static_cast<std::size_t>(self)].left = build(std::move(left_idx), depth + 1);
    nodes[static_cast<std::size_t>(self)].right = build(std::move(right_idx), depth + 1);
    return self;
  }
};

}  // namespace

Forest Forest::fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                   const ForestConfig& config, std::uint64_t seed) {
  if (x.empty() || x.size() != y.size()) {
    throw DataError("forest fit needs matching non-empty features and targets");
  }
  const std::size_t n_features = x.front().size();
  for (const auto& row : x) {
    if (row.size() != n_features) throw DataError("ragged feature matrix in forest fit");
  }

  Forest forest;
  forest.config_ = config;
  forest.feature_count_ = n_features;

  const std::size_t mtry =
      config.max_features > 0
          ? std::min(config.max_features, n_features)
          : (n_features + 2) / 3;  // ceil(p / 3)

  for (std::size_t t = 0; t < config.n_estimators; ++t) {
    Rng tree_rng(derive_seed(seed, t));
    std::vector<std::size_t> idx(x.size());
    if (config.bootstrap) {
      for (auto& i : idx) i = tree_rng.uniform_index(x.size());
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    TreeBuilder builder{x, y, config, n_features, std::max<std::size_t>(1, mtry),
                        std::move(tree_rng), {}};
    builder.build(std::move(idx), 0);
    forest.trees_.push_back(RegressionTree{std::move(builder.nodes)});
  }
  return forest;
}

double Forest::predict(std::span<const double> row) const {
  if (row.size() != feature_count_) {
    throw DataError("prediction row length " + std::to_string(row.size()) +
                    " does not match training schema " + std::to_string(feature_count_));
  }
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict(row);
  return sum / static_cast<double>(trees_.size());
}

Forest Forest::from_parts(std::vector<RegressionTree> trees, ForestConfig config,
                          std::size_t feature_count) {
  Forest f;
  f.trees_ = std::move(trees);
  f.config_ = config;
  f.feature_count_ = feature_count;
  return f;
}

std::vector<double> pair_features_raw(std::span<const double> features_i,
                                      std::span<const double> features_j,
                                      double scaled_distance) {
  if (features_i.size() != features_j.size()) {
    throw DataError("pair feature vectors have mismatched schemas");
  }
  std::vector<double> row;
  row.reserve(features_i.size() * 2 + 1);
  row.insert(row.end(), features_i.begin(), features_i.end());
  row.insert(row.end(), features_j.begin(), features_j.end());
  row.push_back(scaled_distance);
  return row;
}

std::vector<double> pair_features_embed(const Eigen::VectorXd& embed_i,
                                        const Eigen::VectorXd& embed_j, double scaled_distance) {
  std::vector<double> row;
  row.reserve(static_cast<std::size_t>(embed_i.size() + embed_j.size()) + 1);
  row.insert(row.end(), embed_i.data(), embed_i.data() + embed_i.size());
  row.insert(row.end(), embed_j.data(), embed_j.data() + embed_j.size());
  row.push_back(scaled_distance);
  return row;
}

double predict_pair_symmetric(const Forest& forest, std::span<const double> features_i,
                              std::span<const double> features_j, double scaled_distance) {
  const auto row_ij = pair_features_raw(features_i, features_j, scaled_distance);
  const auto row_ji = pair_features_raw(features_j, features_i, scaled_distance);
  return 0.5 * (forest.predict(row_ij) + forest.predict(row_ji));
}

}  // namespace flowgraph
