#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace flowgraph {

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;      // leaf mean
  std::size_t count = 0;   // training samples reaching the node
  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(std::span<const double> row) const;
  int depth() const;  // edges on the longest root-to-leaf path
};

struct ForestConfig {
  std::size_t n_estimators = 30;
  int max_depth = 25;                 // <= 0 means unlimited
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;       // 0 means ceil(p / 3)
  bool bootstrap = true;
};

// CART variance-reduction regression forest. Per-tree randomness (bootstrap
// sample and per-split feature subsets) comes from seeds derived from the
// run seed, so fits are reproducible and trees are order-independent.
class Forest {
 public:
  static Forest fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                    const ForestConfig& config, std::uint64_t seed);

  double predict(std::span<const double> row) const;

  const std::vector<RegressionTree>& trees() const { return trees_; }
  const ForestConfig& config() const { return config_; }
  std::size_t feature_count() const { return feature_count_; }

  static Forest from_parts(std::vector<RegressionTree> trees, ForestConfig config,
                           std::size_t feature_count);

 private:
  std::vector<RegressionTree> trees_;
  ForestConfig config_;
  std::size_t feature_count_ = 0;
};

// concat(f_i, f_j, scaled distance); length 2F+1.
std::vector<double> pair_features_raw(std::span<const double> features_i,
                                      std::span<const double> features_j,
                                      double scaled_distance);

// concat(E_i, E_j, scaled distance); length 2D+1.
std::vector<double> pair_features_embed(const Eigen::VectorXd& embed_i,
                                        const Eigen::VectorXd& embed_j, double scaled_distance);

// Order-invariant pair prediction: mean of both feature orderings.
double predict_pair_symmetric(const Forest& forest, std::span<const double> features_i,
                              std::span<const double> features_j, double scaled_distance);

}  // namespace flowgraph
