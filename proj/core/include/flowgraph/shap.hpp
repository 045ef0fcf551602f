#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace flowgraph {

using ModelFn = std::function<double(std::span<const double>)>;

// Per-instance attribution under the interventional value function
//   v(S) = mean over background rows b of model(x_S combined with b_outside_S).
struct ShapResult {
  double base_value = 0.0;             // v(empty) = mean model output on background
  std::vector<double> phi;             // per-feature attribution
  std::vector<double> stderr_phi;      // per-feature sampling error; empty in exact mode
};

inline constexpr std::size_t kShapExactMaxFeatures = 14;

// Exact Shapley values by subset enumeration (2^p coalitions). Refuses
// feature counts above kShapExactMaxFeatures; use shap_sample instead.
ShapResult shap_exact(const ModelFn& model, std::span<const double> instance,
                      const std::vector<std::vector<double>>& background);

// Permutation-sampling estimate of the same interventional values. When
// n_permutations equals p! (p small), all distinct permutations are
// enumerated and the estimate coincides with shap_exact.
ShapResult shap_sample(const ModelFn& model, std::span<const double> instance,
                       const std::vector<std::vector<double>>& background,
                       std::size_t n_permutations, std::uint64_t seed);

struct ShapSummaryRow {
  std::string feature;
  double max_abs_phi = 0.0;
  double mean_abs_phi = 0.0;
};

// Global summary over many explanations: per-feature max |phi| and mean
// |phi|, sorted by max |phi| descending (ties by name). With
// pool_pair_columns, "<name>_i" and "<name>_j" pool into one "<name>" group.
std::vector<ShapSummaryRow> aggregate_shap(const std::vector<ShapResult>& results,
                                           const std::vector<std::string>& feature_names,
                                           bool pool_pair_columns = false);

// Grouping used by aggregate_shap when pooling is on.
std::string pooled_feature_name(const std::string& name);

}  // namespace flowgraph
