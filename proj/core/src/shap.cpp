#include "flowgraph/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include "flowgraph/error.hpp"
#include "flowgraph/rng.hpp"

namespace flowgraph {

namespace {

void check_inputs(std::span<const double> instance,
                  const std::vector<std::vector<double>>& background) {
  if (instance.empty()) throw ConfigError("shap instance must be non-empty");
  if (background.empty()) throw ConfigError("shap background set must be non-empty");
  for (const auto& row : background) {
    if (row.size() != instance.size()) {
      throw ConfigError("shap background schema does not match the instance");
    }
  }
}

// Mean model output over background rows with coalition features replaced by
// the instance values. scratch must have instance size.
double coalition_value(const ModelFn& model, std::span<const double> instance,
                       const std::vector<std::vector<double>>& background,
                       const std::vector<bool>& in_coalition, std::vector<double>& scratch) {
  double total = 0.0;
  for (const auto& row : background) {
    for (std::size_t f = 0; f < instance.size(); ++f) {
      scratch[f] = in_coalition[f] ? instance[f] : row[f];
    }
    total += model(scratch);
  }
  return total / static_cast<double>(background.size());
}

double factorial(std::size_t n) {
  double out = 1.0;
  for (std::size_t i = 2; i <= n; ++i) out *= static_cast<double>(i);
  return out;
}

}  // namespace

ShapResult shap_exact(const ModelFn& model, std::span<const double> instance,
                      const std::vector<std::vector<double>>& background) {
  check_inputs(instance, background);
  const std::size_t p = instance.size();
  if (p > kShapExactMaxFeatures) {
    throw ConfigError("exact Shapley enumeration supports at most " +
                      std::to_string(kShapExactMaxFeatures) +
                      " features; use permutation sampling for wider models");
  }

  const std::size_t n_subsets = std::size_t{1} << p;
  std::vector<double> value(n_subsets);
  std::vector<double> scratch(p);
  std::vector<bool> in_coalition(p);
  for (std::size_t mask = 0; mask < n_subsets; ++mask) {
    for (std::size_t f = 0; f < p; ++f) in_coalition[f] = (mask >> f) & 1U;
    value[mask] = coalition_value(model, instance, background, in_coalition, scratch);
  }

  // Shapley kernel weights by coalition size: |S|! (p-|S|-1)! / p!
  std::vector<double> weight(p);
  const double p_fact = factorial(p);
  for (std::size_t s = 0; s < p; ++s) {
    weight[s] = factorial(s) * factorial(p - s - 1) / p_fact;
  }

  ShapResult result;
  result.base_value = value[0];
  result.phi.assign(p, 0.0);
  for (std::size_t mask = 0; mask < n_subsets; ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t f = 0; f < p; ++f) {
      if ((mask >> f) & 1U) continue;  // iterate S not containing f
      result.phi[f] += weight[size] * (value[mask | (std::size_t{1} << f)] - value[mask]);
    }
  }
  return result;
}

ShapResult shap_sample(const ModelFn& model, std::span<const double> instance,
                       const std::vector<std::vector<double>>& background,
                       std::size_t n_permutations, std::uint64_t seed) {
  check_inputs(instance, background);
  if (n_permutations < 1) throw ConfigError("shap sampling needs n_permutations >= 1");
  const std::size_t p = instance.size();

  // Exhaustive mode: n_permutations == p! enumerates each permutation once.
  bool exhaustive = false;
  if (p <= 10) {
    exhaustive = static_cast<double>(n_permutations) == factorial(p);
  }

  std::vector<double> sum(p, 0.0);
  std::vector<double> sum_sq(p, 0.0);
  std::vector<double> scratch(p);
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);

  const std::vector<bool> empty_coalition(p, false);
  const double base = coalition_value(model, instance, background, empty_coalition, scratch);

  std::vector<bool> in_coalition(p);
  auto run_permutation = [&](const std::vector<std::size_t>& perm) {
    std::fill(in_coalition.begin(), in_coalition.end(), false);
    double prev = base;
    for (std::size_t f : perm) {
      in_coalition[f] = true;
      const double cur = coalition_value(model, instance, background, in_coalition, scratch);
      const double marginal = cur - prev;
      sum[f] += marginal;
      sum_sq[f] += marginal * marginal;
      prev = cur;
    }
  };

  if (exhaustive) {
    std::sort(order.begin(), order.end());
    do {
      run_permutation(order);
    } while (std::next_permutation(order.begin(), order.end()));
  } else {
    for (std::size_t k = 0; k < n_permutations; ++k) {
      rng.shuffle(order);
      run_permutation(order);
    }
  }

  const double m = static_cast<double>(n_permutations);
  ShapResult result;
  result.base_value = base;
  result.phi.assign(p, 0.0);
  result.stderr_phi.assign(p, 0.0);
  for (std::size_t f = 0; f < p; ++f) {
    result.phi[f] = sum[f] / m;
    if (n_permutations > 1) {
      const double var = std::max(0.0, (sum_sq[f] - sum[f] * sum[f] / m) / (m - 1.0));
      result.stderr_phi[f] = std::sqrt(var / m);
    }
  }
  return result;
}

std::string pooled_feature_name(const std::string& name) {
  if (name.size() > 2) {
    const std::string suffix = name.substr(name.size() - 2);
    if (suffix == "_i" || suffix == "_j") return name.substr(0, name.size() - 2);
  }
  return name;
}

std::vector<ShapSummaryRow> aggregate_shap(const std::vector<ShapResult>& results,
                                           const std::vector<std::string>& feature_names,
                                           bool pool_pair_columns) {
  struct Accum {
    double max_abs = 0.0;
    double sum_abs = 0.0;
    std::size_t n = 0;
  };
  std::map<std::string, Accum> by_feature;
  for (const auto& result : results) {
    if (result.phi.size() != feature_names.size()) {
      throw ConfigError("shap result schema does not match feature names");
    }
    for (std::size_t f = 0; f < feature_names.size(); ++f) {
      const std::string name =
          pool_pair_columns ? pooled_feature_name(feature_names[f]) : feature_names[f];
      auto& acc = by_feature[name];
      const double a = std::abs(result.phi[f]);
      acc.max_abs = std::max(acc.max_abs, a);
      acc.sum_abs += a;
      ++acc.n;
    }
  }

  std::vector<ShapSummaryRow> rows;
  rows.reserve(by_feature.size());
  for (const auto& [name, acc] : by_feature) {
    rows.push_back({name, acc.max_abs, acc.n ? acc.sum_abs / static_cast<double>(acc.n) : 0.0});
  }
  std::sort(rows.begin(), rows.end(), [](const ShapSummaryRow& a, const ShapSummaryRow& b) {
    if (a.max_abs_phi != b.max_abs_phi) return a.max_abs_phi > b.max_abs_phi;
    return a.feature < b.feature;  // stable order on ties
  });
  return rows;
}

}  // namespace flowgraph
