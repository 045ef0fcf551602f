#include "flowgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flowgraph/error.hpp"

namespace flowgraph {

namespace {

void check_lengths(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw DataError("metric inputs must be equal-length non-empty arrays");
  }
}

}  // namespace

double mse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred);
  double total = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    total += d * d;
  }
  return total / static_cast<double>(y_true.size());
}

double mape(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred);
  double total = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (!(y_true[i] > 0.0)) {
      throw DataError("MAPE requires strictly positive true values");
    }
    total += std::abs((y_true[i] - y_pred[i]) / y_true[i]);
  }
  return total / static_cast<double>(y_true.size());
}

double cpc(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred);
  double overlap = 0.0, sum_true = 0.0, sum_pred = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    overlap += std::min(y_true[i], y_pred[i]);
    sum_true += y_true[i];
    sum_pred += y_pred[i];
  }
  const double denom = sum_true + sum_pred;
  if (denom == 0.0) return 1.0;  // identical empty mass
  return 2.0 * overlap / denom;
}

std::vector<RangeBin> accuracy_by_range(std::span<const double> y_true,
                                        std::span<const double> y_pred, std::size_t n_bins) {
  check_lengths(y_true, y_pred);
  if (n_bins < 1) throw ConfigError("accuracy_by_range needs n_bins >= 1");

  const std::size_t n = y_true.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return y_true[a] < y_true[b]; });

  std::vector<RangeBin> bins;
  std::vector<double> bin_true, bin_pred;
  std::size_t rank = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const std::size_t end = (b + 1) * n / n_bins;
    bin_true.clear();
    bin_pred.clear();
    RangeBin bin;
    for (; rank < end; ++rank) {
      const std::size_t i = order[rank];
      if (bin_true.empty()) bin.lo = y_true[i];
      bin.hi = y_true[i];
      bin_true.push_back(y_true[i]);
      bin_pred.push_back(y_pred[i]);
    }
    if (bin_true.empty()) continue;
    bin.count = bin_true.size();
    bin.mape = mape(bin_true, bin_pred);
    bins.push_back(bin);
  }
  return bins;
}

EvalReport evaluate_predictions(std::span<const double> y_true, std::span<const double> y_pred,
                                std::size_t n_bins) {
  EvalReport report;
  report.mse = mse(y_true, y_pred);
  report.mape = mape(y_true, y_pred);
  report.cpc = cpc(y_true, y_pred);
  report.n = y_true.size();
  report.by_range = accuracy_by_range(y_true, y_pred, n_bins);
  return report;
}

}  // namespace flowgraph
