#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flowgraph {

// Mean squared error.
double mse(std::span<const double> y_true, std::span<const double> y_pred);

// Mean absolute percentage error (as a fraction, not percent). Every true
// value must be > 0; zero-true pairs are excluded upstream.
double mape(std::span<const double> y_true, std::span<const double> y_pred);

// Common Part of Commuters: 2 * sum(min) / (sum(true) + sum(pred)) over
// non-negative arrays; defined as 1 when both sums are zero.
double cpc(std::span<const double> y_true, std::span<const double> y_pred);

struct RangeBin {
  double lo = 0.0;  // smallest true value in the bin
  double hi = 0.0;  // largest true value in the bin
  std::size_t count = 0;
  double mape = 0.0;
};

// Quantile bins over y_true (near-equal counts); per-bin MAPE. Only
// non-empty bins are emitted; counts sum to n.
std::vector<RangeBin> accuracy_by_range(std::span<const double> y_true,
                                        std::span<const double> y_pred, std::size_t n_bins);

struct EvalReport {
  double mse = 0.0;
  double mape = 0.0;
  double cpc = 0.0;
  std::size_t n = 0;
  std::vector<RangeBin> by_range;
};

// Full report over one split; callers clamp predictions at zero first.
EvalReport evaluate_predictions(std::span<const double> y_true, std::span<const double> y_pred,
                                std::size_t n_bins = 5);

}  // namespace flowgraph
