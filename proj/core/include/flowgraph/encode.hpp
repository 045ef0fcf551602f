#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "flowgraph/attraction.hpp"

namespace flowgraph {

// Fixed column order of the node feature vector.
inline constexpr std::array<std::string_view, 10> kFeatureNames = {
    "lon",     "lat",    "area",           "adname", "ticket_price",
    "type",    "ranking", "comment_number", "level",  "est_visit_time"};
inline constexpr std::size_t kFeatureCount = kFeatureNames.size();

// Quality grade to ordinal code: no-level -> 1, 2A..5A -> 2..5.
int encode_level(std::string_view label);

// Single-column ordinal encoder. Distinct labels sorted lexicographically
// receive codes 0..k-1, so the mapping is independent of input order.
class CategoryEncoder {
 public:
  static CategoryEncoder fit(const std::vector<std::string>& labels);

  int transform(const std::string& label) const;  // SchemaError on unknown label
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  static CategoryEncoder from_labels(std::vector<std::string> sorted_labels);

 private:
  std::vector<std::string> labels_;          // sorted
  std::map<std::string, int> code_by_label_;
};

// Per-column min-max scaler: min -> 0, max -> 1, constant column -> 0.
class FeatureScaler {
 public:
  static FeatureScaler fit(const std::vector<std::vector<double>>& rows);

  std::vector<double> transform(const std::vector<double>& row) const;
  std::vector<std::vector<double>> transform(const std::vector<std::vector<double>>& rows) const;

  double transform_value(double value, std::size_t column) const;

  const std::vector<double>& mins() const { return min_; }
  const std::vector<double>& maxs() const { return max_; }
  std::size_t columns() const { return min_.size(); }

  static FeatureScaler from_bounds(std::vector<double> mins, std::vector<double> maxs);

 private:
  std::vector<double> min_;
  std::vector<double> max_;
};

// Fitted preprocessing state for the Table-1 schema: the two categorical
// encoders plus the min-max scaler over the raw encoded matrix.
struct FeatureCodec {
  CategoryEncoder adname;
  CategoryEncoder type;
  FeatureScaler scaler;

  static FeatureCodec fit(const std::vector<Attraction>& attractions);

  // Encoded but unscaled column vector (level uses encode_level codes).
  std::vector<double> raw_vector(const Attraction& a) const;
  // Scaled feature vector, entries in [0, 1] for attractions seen at fit time.
  std::vector<double> feature_vector(const Attraction& a) const;
};

}  // namespace flowgraph
