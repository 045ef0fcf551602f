#include "flowgraph/encode.hpp"

#include <algorithm>

#include "flowgraph/error.hpp"

namespace flowgraph {

int encode_level(std::string_view label) {
  for (std::size_t i = 0; i < kLevelLabels.size(); ++i) {
    if (label == kLevelLabels[i]) return static_cast<int>(i) + 1;
  }
  throw SchemaError("unknown level label '" + std::string(label) + "'");
}

CategoryEncoder CategoryEncoder::fit(const std::vector<std::string>& labels) {
  if (labels.empty()) throw SchemaError("cannot fit ordinal encoder on empty label list");
  std::vector<std::string> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  return from_labels(std::move(distinct));
}

CategoryEncoder CategoryEncoder::from_labels(std::vector<std::string> sorted_labels) {
  CategoryEncoder enc;
  enc.labels_ = std::move(sorted_labels);
  for (std::size_t i = 0; i < enc.labels_.size(); ++i) {
    enc.code_by_label_[enc.labels_[i]] = static_cast<int>(i);
  }
  return enc;
}

int CategoryEncoder::transform(const std::string& label) const {
  const auto it = code_by_label_.find(label);
  if (it == code_by_label_.end()) {
    throw SchemaError("unknown category label '" + label + "'");
  }
  return it->second;
}

FeatureScaler FeatureScaler::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw SchemaError("cannot fit scaler on empty matrix");
  const std::size_t cols = rows.front().size();
  FeatureScaler s;
  s.min_.assign(cols, 0.0);
  s.max_.assign(cols, 0.0);
  for (std::size_t c = 0; c < cols; ++c) {
    double lo = rows[0][c];
    double hi = rows[0][c];
    for (const auto& row : rows) {
      if (row.size() != cols) throw SchemaError("ragged matrix passed to scaler fit");
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
    }
    s.min_[c] = lo;
    s.max_[c] = hi;
  }
  return s;
}

FeatureScaler FeatureScaler::from_bounds(std::vector<double> mins, std::vector<double> maxs) {
  FeatureScaler s;
  s.min_ = std::move(mins);
  s.max_ = std::move(maxs);
  return s;
}

double FeatureScaler::transform_value(double value, std::size_t column) const {
  const double lo = min_[column];
  const double hi = max_[column];
  if (hi == lo) return 0.0;
  return (value - lo) / (hi - lo);
}

std::vector<double> FeatureScaler::transform(const std::vector<double>& row) const {
  if (row.size() != min_.size()) throw SchemaError("scaler column count mismatch");
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = transform_value(row[c], c);
  return out;
}

std::vector<std::vector<double>> FeatureScaler::transform(
    const std::vector<std::vector<double>>& rows) const {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(transform(row));
  return out;
}

FeatureCodec FeatureCodec::fit(const std::vector<Attraction>& attractions) {
  if (attractions.empty()) throw SchemaError("cannot fit feature codec on empty attraction set");
  std::vector<std::string> adnames;
  std::vector<std::string> types;
  adnames.reserve(attractions.size());
  types.reserve(attractions.size());
  for (const auto& a : attractions) {
    adnames.push_back(a.adname);
    types.push_back(a.type);
  }
  FeatureCodec codec;
  codec.adname = CategoryEncoder::fit(adnames);
  codec.type = CategoryEncoder::fit(types);

  std::vector<std::vector<double>> raw;
  raw.reserve(attractions.size());
  for (const auto& a : attractions) raw.push_back(codec.raw_vector(a));
  codec.scaler = FeatureScaler::fit(raw);
  return codec;
}

std::vector<double> FeatureCodec::raw_vector(const Attraction& a) const {
  return {
      a.lon,
      a.lat,
      a.area,
      static_cast<double>(adname.transform(a.adname)),
      a.ticket_price,
      static_cast<double>(type.transform(a.type)),
      a.ranking,
      a.comment_number,
      static_cast<double>(encode_level(a.level)),
      a.est_visit_time,
  };
}

std::vector<double> FeatureCodec::feature_vector(const Attraction& a) const {
  return scaler.transform(raw_vector(a));
}

}  // namespace flowgraph
