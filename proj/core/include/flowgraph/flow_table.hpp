#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flowgraph/trips.hpp"

namespace flowgraph {

enum class Split { Train, Val, Test, Unknown };

std::string_view split_name(Split s);
Split split_from_name(std::string_view name);

struct PairFlow {
  std::int64_t count = 0;  // >= 1 for stored pairs
  Split split = Split::Unknown;
};

// Pair-count table of inter-attraction flows. Undirected tables store each
// unordered pair once under (smaller id, larger id); directed tables store
// ordered pairs.
class FlowTable {
 public:
  using PairKey = std::pair<std::string, std::string>;

  explicit FlowTable(bool directed = false) : directed_(directed) {}

  bool directed() const { return directed_; }
  PairKey key(const std::string& a, const std::string& b) const;

  void add(const std::string& a, const std::string& b, std::int64_t count);
  const std::map<PairKey, PairFlow>& pairs() const { return pairs_; }
  std::map<PairKey, PairFlow>& pairs() { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  // Sorted distinct ids occurring in any stored pair.
  std::vector<std::string> universe() const;

  FlowTable restricted_to(Split split) const;

 private:
  bool directed_;
  std::map<PairKey, PairFlow> pairs_;
};

// Counts, per unordered pair of distinct attractions, the number of trips in
// which both occur (once per trip, regardless of repeat visits).
FlowTable extract_itf(const std::vector<Trip>& trips);

// Counts consecutive ordered visits (t[k], t[k+1]) with distinct ids.
FlowTable extract_directed_itf(const std::vector<Trip>& trips);

// Seeded uniform partition of stored pairs into train/val/test. Sizes are
// floor-rounded per ratio with the remainder assigned to train.
void split_dataset(FlowTable& table, const std::array<double, 3>& ratios, std::uint64_t seed);

// itf.csv: src_id,dst_id,count (src_id < dst_id in undirected mode).
void save_itf_csv(const std::filesystem::path& path, const FlowTable& table);
FlowTable load_itf_csv(const std::filesystem::path& path, bool directed = false);

// splits.csv: src_id,dst_id,split.
void save_splits_csv(const std::filesystem::path& path, const FlowTable& table);
void load_splits_csv(const std::filesystem::path& path, FlowTable& table);

}  // namespace flowgraph
