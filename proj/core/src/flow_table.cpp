#include "flowgraph/flow_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "flowgraph/csv.hpp"
#include "flowgraph/error.hpp"
#include "flowgraph/rng.hpp"

namespace flowgraph {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    case Split::Unknown: return "unknown";
  }
  return "unknown";
}

Split split_from_name(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  if (name == "unknown") return Split::Unknown;
  throw DataError("unknown split label '" + std::string(name) + "'");
}

FlowTable::PairKey FlowTable::key(const std::string& a, const std::string& b) const {
  if (directed_) return {a, b};
  return a <= b ? PairKey{a, b} : PairKey{b, a};
}

void FlowTable::add(const std::string& a, const std::string& b, std::int64_t count) {
  if (a == b) throw DataError("self pair '" + a + "' is not a valid flow");
  if (count < 1) throw DataError("pair counts must be >= 1");
  pairs_[key(a, b)].count += count;
}

std::vector<std::string> FlowTable::universe() const {
  std::set<std::string> ids;
  for (const auto& [k, v] : pairs_) {
    ids.insert(k.first);
    ids.insert(k.second);
  }
  return {ids.begin(), ids.end()};
}

FlowTable FlowTable::restricted_to(Split split) const {
  FlowTable out(directed_);
  for (const auto& [k, v] : pairs_) {
    if (v.split == split) out.pairs()[k] = v;
  }
  return out;
}

FlowTable extract_itf(const std::vector<Trip>& trips) {
  FlowTable table(false);
  for (const auto& trip : trips) {
    std::vector<std::string> distinct = trip.attractions;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      for (std::size_t j = i + 1; j < distinct.size(); ++j) {
        table.add(distinct[i], distinct[j], 1);
      }
    }
  }
  return table;
}

FlowTable extract_directed_itf(const std::vector<Trip>& trips) {
  FlowTable table(true);
  for (const auto& trip : trips) {
    for (std::size_t k = 0; k + 1 < trip.attractions.size(); ++k) {
      const auto& src = trip.attractions[k];
      const auto& dst = trip.attractions[k + 1];
      if (src == dst) continue;
      table.add(src, dst, 1);
    }
  }
  return table;
}

void split_dataset(FlowTable& table, const std::array<double, 3>& ratios, std::uint64_t seed) {
  const double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  const std::size_t n = table.size();
  if (n < 3) throw DataError("need at least 3 pairs to split, got " + std::to_string(n));

  std::vector<FlowTable::PairKey> keys;
  keys.reserve(n);
  for (const auto& [k, v] : table.pairs()) keys.push_back(k);

  Rng rng(seed);
  rng.shuffle(keys);

  const std::size_t n_val = static_cast<std::size_t>(std::floor(ratios[1] * n));
  const std::size_t n_test = static_cast<std::size_t>(std::floor(ratios[2] * n));
  const std::size_t n_train = n - n_val - n_test;  // floor(train) + remainder

  for (std::size_t i = 0; i < keys.size(); ++i) {
    Split s = Split::Train;
    if (i >= n_train && i < n_train + n_val) s = Split::Val;
    else if (i >= n_train + n_val) s = Split::Test;
    table.pairs()[keys[i]].split = s;
  }
}

void save_itf_csv(const std::filesystem::path& path, const FlowTable& table) {
  csv::Table out;
  out.header = {"src_id", "dst_id", "count"};
  for (const auto& [k, v] : table.pairs()) {
    out.rows.push_back({k.first, k.second, std::to_string(v.count)});
  }
  csv::write_file(path, out);
}

FlowTable load_itf_csv(const std::filesystem::path& path, bool directed) {
  const csv::Table in = csv::read_file(path);
  if (in.header != std::vector<std::string>{"src_id", "dst_id", "count"}) {
    throw DataError("itf.csv header mismatch in " + path.string());
  }
  FlowTable table(directed);
  for (std::size_t r = 0; r < in.rows.size(); ++r) {
    const auto& row = in.rows[r];
    if (row.size() != 3) throw DataError("itf.csv line " + std::to_string(r + 2) + ": bad row");
    std::int64_t count = 0;
    auto [ptr, ec] = std::from_chars(row[2].data(), row[2].data() + row[2].size(), count);
    if (ec != std::errc{} || ptr != row[2].data() + row[2].size()) {
      throw DataError("itf.csv line " + std::to_string(r + 2) + ": bad count '" + row[2] + "'");
    }
    table.add(row[0], row[1], count);
  }
  return table;
}

void save_splits_csv(const std::filesystem::path& path, const FlowTable& table) {
  csv::Table out;
  out.header = {"src_id", "dst_id", "split"};
  for (const auto& [k, v] : table.pairs()) {
    out.rows.push_back({k.first, k.second, std::string(split_name(v.split))});
  }
  csv::write_file(path, out);
}

void load_splits_csv(const std::filesystem::path& path, FlowTable& table) {
  const csv::Table in = csv::read_file(path);
  if (in.header != std::vector<std::string>{"src_id", "dst_id", "split"}) {
    throw DataError("splits.csv header mismatch in " + path.string());
  }
  for (std::size_t r = 0; r < in.rows.size(); ++r) {
    const auto& row = in.rows[r];
    if (row.size() != 3) throw DataError("splits.csv line " + std::to_string(r + 2) + ": bad row");
    const auto key = table.key(row[0], row[1]);
    const auto it = table.pairs().find(key);
    if (it == table.pairs().end()) {
      throw DataError("splits.csv line " + std::to_string(r + 2) + ": pair (" + row[0] + ", " +
                      row[1] + ") not present in flow table");
    }
    it->second.split = split_from_name(row[2]);
  }
}

}  // namespace flowgraph
