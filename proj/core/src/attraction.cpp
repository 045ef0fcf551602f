#include "flowgraph/attraction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "flowgraph/csv.hpp"
#include "flowgraph/error.hpp"

namespace flowgraph {

namespace {

const std::vector<std::string> kHeader = {
    "id",   "name",         "aliases", "lon",     "lat",
    "area", "adname",       "ticket_price", "type", "ranking",
    "comment_number", "level", "est_visit_time"};

double parse_number(const std::string& s, const std::string& column, std::size_t line) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError("attractions.csv line " + std::to_string(line) + ": column '" + column +
                    "' is not a number: '" + s + "'");
  }
  return value;
}

std::vector<std::string> split_aliases(const std::string& field) {
  std::vector<std::string> out;
  std::string current;
  std::stringstream ss(field);
  while (std::getline(ss, current, ';')) {
    if (!current.empty()) out.push_back(current);
  }
  return out;
}

std::string join_aliases(const std::vector<std::string>& aliases) {
  std::string out;
  for (std::size_t i = 0; i < aliases.size(); ++i) {
    if (i > 0) out.push_back(';');
    out += aliases[i];
  }
  return out;
}

std::string format_number(double v) {
  // Shortest representation that round-trips; keeps CSV output deterministic.
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void validate_attraction(const Attraction& a) {
  auto fail = [&](const std::string& msg) {
    throw SchemaError("attraction '" + a.id + "': " + msg);
  };
  if (a.id.empty()) fail("empty id");
  if (!(a.lon >= -180.0 && a.lon <= 180.0)) fail("lon out of [-180, 180]");
  if (!(a.lat >= -90.0 && a.lat <= 90.0)) fail("lat out of [-90, 90]");
  if (!(a.area >= 0.0)) fail("negative area");
  if (!(a.ticket_price >= 0.0)) fail("negative ticket_price");
  if (!(a.comment_number >= 0.0)) fail("negative comment_number");
  if (!(a.est_visit_time > 0.0)) fail("est_visit_time must be > 0");
  if (std::find(kTypeLabels.begin(), kTypeLabels.end(), a.type) == kTypeLabels.end()) {
    fail("unknown type '" + a.type + "'");
  }
  if (std::find(kLevelLabels.begin(), kLevelLabels.end(), a.level) == kLevelLabels.end()) {
    fail("unknown level '" + a.level + "'");
  }
}

void validate_attractions(const std::vector<Attraction>& attractions) {
  std::unordered_set<std::string> seen;
  for (const auto& a : attractions) {
    validate_attraction(a);
    if (!seen.insert(a.id).second) throw SchemaError("duplicate attraction id '" + a.id + "'");
  }
}

std::vector<Attraction> load_attractions_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_file(path);
  if (table.header != kHeader) {
    throw DataError("attractions.csv header mismatch in " + path.string());
  }
  std::vector<Attraction> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = r + 2;
    if (row.size() != kHeader.size()) {
      throw DataError("attractions.csv line " + std::to_string(line) + ": expected " +
                      std::to_string(kHeader.size()) + " fields, got " + std::to_string(row.size()));
    }
    Attraction a;
    a.id = row[0];
    a.name = row[1];
    a.aliases = split_aliases(row[2]);
    a.lon = parse_number(row[3], "lon", line);
    a.lat = parse_number(row[4], "lat", line);
    a.area = parse_number(row[5], "area", line);
    a.adname = row[6];
    a.ticket_price = parse_number(row[7], "ticket_price", line);
    a.type = row[8];
    a.ranking = parse_number(row[9], "ranking", line);
    a.comment_number = parse_number(row[10], "comment_number", line);
    a.level = row[11];
    a.est_visit_time = parse_number(row[12], "est_visit_time", line);
    out.push_back(std::move(a));
  }
  validate_attractions(out);
  return out;
}

void save_attractions_csv(const std::filesystem::path& path,
                          const std::vector<Attraction>& attractions) {
  csv::Table table;
  table.header = kHeader;
  for (const auto& a : attractions) {
    table.rows.push_back({a.id, a.name, join_aliases(a.aliases), format_number(a.lon),
                          format_number(a.lat), format_number(a.area), a.adname,
                          format_number(a.ticket_price), a.type, format_number(a.ranking),
                          format_number(a.comment_number), a.level,
                          format_number(a.est_visit_time)});
  }
  csv::write_file(path, table);
}

}  // namespace flowgraph
