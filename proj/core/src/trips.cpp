#include "flowgraph/trips.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "flowgraph/error.hpp"

namespace flowgraph {

namespace {

std::string normalize_key(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  std::string out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[i]))));
  }
  return out;
}

bool parse_uint(std::string_view s, int& out) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || value < 0) return false;
  out = value;
  return true;
}

}  // namespace

std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
  // Howard Hinnant's algorithm, valid for the proleptic Gregorian calendar.
  year -= month <= 2;
  const std::int64_t era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::optional<std::int64_t> parse_date_days(std::string_view ymd) {
  if (ymd.size() != 10 || ymd[4] != '-' || ymd[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_uint(ymd.substr(0, 4), y)) return std::nullopt;
  if (!parse_uint(ymd.substr(5, 2), m)) return std::nullopt;
  if (!parse_uint(ymd.substr(8, 2), d)) return std::nullopt;
  if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
  static constexpr int days_in_month[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  const int limit = (m == 2 && leap) ? 29 : days_in_month[m - 1];
  if (d > limit) return std::nullopt;
  return days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

AliasIndex AliasIndex::build(const std::vector<Attraction>& attractions) {
  AliasIndex index;
  auto insert = [&](const std::string& raw, const std::string& id) {
    const std::string key = normalize_key(raw);
    if (key.empty()) return;
    auto [it, inserted] = index.id_by_key_.emplace(key, id);
    if (!inserted && it->second != id) {
      throw DataError("alias '" + raw + "' maps to both '" + it->second + "' and '" + id + "'");
    }
  };
  for (const auto& a : attractions) {
    insert(a.name, a.id);
    insert(a.id, a.id);
    for (const auto& alias : a.aliases) insert(alias, a.id);
  }
  return index;
}

std::optional<std::string> AliasIndex::lookup(std::string_view mention) const {
  const auto it = id_by_key_.find(normalize_key(mention));
  if (it == id_by_key_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> match_attractions(const std::vector<std::string>& mentions,
                                           const AliasIndex& index) {
  std::vector<std::string> ids;
  for (const auto& mention : mentions) {
    const auto id = index.lookup(mention);
    if (!id) continue;
    if (!ids.empty() && ids.back() == *id) continue;  // collapse consecutive repeats
    ids.push_back(*id);
  }
  return ids;
}

MergeResult merge_notes(std::vector<NoteRecord> notes, int window_days) {
  if (window_days < 0) throw ConfigError("merge window must be >= 0 days");

  struct DatedNote {
    std::int64_t date;
    std::vector<std::string> mentions;
  };
  MergeResult result;
  std::map<std::string, std::vector<DatedNote>> by_tourist;
  for (auto& note : notes) {
    const auto date = parse_date_days(note.posted_date);
    if (!date) {
      ++result.skipped_records;
      continue;
    }
    by_tourist[note.tourist_id].push_back({*date, std::move(note.mentions)});
  }

  for (auto& [tourist_id, dated] : by_tourist) {
    // Canonical order regardless of input order: by date, then mention list.
    std::sort(dated.begin(), dated.end(), [](const DatedNote& a, const DatedNote& b) {
      if (a.date != b.date) return a.date < b.date;
      return a.mentions < b.mentions;
    });
    Trip current;
    std::int64_t latest = 0;
    bool open = false;
    auto flush = [&]() {
      if (open) result.trips.push_back(std::move(current));
      open = false;
    };
    for (auto& note : dated) {
      if (open && note.date - latest <= window_days) {
        current.attractions.insert(current.attractions.end(), note.mentions.begin(),
                                   note.mentions.end());
        latest = note.date;
      } else {
        flush();
        current = Trip{tourist_id, note.date, std::move(note.mentions)};
        latest = note.date;
        open = true;
      }
    }
    flush();
  }
  return result;
}

std::vector<Trip> filter_trips(const std::vector<Trip>& trips) {
  std::vector<Trip> kept;
  for (const auto& trip : trips) {
    std::vector<std::string> distinct = trip.attractions;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() >= 2) kept.push_back(trip);
  }
  return kept;
}

NotesFile load_notes_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open notes file: " + path.string());
  NotesFile out;
  std::string line;
  std::size_t line_number = 0;
  auto flag_malformed = [&out](std::size_t number) {
    ++out.malformed_lines;
    if (out.malformed_line_numbers.size() < 20) out.malformed_line_numbers.push_back(number);
  };
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    ++out.total_lines;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("tourist_id") ||
        !j.contains("posted_date") || !j.contains("mentions") || !j["mentions"].is_array()) {
      flag_malformed(line_number);
      continue;
    }
    NoteRecord rec;
    try {
      rec.tourist_id = j["tourist_id"].get<std::string>();
      rec.posted_date = j["posted_date"].get<std::string>();
      for (const auto& m : j["mentions"]) rec.mentions.push_back(m.get<std::string>());
    } catch (const nlohmann::json::exception&) {
      flag_malformed(line_number);
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace flowgraph
