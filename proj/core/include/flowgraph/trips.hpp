#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flowgraph/attraction.hpp"

namespace flowgraph {

// One travel-note record: what a tourist posted on one date, as an ordered
// list of place-name mentions (or already-matched attraction ids).
struct NoteRecord {
  std::string tourist_id;
  std::string posted_date;  // "YYYY-MM-DD"
  std::vector<std::string> mentions;
};

struct Trip {
  std::string tourist_id;
  std::int64_t date_days = 0;  // earliest merged note, days since 1970-01-01
  std::vector<std::string> attractions;  // visiting/mention order
};

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
std::optional<std::int64_t> parse_date_days(std::string_view ymd);

// Case-insensitive, whitespace-trimmed lookup from name/alias to attraction
// id. An alias reachable from two attractions is a dataset error.
class AliasIndex {
 public:
  static AliasIndex build(const std::vector<Attraction>& attractions);
  std::optional<std::string> lookup(std::string_view mention) const;

 private:
  std::unordered_map<std::string, std::string> id_by_key_;
};

// Maps mentions to ids, drops non-matching mentions, collapses consecutive
// duplicates.
std::vector<std::string> match_attractions(const std::vector<std::string>& mentions,
                                           const AliasIndex& index);

struct MergeResult {
  std::vector<Trip> trips;
  std::size_t skipped_records = 0;  // notes with unparseable dates
};

// Groups notes by tourist and chain-merges them: a note joins the current
// group when its date is within window_days of the group's latest date.
// Mention lists concatenate in date order; output is independent of the
// input note order.
MergeResult merge_notes(std::vector<NoteRecord> notes, int window_days = 5);

// Keeps trips that visit at least two distinct attractions.
std::vector<Trip> filter_trips(const std::vector<Trip>& trips);

struct NotesFile {
  std::vector<NoteRecord> records;
  std::size_t malformed_lines = 0;
  std::size_t total_lines = 0;
  std::vector<std::size_t> malformed_line_numbers;  // 1-based, first 20 kept
};

// trips.jsonl: one {"tourist_id","posted_date","mentions"} object per line.
NotesFile load_notes_jsonl(const std::filesystem::path& path);

}  // namespace flowgraph
