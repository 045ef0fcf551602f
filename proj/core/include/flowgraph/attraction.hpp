#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "flowgraph/geo.hpp"

namespace flowgraph {

// Official attraction quality grades, ordinally coded 1 (no-level) .. 5 (5A).
inline constexpr std::array<std::string_view, 5> kLevelLabels = {
    "no-level", "2A", "3A", "4A", "5A"};

// The six attraction categories the feature schema admits.
inline constexpr std::array<std::string_view, 6> kTypeLabels = {
    "amusement park",
    "city sightseeing",
    "exhibition center & museum",
    "historical sites",
    "natural scenery",
    "zoos & arboretums"};

struct Attraction {
  std::string id;
  std::string name;
  std::vector<std::string> aliases;
  double lon = 0.0;
  double lat = 0.0;
  double area = 0.0;            // square meters
  std::string adname;           // administrative district
  double ticket_price = 0.0;
  std::string type;             // one of kTypeLabels
  double ranking = 0.0;         // average review score
  double comment_number = 0.0;  // popularity proxy
  std::string level;            // one of kLevelLabels
  double est_visit_time = 0.0;  // hours

  LonLat coord() const { return {lon, lat}; }
};

// Checks the per-record schema invariants; throws SchemaError on violation.
void validate_attraction(const Attraction& a);

// Validates every record and id uniqueness across the set.
void validate_attractions(const std::vector<Attraction>& attractions);

// attractions.csv with the exact header
// id,name,aliases,lon,lat,area,adname,ticket_price,type,ranking,comment_number,level,est_visit_time
// (aliases is a semicolon-separated list).
std::vector<Attraction> load_attractions_csv(const std::filesystem::path& path);
void save_attractions_csv(const std::filesystem::path& path,
                          const std::vector<Attraction>& attractions);

}  // namespace flowgraph
