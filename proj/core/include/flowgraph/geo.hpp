#pragma once

namespace flowgraph {

struct LonLat {
  double lon = 0.0;  // degrees east
  double lat = 0.0;  // degrees north
};

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

// Great-circle distance in meters on the spherical earth model.
double haversine_distance(const LonLat& a, const LonLat& b);

}  // namespace flowgraph
