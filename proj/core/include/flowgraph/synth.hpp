#pragma once

#include <cstdint>
#include <vector>

#include "flowgraph/attraction.hpp"
#include "flowgraph/flow_table.hpp"

namespace flowgraph {

// Gravity-law generator parameters. Flow between i and j is
//   round(scale * (m_i * m_j)^alpha / d_ij^beta * noise)
// with m = comment_number (thousands) and d the haversine distance in km,
// clamped below at min_distance_m. Pairs that round to zero are omitted.
struct SynthParams {
  double alpha = 1.0;
  double beta = 2.0;
  double scale = 200.0;
  double noise_sigma = 0.0;  // sigma of multiplicative log-normal noise
  double lon_min = 116.2, lon_max = 116.6;
  double lat_min = 39.75, lat_max = 40.05;
  double min_distance_m = 2000.0;
  double mass_min = 2000.0, mass_max = 20000.0;  // comment_number range
};

struct SynthDataset {
  std::vector<Attraction> attractions;
  FlowTable truth;  // undirected, splits unassigned
};

// Deterministic expected flow before rounding and noise.
double gravity_flow(double mass_i, double mass_j, double distance_m, const SynthParams& params);

// Generates n attractions with random Table-1 features and the gravity-law
// ground-truth flow table. Deterministic for a fixed seed.
SynthDataset synth_generate(std::size_t n, std::uint64_t seed, const SynthParams& params = {});

}  // namespace flowgraph
