#include "flowgraph/synth.hpp"

#include <cmath>
#include <string>

#include "flowgraph/error.hpp"
#include "flowgraph/geo.hpp"
#include "flowgraph/rng.hpp"

namespace flowgraph {

namespace {

const char* kAdnames[] = {"dongcheng", "xicheng",  "chaoyang", "haidian",
                          "fengtai",   "shijingshan", "tongzhou", "changping"};

std::string synth_id(std::size_t i) {
  std::string num = std::to_string(i);
  while (num.size() < 3) num.insert(num.begin(), '0');
  return "a" + num;
}

}  // namespace

double gravity_flow(double mass_i, double mass_j, double distance_m, const SynthParams& params) {
  const double d_km = std::max(distance_m, params.min_distance_m) / 1000.0;
  const double m_i = mass_i / 1000.0;
  const double m_j = mass_j / 1000.0;
  return params.scale * std::pow(m_i * m_j, params.alpha) / std::pow(d_km, params.beta);
}

SynthDataset synth_generate(std::size_t n, std::uint64_t seed, const SynthParams& params) {
  if (n < 10) throw ConfigError("synthetic dataset needs n >= 10 attractions");

  Rng rng(derive_seed(seed, 0x5f1));
  SynthDataset out;
  out.attractions.reserve(n);

  // Popularity decays from the city center outward (downtown attractions
  // draw the most visitors), with log-normal jitter per attraction.
  const LonLat center{0.5 * (params.lon_min + params.lon_max),
                      0.5 * (params.lat_min + params.lat_max)};
  const double max_radius =
      haversine_distance(center, {params.lon_max, params.lat_max});
  const double log_lo = std::log(params.mass_min);
  const double log_hi = std::log(params.mass_max);

  for (std::size_t i = 0; i < n; ++i) {
    Attraction a;
    a.id = synth_id(i);
    a.name = "Attraction " + std::to_string(i);
    a.lon = rng.uniform(params.lon_min, params.lon_max);
    a.lat = rng.uniform(params.lat_min, params.lat_max);
    a.area = std::exp(rng.uniform(std::log(1e3), std::log(5e6)));
    a.adname = kAdnames[rng.uniform_index(8)];
    a.ticket_price = rng.uniform() < 0.3 ? 0.0 : std::round(rng.uniform(10.0, 200.0));
    a.type = std::string(kTypeLabels[rng.uniform_index(kTypeLabels.size())]);
    a.ranking = std::round(rng.uniform(3.0, 5.0) * 10.0) / 10.0;
    const double radial = haversine_distance(center, a.coord()) / max_radius;
    const double log_mass =
        std::clamp(log_hi + (log_lo - log_hi) * radial + 0.35 * rng.normal(), log_lo, log_hi);
    a.comment_number = std::round(std::exp(log_mass));
    a.level = std::string(kLevelLabels[rng.uniform_index(kLevelLabels.size())]);
    a.est_visit_time = std::round(rng.uniform(0.5, 6.0) * 2.0) / 2.0;
    out.attractions.push_back(std::move(a));
  }

  Rng noise_rng(derive_seed(seed, 0x5f2));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& ai = out.attractions[i];
      const auto& aj = out.attractions[j];
      const double d = haversine_distance(ai.coord(), aj.coord());
      double flow = gravity_flow(ai.comment_number, aj.comment_number, d, params);
      if (params.noise_sigma > 0.0) {
        flow *= std::exp(params.noise_sigma * noise_rng.normal());
      }
      const auto count = static_cast<std::int64_t>(std::llround(flow));
      if (count >= 1) out.truth.add(ai.id, aj.id, count);
    }
  }
  return out;
}

}  // namespace flowgraph
