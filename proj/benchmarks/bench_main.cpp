#include <benchmark/benchmark.h>

#include "flowgraph/flow_table.hpp"
#include "flowgraph/forest.hpp"
#include "flowgraph/geo.hpp"
#include "flowgraph/graph.hpp"
#include "flowgraph/nn.hpp"
#include "flowgraph/rng.hpp"
#include "flowgraph/synth.hpp"
#include "flowgraph/train.hpp"

namespace {

using namespace flowgraph;

void BM_Haversine(benchmark::State& state) {
  Rng rng(1);
  std::vector<LonLat> points(1024);
  for (auto& p : points) p = {rng.uniform(-180, 180), rng.uniform(-90, 90)};
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& a = points[i % points.size()];
    const auto& b = points[(i * 7 + 3) % points.size()];
    benchmark::DoNotOptimize(haversine_distance(a, b));
    ++i;
  }
}
BENCHMARK(BM_Haversine);

void BM_ExtractItf(benchmark::State& state) {
  Rng rng(2);
  const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f", "g", "h"};
  std::vector<Trip> trips;
  for (std::size_t t = 0; t < static_cast<std::size_t>(state.range(0)); ++t) {
    Trip trip;
    trip.tourist_id = "t";
    const std::size_t len = 2 + rng.uniform_index(6);
    for (std::size_t k = 0; k < len; ++k) {
      trip.attractions.push_back(pool[rng.uniform_index(pool.size())]);
    }
    trips.push_back(std::move(trip));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_itf(trips));
  }
}
BENCHMARK(BM_ExtractItf)->Arg(1000)->Arg(10000);

struct EncodeFixture {
  SynthDataset data = synth_generate(80, 7, [] {
    SynthParams p;
    p.noise_sigma = 0.2;
    return p;
  }());
  InteractionGraph graph = [this] {
    split_dataset(data.truth, {0.6, 0.2, 0.2}, 7);
    std::vector<std::string> ids;
    for (const auto& a : data.attractions) ids.push_back(a.id);
    Eigen::MatrixXd features = Eigen::MatrixXd::Random(80, 10).cwiseAbs();
    return build_graph(data.truth, ids, features, 200.0);
  }();
};

void BM_GcnEncode(benchmark::State& state) {
  static EncodeFixture fixture;
  TrainConfig config;
  config.embed_dim = static_cast<std::size_t>(state.range(0));
  config.layers = 2;
  config.seed = 3;
  const auto model = init_gcn_model(10, DecoderKind::Bilinear, nn::EncodeMode::WithEdges, config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::encode(fixture.graph, model.encoder, nn::EncodeMode::WithEdges));
  }
}
BENCHMARK(BM_GcnEncode)->Arg(32)->Arg(128)->Arg(500);

void BM_ForestFit(benchmark::State& state) {
  Rng rng(4);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<double>> x(n, std::vector<double>(65));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x[i]) v = rng.uniform(0.0, 1.0);
    y[i] = rng.uniform(0.0, 500.0);
  }
  ForestConfig config;
  config.n_estimators = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Forest::fit(x, y, config, 5));
  }
}
BENCHMARK(BM_ForestFit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ForestPredict(benchmark::State& state) {
  Rng rng(5);
  std::vector<std::vector<double>> x(2000, std::vector<double>(65));
  std::vector<double> y(2000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (auto& v : x[i]) v = rng.uniform(0.0, 1.0);
    y[i] = rng.uniform(0.0, 500.0);
  }
  const auto forest = Forest::fit(x, y, {}, 6);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forest.predict(x[i % x.size()]));
    ++i;
  }
}
BENCHMARK(BM_ForestPredict);

void BM_BilinearScore(benchmark::State& state) {
  Rng rng(6);
  nn::Vec eu(500), ev(500), r(500);
  for (Eigen::Index i = 0; i < 500; ++i) {
    eu[i] = rng.uniform(-1, 1);
    ev[i] = rng.uniform(-1, 1);
    r[i] = rng.uniform(-1, 1);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::bilinear_score(eu, ev, r));
  }
}
BENCHMARK(BM_BilinearScore);

}  // namespace

BENCHMARK_MAIN();
