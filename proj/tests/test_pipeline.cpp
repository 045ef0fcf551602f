#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flowgraph/error.hpp"
#include "flowgraph/pipeline.hpp"

using namespace flowgraph;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small synthetic dataset shared by the pipeline tests.
DatasetPaths make_dataset(const fs::path& dir, std::size_t n = 14, std::uint64_t seed = 7) {
  SynthParams params;
  params.noise_sigma = 0.1;
  cmd_synth(n, seed, params, dir);
  DatasetPaths paths;
  paths.attractions = dir / "attractions.csv";
  paths.itf = dir / "itf.csv";
  paths.splits = dir / "splits.csv";
  return paths;
}

RunConfig tiny_config(ModelKind kind, std::uint64_t seed = 5) {
  RunConfig run;
  run.kind = kind;
  run.threshold = 50.0;
  run.train.embed_dim = 6;
  run.train.layers = 1;
  run.train.max_epochs = 60;
  run.train.patience = 30;
  run.train.mlp_hidden = 8;
  run.train.seed = seed;
  run.forest.n_estimators = 8;
  run.forest.max_depth = 10;
  return run;
}

}  // namespace

TEST_CASE("every model kind trains, saves, reloads and reproduces predictions") {
  TempDir tmp("flowgraph_pipeline_zoo");
  const auto paths = make_dataset(tmp.path / "data");

  for (const ModelKind kind : {ModelKind::Rf, ModelKind::DeepGravity, ModelKind::GcnRf,
                               ModelKind::SiGcn, ModelKind::SiGcnRf, ModelKind::SiGcnRfNoEdge}) {
    CAPTURE(model_kind_name(kind));
    const fs::path out = tmp.path / std::string(model_kind_name(kind));
    const auto output = cmd_train(tiny_config(kind), paths, out);
    CHECK(fs::exists(out / "model.json"));
    CHECK(fs::exists(out / "history.csv"));

    const auto loaded = load_model(out / "model.json");
    CHECK(loaded.kind == kind);
    for (std::size_t i = 0; i < loaded.ids.size(); ++i) {
      for (std::size_t j = 0; j < loaded.ids.size(); ++j) {
        if (i == j) continue;
        CHECK(loaded.predict_index(i, j) == output.artifact.predict_index(i, j));
      }
    }

    // every kind supports the same evaluate interface
    const auto report = cmd_evaluate(loaded, paths, Split::Test, out);
    CHECK(report.n > 0);
    CHECK(fs::exists(out / "report.json"));
  }
}

TEST_CASE("undirected predictions are symmetric") {
  TempDir tmp("flowgraph_pipeline_sym");
  const auto paths = make_dataset(tmp.path / "data");

  const auto sigcn = cmd_train(tiny_config(ModelKind::SiGcn), paths, tmp.path / "sigcn");
  const auto sigcnrf = cmd_train(tiny_config(ModelKind::SiGcnRf), paths, tmp.path / "sigcnrf");
  const auto& ids = sigcn.artifact.ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      CHECK(sigcn.artifact.predict_index(i, j) == sigcn.artifact.predict_index(j, i));
      CHECK(std::abs(sigcnrf.artifact.predict_index(i, j) -
                     sigcnrf.artifact.predict_index(j, i)) < 1e-12);
    }
  }
}

TEST_CASE("training and evaluation are byte-deterministic") {
  TempDir tmp("flowgraph_pipeline_det");
  const auto paths = make_dataset(tmp.path / "data");

  cmd_train(tiny_config(ModelKind::SiGcnRf), paths, tmp.path / "a");
  cmd_train(tiny_config(ModelKind::SiGcnRf), paths, tmp.path / "b");
  CHECK(slurp(tmp.path / "a" / "model.json") == slurp(tmp.path / "b" / "model.json"));
  CHECK(slurp(tmp.path / "a" / "history.csv") == slurp(tmp.path / "b" / "history.csv"));

  const auto artifact = load_model(tmp.path / "a" / "model.json");
  cmd_evaluate(artifact, paths, Split::Test, tmp.path / "a");
  cmd_evaluate(artifact, paths, Split::Test, tmp.path / "b");
  CHECK(slurp(tmp.path / "a" / "report.json") == slurp(tmp.path / "b" / "report.json"));
}

TEST_CASE("removing a test pair never changes the trained artifact") {
  TempDir tmp("flowgraph_pipeline_leak");
  const auto paths = make_dataset(tmp.path / "data");
  cmd_train(tiny_config(ModelKind::SiGcnRf), paths, tmp.path / "full");

  // drop one test-split pair from the dataset files
  FlowTable flows = load_itf_csv(paths.itf, false);
  load_splits_csv(paths.splits, flows);
  auto victim = flows.pairs().end();
  for (auto it = flows.pairs().begin(); it != flows.pairs().end(); ++it) {
    if (it->second.split == Split::Test) {
      victim = it;
      break;
    }
  }
  REQUIRE(victim != flows.pairs().end());
  flows.pairs().erase(victim);

  const fs::path data2 = tmp.path / "data2";
  fs::create_directories(data2);
  fs::copy_file(paths.attractions, data2 / "attractions.csv");
  save_itf_csv(data2 / "itf.csv", flows);
  save_splits_csv(data2 / "splits.csv", flows);
  DatasetPaths paths2;
  paths2.attractions = data2 / "attractions.csv";
  paths2.itf = data2 / "itf.csv";
  paths2.splits = data2 / "splits.csv";

  cmd_train(tiny_config(ModelKind::SiGcnRf), paths2, tmp.path / "pruned");
  CHECK(slurp(tmp.path / "full" / "model.json") == slurp(tmp.path / "pruned" / "model.json"));
}

TEST_CASE("report.json carries exactly the documented schema") {
  TempDir tmp("flowgraph_pipeline_schema");
  const auto paths = make_dataset(tmp.path / "data");
  cmd_train(tiny_config(ModelKind::Rf), paths, tmp.path / "rf");
  const auto artifact = load_model(tmp.path / "rf" / "model.json");
  cmd_evaluate(artifact, paths, Split::Val, tmp.path / "rf");

  const auto j = nlohmann::json::parse(slurp(tmp.path / "rf" / "report.json"));
  std::set<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.insert(k);
  CHECK(keys == std::set<std::string>{"model", "split", "mse", "mape", "cpc", "n", "by_range"});
  CHECK(j["model"] == "rf");
  CHECK(j["split"] == "val");
  REQUIRE(j["by_range"].is_array());
  for (const auto& bin : j["by_range"]) {
    std::set<std::string> bin_keys;
    for (const auto& [k, v] : bin.items()) bin_keys.insert(k);
    CHECK(bin_keys == std::set<std::string>{"lo", "hi", "count", "mape"});
  }
}

TEST_CASE("evaluate rejects pairs with unknown attraction ids") {
  TempDir tmp("flowgraph_pipeline_unknown");
  const auto paths = make_dataset(tmp.path / "data");
  cmd_train(tiny_config(ModelKind::Rf), paths, tmp.path / "rf");
  const auto artifact = load_model(tmp.path / "rf" / "model.json");

  FlowTable flows = load_itf_csv(paths.itf, false);
  load_splits_csv(paths.splits, flows);
  flows.add("zzz_unknown", "a000", 5);
  flows.pairs().at(flows.key("zzz_unknown", "a000")).split = Split::Test;
  save_itf_csv(tmp.path / "data" / "itf.csv", flows);
  save_splits_csv(tmp.path / "data" / "splits.csv", flows);

  CHECK_THROWS_AS(cmd_evaluate(artifact, paths, Split::Test, tmp.path / "rf"), DataError);
}

TEST_CASE("ingest pipeline: match, merge, filter, extract, split") {
  TempDir tmp("flowgraph_pipeline_ingest");
  std::vector<Attraction> attractions;
  for (const auto& [id, name] : std::vector<std::pair<std::string, std::string>>{
           {"fc", "Forbidden City"}, {"th", "Temple of Heaven"}, {"sp", "Summer Palace"}}) {
    Attraction a;
    a.id = id;
    a.name = name;
    a.lon = 116.4;
    a.lat = 39.9;
    a.adname = "dongcheng";
    a.type = "historical sites";
    a.level = "5A";
    a.ranking = 4.8;
    a.est_visit_time = 3.0;
    attractions.push_back(a);
  }
  attractions[0].aliases = {"Gugong"};
  save_attractions_csv(tmp.path / "attractions.csv", attractions);

  // trips from the worked example: [fc,th,sp] and [th,fc] -> 3 pair rows
  std::ofstream notes(tmp.path / "trips.jsonl");
  notes << R"({"tourist_id":"u1","posted_date":"2021-05-01","mentions":["Gugong","Temple of Heaven"]})" << "\n";
  notes << R"({"tourist_id":"u1","posted_date":"2021-05-03","mentions":["Summer Palace"]})" << "\n";
  notes << R"({"tourist_id":"u2","posted_date":"2021-06-01","mentions":["Temple of Heaven","Forbidden City"]})" << "\n";
  notes << R"({"tourist_id":"u3","posted_date":"2021-07-01","mentions":["Nowhere"]})" << "\n";
  notes.close();

  const auto stats = cmd_ingest(tmp.path / "trips.jsonl", tmp.path / "attractions.csv",
                                tmp.path / "out", 5, 9);
  CHECK(stats.n_attractions == 3);
  CHECK(stats.n_trips == 2);  // u3's trip has < 2 attractions
  CHECK(stats.n_pairs == 3);  // fc-th:2, fc-sp:1, th-sp:1
  CHECK(stats.mean_attractions_per_trip == doctest::Approx(2.5));
  CHECK(stats.median_attractions_per_trip == doctest::Approx(2.5));

  const auto table = load_itf_csv(tmp.path / "out" / "itf.csv", false);
  CHECK(table.pairs().at(table.key("fc", "th")).count == 2);
  CHECK(table.pairs().at(table.key("fc", "sp")).count == 1);

  // rerun with the same seed: byte-identical splits
  const auto first = slurp(tmp.path / "out" / "splits.csv");
  cmd_ingest(tmp.path / "trips.jsonl", tmp.path / "attractions.csv", tmp.path / "out2", 5, 9);
  CHECK(first == slurp(tmp.path / "out2" / "splits.csv"));
}

TEST_CASE("ingest fails when more than 10% of lines are malformed") {
  TempDir tmp("flowgraph_pipeline_malformed");
  std::vector<Attraction> attractions;
  Attraction a;
  a.id = "x";
  a.name = "X";
  a.lon = 116.4;
  a.lat = 39.9;
  a.adname = "d";
  a.type = "historical sites";
  a.level = "2A";
  a.ranking = 4.0;
  a.est_visit_time = 1.0;
  attractions.push_back(a);
  a.id = "y";
  a.name = "Y";
  attractions.push_back(a);
  save_attractions_csv(tmp.path / "attractions.csv", attractions);

  std::ofstream notes(tmp.path / "trips.jsonl");
  notes << R"({"tourist_id":"u","posted_date":"2021-05-01","mentions":["X","Y"]})" << "\n";
  notes << "not json at all\n";
  notes.close();

  CHECK_THROWS_AS(
      cmd_ingest(tmp.path / "trips.jsonl", tmp.path / "attractions.csv", tmp.path / "out", 5, 1),
      DataError);
}

TEST_CASE("explain runs on the rf artifact and refuses exact mode at 21 features") {
  TempDir tmp("flowgraph_pipeline_explain");
  const auto paths = make_dataset(tmp.path / "data");
  cmd_train(tiny_config(ModelKind::Rf), paths, tmp.path / "rf");
  const auto artifact = load_model(tmp.path / "rf" / "model.json");

  ExplainOptions options;
  options.n_permutations = 20;
  options.background_size = 16;
  options.max_instances = 4;
  options.seed = 3;
  const auto output = cmd_explain(artifact, paths, options, tmp.path / "rf");
  CHECK(output.n_instances == 4);
  CHECK(fs::exists(tmp.path / "rf" / "shap_summary.csv"));
  CHECK(fs::exists(tmp.path / "rf" / "shap_points.csv"));
  // pooled grouping: 10 feature names + distance
  CHECK(output.summary.size() == kFeatureCount + 1);
  for (std::size_t k = 1; k < output.summary.size(); ++k) {
    CHECK(output.summary[k - 1].max_abs_phi >= output.summary[k].max_abs_phi);
  }

  ExplainOptions exact = options;
  exact.exact = true;
  CHECK_THROWS_AS(cmd_explain(artifact, paths, exact, tmp.path / "rf"), ConfigError);

  // deterministic given a fixed seed
  const auto again = cmd_explain(artifact, paths, options, tmp.path / "rf2");
  for (std::size_t k = 0; k < output.summary.size(); ++k) {
    CHECK(again.summary[k].feature == output.summary[k].feature);
    CHECK(again.summary[k].max_abs_phi == output.summary[k].max_abs_phi);
  }

  // explain is rf-only
  cmd_train(tiny_config(ModelKind::SiGcn), paths, tmp.path / "sigcn");
  const auto gnn = load_model(tmp.path / "sigcn" / "model.json");
  CHECK_THROWS_AS(cmd_explain(gnn, paths, options, tmp.path / "x"), ConfigError);
}

TEST_CASE("threshold sweep writes one row per threshold") {
  TempDir tmp("flowgraph_pipeline_sweep");
  const auto paths = make_dataset(tmp.path / "data");
  auto run = tiny_config(ModelKind::SiGcn);
  run.train.max_epochs = 30;
  run.train.patience = 15;

  const auto result = cmd_sweep_threshold(run, paths, {0, 50, 100, 200}, tmp.path / "sweep");
  REQUIRE(result.rows.size() == 4);
  std::size_t previous_edges = SIZE_MAX;
  for (const auto& row : result.rows) {
    REQUIRE(row.eval.has_value());
    CHECK(std::isfinite(row.eval->val_mape));
    CHECK(row.eval->n_edges <= previous_edges);
    previous_edges = row.eval->n_edges;
  }
  CHECK(result.best_threshold.has_value());

  const auto csv_text = slurp(tmp.path / "sweep" / "threshold_sweep.csv");
  CHECK(csv_text.find("threshold,val_mape,val_cpc,n_edges") == 0);
}

TEST_CASE("flow map export writes LineStrings with quantile classes") {
  TempDir tmp("flowgraph_pipeline_map");
  const auto paths = make_dataset(tmp.path / "data");
  cmd_train(tiny_config(ModelKind::Rf), paths, tmp.path / "rf");
  const auto artifact = load_model(tmp.path / "rf" / "model.json");

  const auto stats = cmd_export_flowmap(artifact, paths, Split::Test, tmp.path / "map");
  CHECK(stats.skipped == 0);
  const auto geo = nlohmann::json::parse(slurp(tmp.path / "map" / "flows.geojson"));
  CHECK(geo["type"] == "FeatureCollection");
  REQUIRE(geo["features"].is_array());
  CHECK(geo["features"].size() == stats.features_written);
  for (const auto& feature : geo["features"]) {
    CHECK(feature["geometry"]["type"] == "LineString");
    REQUIRE(feature["geometry"]["coordinates"].size() == 2);
    const int qc = feature["properties"]["quantile_class"].get<int>();
    CHECK(qc >= 1);
    CHECK(qc <= 5);
    const std::string src = feature["properties"]["src"].get<std::string>();
    const std::size_t i = artifact.index_of(src);
    CHECK(feature["geometry"]["coordinates"][0][0].get<double>() == artifact.coords[i].lon);
    CHECK(feature["geometry"]["coordinates"][0][1].get<double>() == artifact.coords[i].lat);
    CHECK(feature["properties"]["pred"].get<double>() >= 0.0);
  }
}

TEST_CASE("directed extension: DistMult training on directed flows") {
  TempDir tmp("flowgraph_pipeline_directed");
  // directed dataset derived from a small synthetic one: asymmetric counts
  SynthParams params;
  const auto data = synth_generate(12, 11, params);
  save_attractions_csv(tmp.path / "attractions.csv", data.attractions);
  FlowTable directed(true);
  std::size_t k = 0;
  for (const auto& [key, flow] : data.truth.pairs()) {
    directed.add(key.first, key.second, flow.count);
    if (k % 2 == 0) directed.add(key.second, key.first, std::max<std::int64_t>(1, flow.count / 2));
    ++k;
  }
  split_dataset(directed, {0.6, 0.2, 0.2}, 3);
  save_itf_csv(tmp.path / "itf.csv", directed);
  save_splits_csv(tmp.path / "splits.csv", directed);

  DatasetPaths paths;
  paths.attractions = tmp.path / "attractions.csv";
  paths.itf = tmp.path / "itf.csv";
  paths.splits = tmp.path / "splits.csv";

  auto run = tiny_config(ModelKind::SiGcn, 17);
  run.directed = true;
  run.train.max_epochs = 100;
  run.train.patience = 99;
  const auto output = cmd_train(run, paths, tmp.path / "directed");

  // training smoke: loss decreases over the first 100 epochs
  REQUIRE(output.history.epochs.size() >= 2);
  CHECK(output.history.best_val < output.history.epochs.front().val_mse);
  CHECK(output.history.epochs.back().train_mse < output.history.epochs.front().train_mse);

  const auto artifact = load_model(tmp.path / "directed" / "model.json");
  CHECK(artifact.directed);
  const double forward = cmd_predict_directed(artifact, artifact.ids[0], artifact.ids[1]);
  const double backward = cmd_predict_directed(artifact, artifact.ids[1], artifact.ids[0]);
  CHECK(std::isfinite(forward));
  CHECK(forward != backward);  // asymmetric in general

  // undirected artifacts are rejected
  const auto undirected_paths = make_dataset(tmp.path / "udata");
  cmd_train(tiny_config(ModelKind::SiGcn), undirected_paths, tmp.path / "undirected");
  const auto undirected = load_model(tmp.path / "undirected" / "model.json");
  CHECK_THROWS_AS(cmd_predict_directed(undirected, undirected.ids[0], undirected.ids[1]),
                  ConfigError);

  // directed mode is an si-gcn extension only
  auto bad = tiny_config(ModelKind::SiGcnRf);
  bad.directed = true;
  CHECK_THROWS_AS(cmd_train(bad, paths, tmp.path / "bad"), ConfigError);
}

TEST_CASE("an edge-list file overrides the thresholded graph") {
  TempDir tmp("flowgraph_pipeline_edges");
  auto paths = make_dataset(tmp.path / "data");

  std::ofstream edges(tmp.path / "edges.csv");
  edges << "src_id,dst_id\n";
  edges << "a000,a001\n";
  edges << "a002,a003\n";
  edges.close();
  paths.edges = tmp.path / "edges.csv";

  const auto output = cmd_train(tiny_config(ModelKind::SiGcn), paths, tmp.path / "out");
  CHECK(output.artifact.edges.size() == 2);
  CHECK(output.artifact.edges[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(output.artifact.edges[1] == std::pair<std::size_t, std::size_t>{2, 3});
}

TEST_CASE("log1p target transform round-trips through prediction") {
  TempDir tmp("flowgraph_pipeline_log1p");
  const auto paths = make_dataset(tmp.path / "data");

  auto run = tiny_config(ModelKind::Rf);
  run.train.log1p_targets = true;
  cmd_train(run, paths, tmp.path / "log");
  const auto logged = load_model(tmp.path / "log" / "model.json");
  CHECK(logged.config.log1p_targets);

  cmd_train(tiny_config(ModelKind::Rf), paths, tmp.path / "raw");
  const auto raw = load_model(tmp.path / "raw" / "model.json");
  CHECK(slurp(tmp.path / "log" / "model.json") != slurp(tmp.path / "raw" / "model.json"));

  // forest leaves hold log1p counts; predictions come back on the count scale
  FlowTable flows = load_itf_csv(paths.itf, false);
  double max_count = 0.0;
  for (const auto& [k, v] : flows.pairs()) max_count = std::max(max_count, double(v.count));
  double max_leaf = 0.0;
  for (const auto& tree : logged.forest->trees()) {
    for (const auto& node : tree.nodes) max_leaf = std::max(max_leaf, node.value);
  }
  CHECK(max_leaf < std::log1p(max_count) + 1e-9);
  const double pred = logged.predict(logged.ids[0], logged.ids[1]);
  CHECK(pred > max_leaf);  // expm1 applied

  const auto report = cmd_evaluate(logged, paths, Split::Test, tmp.path / "log");
  CHECK(std::isfinite(report.mape));
}

TEST_CASE("zero pairs can be included as training targets") {
  TempDir tmp("flowgraph_pipeline_zeros");
  const auto paths = make_dataset(tmp.path / "data");

  auto with = tiny_config(ModelKind::Rf);
  with.include_zero_pairs = true;
  auto without = tiny_config(ModelKind::Rf);

  cmd_train(without, paths, tmp.path / "plain");
  cmd_train(with, paths, tmp.path / "zeros");
  // identical data except for the augmentation -> different forests unless
  // every pair already exists (synthetic tables usually cover all pairs, so
  // force a gap first)
  FlowTable flows = load_itf_csv(paths.itf, false);
  load_splits_csv(paths.splits, flows);
  if (flows.size() == 14 * 13 / 2) {
    auto it = flows.pairs().begin();
    std::advance(it, 3);
    flows.pairs().erase(it);
    save_itf_csv(tmp.path / "data" / "itf.csv", flows);
    save_splits_csv(tmp.path / "data" / "splits.csv", flows);
    cmd_train(without, paths, tmp.path / "plain");
    cmd_train(with, paths, tmp.path / "zeros");
  }
  CHECK(slurp(tmp.path / "plain" / "model.json") != slurp(tmp.path / "zeros" / "model.json"));
}

#ifdef FLOWGRAPH_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FLOWGRAPH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("cli: config file values apply and flags win") {
  TempDir tmp("flowgraph_cli_config");
  const auto paths = make_dataset(tmp.path / "data");

  std::ofstream config(tmp.path / "run.cfg");
  config << "attractions=" << paths.attractions.string() << "\n";
  config << "itf=" << paths.itf.string() << "\n";
  config << "splits=" << paths.splits.string() << "\n";
  config << "model=rf\n";
  config << "trees=4\n";
  config << "seed=5\n";
  config.close();

  REQUIRE(run_cli("train --config " + (tmp.path / "run.cfg").string() + " --out " +
                  (tmp.path / "a").string()) == 0);
  const auto a = load_model(tmp.path / "a" / "model.json");
  CHECK(a.kind == ModelKind::Rf);
  CHECK(a.forest->trees().size() == 4);

  // the flag overrides the config file value
  REQUIRE(run_cli("train --config " + (tmp.path / "run.cfg").string() + " --trees 6 --out " +
                  (tmp.path / "b").string()) == 0);
  const auto b = load_model(tmp.path / "b" / "model.json");
  CHECK(b.forest->trees().size() == 6);
}

TEST_CASE("cli: FLOWGRAPH_SEED is the seed fallback") {
  TempDir tmp("flowgraph_cli_seed");
  const auto paths = make_dataset(tmp.path / "data");
  const std::string base = "train --model rf --attractions " + paths.attractions.string() +
                           " --itf " + paths.itf.string() + " --splits " + paths.splits.string();

  const std::string env_cmd = "FLOWGRAPH_SEED=123 " + std::string(FLOWGRAPH_CLI_PATH) + " " +
                              base + " --out " + (tmp.path / "env").string() + " > /dev/null 2>&1";
  REQUIRE(std::system(env_cmd.c_str()) == 0);
  REQUIRE(run_cli(base + " --seed 123 --out " + (tmp.path / "flag").string()) == 0);
  CHECK(slurp(tmp.path / "env" / "model.json") == slurp(tmp.path / "flag" / "model.json"));

  // explicit flag beats the environment
  const std::string both_cmd = "FLOWGRAPH_SEED=123 " + std::string(FLOWGRAPH_CLI_PATH) + " " +
                               base + " --seed 77 --out " + (tmp.path / "both").string() +
                               " > /dev/null 2>&1";
  REQUIRE(std::system(both_cmd.c_str()) == 0);
  REQUIRE(run_cli(base + " --seed 77 --out " + (tmp.path / "ref").string()) == 0);
  CHECK(slurp(tmp.path / "both" / "model.json") == slurp(tmp.path / "ref" / "model.json"));
  CHECK(slurp(tmp.path / "both" / "model.json") != slurp(tmp.path / "env" / "model.json"));
}
#endif  // FLOWGRAPH_CLI_PATH
