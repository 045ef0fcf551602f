#include "flowgraph/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flowgraph/csv.hpp"
#include "flowgraph/error.hpp"
#include "flowgraph/rng.hpp"
#include "flowgraph/shap.hpp"

namespace flowgraph {

using nlohmann::json;
using nn::Mat;
using nn::Vec;

namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

struct SplitPairs {
  PairSet train, val, test;
};

// Index-space pair sets in canonical (stored) order; targets are raw counts.
SplitPairs index_pairs(const Workspace& ws) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ws.ids.size(); ++i) index[ws.ids[i]] = i;
  SplitPairs out;
  for (const auto& [key, flow] : ws.flows.pairs()) {
    const auto a = index.find(key.first);
    const auto b = index.find(key.second);
    if (a == index.end() || b == index.end()) {
      throw DataError("flow pair (" + key.first + ", " + key.second +
                      ") references an attraction missing from attractions.csv");
    }
    const LabeledPair pair{a->second, b->second, static_cast<double>(flow.count)};
    switch (flow.split) {
      case Split::Train: out.train.push_back(pair); break;
      case Split::Val: out.val.push_back(pair); break;
      case Split::Test: out.test.push_back(pair); break;
      case Split::Unknown: break;
    }
  }
  return out;
}

// All node pairs absent from the flow table, as explicit zero targets.
PairSet zero_pairs(const Workspace& ws) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ws.ids.size(); ++i) index[ws.ids[i]] = i;
  PairSet zeros;
  const std::size_t n = ws.ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = ws.flows.directed() ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      if (ws.flows.pairs().count(ws.flows.key(ws.ids[i], ws.ids[j])) == 0) {
        zeros.push_back({i, j, 0.0});
      }
    }
  }
  return zeros;
}

void apply_log1p(PairSet& pairs) {
  for (auto& p : pairs) p.y = std::log1p(p.y);
}

struct DistanceScale {
  double lo = 0.0;
  double hi = 0.0;
  double apply(double d) const { return hi == lo ? 0.0 : (d - lo) / (hi - lo); }
};

DistanceScale fit_distance_scale(const Workspace& ws, const PairSet& train_pairs) {
  if (train_pairs.empty()) throw ConfigError("no training pairs to fit the distance scale");
  DistanceScale s;
  bool first = true;
  for (const auto& p : train_pairs) {
    const double d = haversine_distance(ws.coords[p.i], ws.coords[p.j]);
    if (first) {
      s.lo = s.hi = d;
      first = false;
    } else {
      s.lo = std::min(s.lo, d);
      s.hi = std::max(s.hi, d);
    }
  }
  return s;
}

std::vector<double> row_copy(const Mat& m, std::size_t row) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out[static_cast<std::size_t>(c)] = m(static_cast<Eigen::Index>(row), c);
  }
  return out;
}

// Forest training rows over both orderings of every pair.
void build_forest_rows(const Mat& node_rows, const Workspace& ws, const PairSet& pairs,
                       const DistanceScale& dist, std::vector<std::vector<double>>& rows,
                       std::vector<double>& targets) {
  for (const auto& p : pairs) {
    const auto fi = row_copy(node_rows, p.i);
    const auto fj = row_copy(node_rows, p.j);
    const double d = dist.apply(haversine_distance(ws.coords[p.i], ws.coords[p.j]));
    rows.push_back(pair_features_raw(fi, fj, d));
    rows.push_back(pair_features_raw(fj, fi, d));
    targets.push_back(p.y);
    targets.push_back(p.y);
  }
}

Mat pair_feature_matrix(const Mat& node_rows, const Workspace& ws, const PairSet& pairs,
                        const DistanceScale& dist) {
  const auto f = static_cast<std::size_t>(node_rows.cols());
  Mat x(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(2 * f + 1));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    const double d = dist.apply(haversine_distance(ws.coords[p.i], ws.coords[p.j]));
    for (std::size_t c = 0; c < f; ++c) {
      x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) =
          node_rows(static_cast<Eigen::Index>(p.i), static_cast<Eigen::Index>(c));
      x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(f + c)) =
          node_rows(static_cast<Eigen::Index>(p.j), static_cast<Eigen::Index>(c));
    }
    x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(2 * f)) = d;
  }
  return x;
}

Vec target_vector(const PairSet& pairs) {
  Vec y(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t k = 0; k < pairs.size(); ++k) y[static_cast<Eigen::Index>(k)] = pairs[k].y;
  return y;
}

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
  csv::Table table;
  table.header = {"epoch", "train_mse", "val_mse"};
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    table.rows.push_back({std::to_string(e + 1), format_double(history.epochs[e].train_mse),
                          format_double(history.epochs[e].val_mse)});
  }
  csv::write_file(path, table);
}

std::vector<std::string> pair_feature_names() {
  std::vector<std::string> names;
  for (const auto& n : kFeatureNames) names.push_back(std::string(n) + "_i");
  for (const auto& n : kFeatureNames) names.push_back(std::string(n) + "_j");
  names.push_back("distance");
  return names;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

IngestStats flow_stats(const FlowTable& table) {
  IngestStats stats;
  stats.n_pairs = table.size();
  if (stats.n_pairs == 0) return stats;
  double sum = 0.0;
  for (const auto& [k, v] : table.pairs()) sum += static_cast<double>(v.count);
  stats.itf_mean = sum / static_cast<double>(stats.n_pairs);
  double ss = 0.0;
  for (const auto& [k, v] : table.pairs()) {
    const double d = static_cast<double>(v.count) - stats.itf_mean;
    ss += d * d;
  }
  stats.itf_std = std::sqrt(ss / static_cast<double>(stats.n_pairs));
  return stats;
}

}  // namespace

Workspace load_workspace(const DatasetPaths& paths, bool directed) {
  Workspace ws;
  ws.attractions = load_attractions_csv(paths.attractions);
  std::sort(ws.attractions.begin(), ws.attractions.end(),
            [](const Attraction& a, const Attraction& b) { return a.id < b.id; });
  ws.codec = FeatureCodec::fit(ws.attractions);

  const std::size_t n = ws.attractions.size();
  ws.ids.reserve(n);
  ws.coords.reserve(n);
  ws.features = Mat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = ws.attractions[i];
    ws.ids.push_back(a.id);
    ws.coords.push_back(a.coord());
    const auto row = ws.codec.feature_vector(a);
    for (std::size_t c = 0; c < row.size(); ++c) {
      ws.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c];
    }
  }

  ws.flows = load_itf_csv(paths.itf, directed);
  if (!paths.splits.empty() && std::filesystem::exists(paths.splits)) {
    load_splits_csv(paths.splits, ws.flows);
  }
  return ws;
}

IngestStats cmd_ingest(const std::filesystem::path& trips_jsonl,
                       const std::filesystem::path& attractions_csv,
                       const std::filesystem::path& out_dir, int window_days, std::uint64_t seed,
                       bool directed) {
  const auto attractions = load_attractions_csv(attractions_csv);
  const auto index = AliasIndex::build(attractions);

  NotesFile notes = load_notes_jsonl(trips_jsonl);
  if (notes.malformed_lines > 0) {
    std::string lines;
    for (std::size_t number : notes.malformed_line_numbers) {
      if (!lines.empty()) lines += ", ";
      lines += std::to_string(number);
    }
    std::cerr << "warning: " << notes.malformed_lines << " malformed note record(s) at line(s) "
              << lines << (notes.malformed_lines > notes.malformed_line_numbers.size() ? ", ..." : "")
              << "\n";
  }
  if (notes.total_lines > 0 && notes.malformed_lines * 10 > notes.total_lines) {
    throw DataError("more than 10% of note records are malformed (" +
                    std::to_string(notes.malformed_lines) + " of " +
                    std::to_string(notes.total_lines) + ")");
  }

  for (auto& record : notes.records) {
    record.mentions = match_attractions(record.mentions, index);
  }
  MergeResult merged = merge_notes(std::move(notes.records), window_days);
  const std::vector<Trip> trips = filter_trips(merged.trips);

  FlowTable table = directed ? extract_directed_itf(trips) : extract_itf(trips);
  split_dataset(table, {0.6, 0.2, 0.2}, seed);

  std::filesystem::create_directories(out_dir);
  save_itf_csv(out_dir / "itf.csv", table);
  save_splits_csv(out_dir / "splits.csv", table);

  IngestStats stats = flow_stats(table);
  stats.n_attractions = attractions.size();
  stats.n_trips = trips.size();
  stats.total_lines = notes.total_lines;
  stats.malformed_lines = notes.malformed_lines;
  stats.skipped_notes = merged.skipped_records;
  std::vector<double> per_trip;
  per_trip.reserve(trips.size());
  for (const auto& trip : trips) {
    std::vector<std::string> distinct = trip.attractions;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    per_trip.push_back(static_cast<double>(distinct.size()));
  }
  if (!per_trip.empty()) {
    stats.mean_attractions_per_trip =
        std::accumulate(per_trip.begin(), per_trip.end(), 0.0) / static_cast<double>(per_trip.size());
    stats.median_attractions_per_trip = median(per_trip);
  }
  return stats;
}

IngestStats cmd_synth(std::size_t n, std::uint64_t seed, const SynthParams& params,
                      const std::filesystem::path& out_dir) {
  SynthDataset data = synth_generate(n, seed, params);
  split_dataset(data.truth, {0.6, 0.2, 0.2}, derive_seed(seed, 0x5117));

  std::filesystem::create_directories(out_dir);
  save_attractions_csv(out_dir / "attractions.csv", data.attractions);
  save_itf_csv(out_dir / "itf.csv", data.truth);
  save_splits_csv(out_dir / "splits.csv", data.truth);

  IngestStats stats = flow_stats(data.truth);
  stats.n_attractions = data.attractions.size();
  return stats;
}

namespace {

std::vector<std::pair<std::string, std::string>> load_edge_list(
    const std::filesystem::path& path) {
  const csv::Table in = csv::read_file(path);
  if (in.header != std::vector<std::string>{"src_id", "dst_id"}) {
    throw DataError("edges.csv header mismatch in " + path.string());
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& row : in.rows) {
    if (row.size() != 2) throw DataError("edges.csv: bad row");
    edges.emplace_back(row[0], row[1]);
  }
  return edges;
}

InteractionGraph build_run_graph(const RunConfig& config, const DatasetPaths& paths,
                                 const Workspace& ws) {
  if (!paths.edges.empty() && std::filesystem::exists(paths.edges)) {
    return build_graph_from_edges(ws.ids, ws.features, load_edge_list(paths.edges),
                                  config.directed);
  }
  return build_graph(ws.flows, ws.ids, ws.features, config.threshold, config.directed);
}

}  // namespace

TrainOutput cmd_train(const RunConfig& config, const DatasetPaths& paths,
                      const std::filesystem::path& out_dir) {
  if (config.directed && config.kind != ModelKind::SiGcn) {
    throw ConfigError("directed mode is only available for the si-gcn (DistMult) model");
  }
  const Workspace ws = load_workspace(paths, config.directed);
  SplitPairs pairs = index_pairs(ws);
  if (pairs.train.empty()) throw ConfigError("training split is empty; run ingest first");

  const DistanceScale dist = fit_distance_scale(ws, pairs.train);
  if (config.include_zero_pairs) {
    PairSet zeros = zero_pairs(ws);
    pairs.train.insert(pairs.train.end(), zeros.begin(), zeros.end());
  }
  if (config.train.log1p_targets) {
    apply_log1p(pairs.train);
    apply_log1p(pairs.val);
  }

  TrainOutput output;
  ModelArtifact& artifact = output.artifact;
  artifact.kind = config.kind;
  artifact.directed = config.directed;
  artifact.codec = ws.codec;
  artifact.ids = ws.ids;
  artifact.coords = ws.coords;
  artifact.features = ws.features;
  artifact.threshold = config.threshold;
  artifact.dist_min = dist.lo;
  artifact.dist_max = dist.hi;
  artifact.config = config.train;
  artifact.seed = config.train.seed;

  const bool needs_graph = config.kind == ModelKind::GcnRf || config.kind == ModelKind::SiGcn ||
                           config.kind == ModelKind::SiGcnRf ||
                           config.kind == ModelKind::SiGcnRfNoEdge;
  const bool needs_val = needs_graph || config.kind == ModelKind::DeepGravity;
  if (needs_val && pairs.val.empty()) {
    throw ConfigError("validation split is empty; early stopping needs validation pairs");
  }

  std::filesystem::create_directories(out_dir);

  switch (config.kind) {
    case ModelKind::Rf: {
      std::vector<std::vector<double>> rows;
      std::vector<double> targets;
      build_forest_rows(ws.features, ws, pairs.train, dist, rows, targets);
      artifact.forest =
          Forest::fit(rows, targets, config.forest, derive_seed(config.train.seed, 0xf0));
      break;
    }
    case ModelKind::DeepGravity: {
      const Mat x_train = pair_feature_matrix(ws.features, ws, pairs.train, dist);
      const Mat x_val = pair_feature_matrix(ws.features, ws, pairs.val, dist);
      auto trained = train_mlp_regressor(x_train, target_vector(pairs.train), x_val,
                                         target_vector(pairs.val), 15, config.train);
      output.history = std::move(trained.history);
      artifact.mlp = std::move(trained.net);
      break;
    }
    case ModelKind::GcnRf:
    case ModelKind::SiGcn:
    case ModelKind::SiGcnRf:
    case ModelKind::SiGcnRfNoEdge: {
      const InteractionGraph graph = build_run_graph(config, paths, ws);
      for (const auto& e : graph.edges()) artifact.edges.push_back(e);

      const DecoderKind decoder = config.kind == ModelKind::GcnRf ? DecoderKind::Mlp
                                  : config.directed               ? DecoderKind::DistMult
                                                                  : DecoderKind::Bilinear;
      const nn::EncodeMode mode = config.kind == ModelKind::SiGcnRfNoEdge
                                      ? nn::EncodeMode::NoEdges
                                      : nn::EncodeMode::WithEdges;
      auto trained = train_gcn(graph, pairs.train, pairs.val, decoder, mode, config.train);
      output.history = std::move(trained.history);
      artifact.encoder = std::move(trained.model.encoder);
      switch (decoder) {
        case DecoderKind::Bilinear: artifact.bilinear = std::move(trained.model.bilinear); break;
        case DecoderKind::DistMult: artifact.distmult = std::move(trained.model.distmult); break;
        case DecoderKind::Mlp: artifact.mlp = std::move(trained.model.mlp); break;
      }

      if (config.kind != ModelKind::SiGcn && !output.history.diverged) {
        artifact.rebuild_caches();
        std::vector<std::vector<double>> rows;
        std::vector<double> targets;
        build_forest_rows(artifact.embeddings(), ws, pairs.train, dist, rows, targets);
        artifact.forest =
            Forest::fit(rows, targets, config.forest, derive_seed(config.train.seed, 0xf1));
      }
      break;
    }
  }

  write_history_csv(out_dir / "history.csv", output.history);
  if (output.history.diverged) {
    throw TrainingError("training diverged with non-finite loss", output.history.diverged_epoch);
  }
  artifact.rebuild_caches();
  save_model(artifact, out_dir / "model.json");
  return output;
}

namespace {

struct SplitData {
  std::vector<std::string> src, dst;
  std::vector<double> y_true;
  std::vector<double> y_pred;  // clamped at zero
};

SplitData predict_split(const ModelArtifact& artifact, const FlowTable& flows, Split split) {
  SplitData data;
  for (const auto& [key, flow] : flows.pairs()) {
    if (flow.split != split) continue;
    data.src.push_back(key.first);
    data.dst.push_back(key.second);
    data.y_true.push_back(static_cast<double>(flow.count));
    data.y_pred.push_back(std::max(0.0, artifact.predict(key.first, key.second)));
  }
  return data;
}

}  // namespace

std::string report_to_json(const ModelArtifact& artifact, Split split, const EvalReport& report) {
  json by_range = json::array();
  for (const auto& bin : report.by_range) {
    by_range.push_back({{"lo", bin.lo}, {"hi", bin.hi}, {"count", bin.count}, {"mape", bin.mape}});
  }
  const json j = {{"model", std::string(model_kind_name(artifact.kind))},
                  {"split", std::string(split_name(split))},
                  {"mse", report.mse},
                  {"mape", report.mape},
                  {"cpc", report.cpc},
                  {"n", report.n},
                  {"by_range", by_range}};
  return j.dump(2) + "\n";
}

EvalReport cmd_evaluate(const ModelArtifact& artifact, const DatasetPaths& paths, Split split,
                        const std::filesystem::path& out_dir) {
  FlowTable flows = load_itf_csv(paths.itf, artifact.directed);
  load_splits_csv(paths.splits, flows);
  const SplitData data = predict_split(artifact, flows, split);
  if (data.y_true.empty()) {
    throw DataError("split '" + std::string(split_name(split)) + "' holds no pairs");
  }
  const EvalReport report = evaluate_predictions(data.y_true, data.y_pred, 5);

  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir / "report.json");
  if (!out) throw DataError("cannot write report.json");
  out << report_to_json(artifact, split, report);
  return report;
}

ExplainOutput cmd_explain(const ModelArtifact& artifact, const DatasetPaths& paths,
                          const ExplainOptions& options, const std::filesystem::path& out_dir) {
  if (artifact.kind != ModelKind::Rf) {
    throw ConfigError("explain requires an rf artifact; feature attributions for GNN models "
                      "are out of scope");
  }
  FlowTable flows = load_itf_csv(paths.itf, artifact.directed);
  load_splits_csv(paths.splits, flows);

  const Forest& forest = *artifact.forest;
  const ModelFn model = [&](std::span<const double> row) { return forest.predict(row); };

  auto build_row = [&](const std::string& src, const std::string& dst) {
    const std::size_t i = artifact.index_of(src);
    const std::size_t j = artifact.index_of(dst);
    const Eigen::RowVectorXd fi = artifact.features.row(static_cast<Eigen::Index>(i));
    const Eigen::RowVectorXd fj = artifact.features.row(static_cast<Eigen::Index>(j));
    return pair_features_raw({fi.data(), static_cast<std::size_t>(fi.size())},
                             {fj.data(), static_cast<std::size_t>(fj.size())},
                             artifact.scaled_distance(i, j));
  };

  // Background: seeded subsample of training rows.
  std::vector<std::vector<double>> background;
  for (const auto& [key, flow] : flows.pairs()) {
    if (flow.split == Split::Train) background.push_back(build_row(key.first, key.second));
  }
  if (background.empty()) throw DataError("no training pairs available as SHAP background");
  if (background.size() > options.background_size) {
    Rng rng(derive_seed(options.seed, 0xb9));
    std::vector<std::size_t> order(background.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<std::vector<double>> sampled;
    sampled.reserve(options.background_size);
    for (std::size_t k = 0; k < options.background_size; ++k) {
      sampled.push_back(std::move(background[order[k]]));
    }
    background = std::move(sampled);
  }

  ExplainOutput output;
  output.feature_names = pair_feature_names();

  csv::Table points;
  points.header = {"instance_id", "feature", "feature_value", "phi"};
  std::vector<ShapResult> results;
  std::size_t instance_index = 0;
  for (const auto& [key, flow] : flows.pairs()) {
    if (flow.split != options.split) continue;
    if (options.max_instances > 0 && results.size() >= options.max_instances) break;
    const auto row = build_row(key.first, key.second);
    ShapResult result =
        options.exact ? shap_exact(model, row, background)
                      : shap_sample(model, row, background, options.n_permutations,
                                    derive_seed(options.seed, instance_index));
    const std::string instance_id = key.first + ":" + key.second;
    for (std::size_t f = 0; f < row.size(); ++f) {
      points.rows.push_back({instance_id, output.feature_names[f], format_double(row[f]),
                             format_double(result.phi[f])});
    }
    results.push_back(std::move(result));
    ++instance_index;
  }
  if (results.empty()) throw DataError("no instances in the requested split to explain");

  output.summary = aggregate_shap(results, output.feature_names, /*pool_pair_columns=*/true);
  output.n_instances = results.size();

  std::filesystem::create_directories(out_dir);
  csv::Table summary;
  summary.header = {"feature", "max_abs_phi", "mean_abs_phi"};
  for (const auto& row : output.summary) {
    summary.rows.push_back(
        {row.feature, format_double(row.max_abs_phi), format_double(row.mean_abs_phi)});
  }
  csv::write_file(out_dir / "shap_summary.csv", summary);
  csv::write_file(out_dir / "shap_points.csv", points);
  return output;
}

SweepResult cmd_sweep_threshold(const RunConfig& config, const DatasetPaths& paths,
                                const std::vector<double>& thresholds,
                                const std::filesystem::path& out_dir) {
  const Workspace ws = load_workspace(paths, /*directed=*/false);
  SplitPairs pairs = index_pairs(ws);
  if (pairs.train.empty() || pairs.val.empty()) {
    throw ConfigError("threshold sweep needs train and validation pairs");
  }
  PairSet train = pairs.train;
  PairSet val = pairs.val;
  if (config.train.log1p_targets) {
    apply_log1p(train);
    apply_log1p(val);
  }

  std::vector<double> val_true;
  for (const auto& p : pairs.val) val_true.push_back(p.y);

  const auto evaluate = [&](double threshold) -> SweepEval {
    const InteractionGraph graph = build_graph(ws.flows, ws.ids, ws.features, threshold, false);
    const auto trained = train_gcn(graph, train, val, DecoderKind::Bilinear,
                                   nn::EncodeMode::WithEdges, config.train);
    if (trained.history.diverged) {
      throw TrainingError("sweep training diverged", trained.history.diverged_epoch);
    }
    const Mat embeddings = nn::encode(graph, trained.model.encoder, nn::EncodeMode::WithEdges);
    std::vector<double> preds;
    preds.reserve(pairs.val.size());
    for (const auto& p : pairs.val) {
      double out = trained.model.predict_pair(embeddings, p.i, p.j);
      if (config.train.log1p_targets) out = std::expm1(out);
      preds.push_back(std::max(0.0, out));
    }
    SweepEval eval;
    eval.val_mape = mape(val_true, preds);
    eval.val_cpc = cpc(val_true, preds);
    eval.n_edges = graph.edge_count();
    return eval;
  };

  SweepResult result = sweep_threshold(thresholds, evaluate);

  std::filesystem::create_directories(out_dir);
  csv::Table table;
  table.header = {"threshold", "val_mape", "val_cpc", "n_edges"};
  for (const auto& row : result.rows) {
    if (row.eval) {
      table.rows.push_back({format_double(row.threshold), format_double(row.eval->val_mape),
                            format_double(row.eval->val_cpc), std::to_string(row.eval->n_edges)});
    } else {
      table.rows.push_back({format_double(row.threshold), "nan", "nan", "nan"});
    }
  }
  csv::write_file(out_dir / "threshold_sweep.csv", table);
  return result;
}

FlowmapStats cmd_export_flowmap(const ModelArtifact& artifact, const DatasetPaths& paths,
                                std::optional<Split> split_filter,
                                const std::filesystem::path& out_dir) {
  FlowTable flows = load_itf_csv(paths.itf, artifact.directed);
  if (!paths.splits.empty() && std::filesystem::exists(paths.splits)) {
    load_splits_csv(paths.splits, flows);
  }

  struct Row {
    std::string src, dst;
    double y_true = 0.0;
    double pred = 0.0;
  };
  FlowmapStats stats;
  std::vector<Row> rows;
  for (const auto& [key, flow] : flows.pairs()) {
    if (split_filter && flow.split != *split_filter) continue;
    try {
      const double pred = std::max(0.0, artifact.predict(key.first, key.second));
      rows.push_back({key.first, key.second, static_cast<double>(flow.count), pred});
    } catch (const DataError&) {
      ++stats.skipped;  // attraction missing from the artifact
    }
  }

  // Rank-based quantile class over predictions, 1..5.
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].pred < rows[b].pred; });
  std::vector<int> quantile_class(rows.size(), 1);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    quantile_class[order[rank]] = static_cast<int>(rank * 5 / std::max<std::size_t>(1, rows.size())) + 1;
  }

  json features = json::array();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    const std::size_t i = artifact.index_of(row.src);
    const std::size_t j = artifact.index_of(row.dst);
    json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {
        {"type", "LineString"},
        {"coordinates",
         {{artifact.coords[i].lon, artifact.coords[i].lat},
          {artifact.coords[j].lon, artifact.coords[j].lat}}}};
    feature["properties"] = {{"src", row.src},
                             {"dst", row.dst},
                             {"true", row.y_true},
                             {"pred", row.pred},
                             {"quantile_class", quantile_class[k]}};
    features.push_back(std::move(feature));
  }
  const json geojson = {{"type", "FeatureCollection"}, {"features", features}};

  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir / "flows.geojson");
  if (!out) throw DataError("cannot write flows.geojson");
  out << geojson.dump(2) << '\n';
  stats.features_written = rows.size();
  return stats;
}

double cmd_predict_directed(const ModelArtifact& artifact, const std::string& src,
                            const std::string& dst) {
  if (!artifact.directed || !artifact.distmult) {
    throw ConfigError("artifact is not a directed DistMult model");
  }
  return artifact.predict(src, dst);
}

}  // namespace flowgraph
