#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flowgraph/metrics.hpp"
#include "flowgraph/model_io.hpp"
#include "flowgraph/shap.hpp"
#include "flowgraph/synth.hpp"

namespace flowgraph {

struct DatasetPaths {
  std::filesystem::path attractions;  // attractions.csv
  std::filesystem::path trips;        // trips.jsonl
  std::filesystem::path itf;          // itf.csv
  std::filesystem::path splits;       // splits.csv
  std::filesystem::path edges;        // optional edge-list override
};

struct RunConfig {
  ModelKind kind = ModelKind::SiGcnRf;
  double threshold = 200.0;
  TrainConfig train;
  ForestConfig forest;
  bool directed = false;
  bool include_zero_pairs = false;  // zero-count pairs as explicit training zeros
};

// Loaded and preprocessed dataset shared by the commands.
struct Workspace {
  std::vector<Attraction> attractions;  // sorted by id
  FeatureCodec codec;
  std::vector<std::string> ids;
  std::vector<LonLat> coords;
  Eigen::MatrixXd features;  // scaled, n x F
  FlowTable flows;           // with split labels
};

Workspace load_workspace(const DatasetPaths& paths, bool directed);

// ---------------------------------------------------------------------------
// Commands. Each writes its canonical files into out_dir and returns the
// in-memory result.
// ---------------------------------------------------------------------------

struct IngestStats {
  std::size_t n_attractions = 0;
  std::size_t n_trips = 0;
  double mean_attractions_per_trip = 0.0;
  double median_attractions_per_trip = 0.0;
  std::size_t n_pairs = 0;
  double itf_mean = 0.0;
  double itf_std = 0.0;
  std::size_t total_lines = 0;
  std::size_t malformed_lines = 0;
  std::size_t skipped_notes = 0;  // unparseable dates
};

// match -> merge(window) -> filter -> extract -> split; writes itf.csv and
// splits.csv. Fails when more than 10% of input lines are malformed.
IngestStats cmd_ingest(const std::filesystem::path& trips_jsonl,
                       const std::filesystem::path& attractions_csv,
                       const std::filesystem::path& out_dir, int window_days, std::uint64_t seed,
                       bool directed = false);

// Writes attractions.csv, itf.csv and splits.csv for a synthetic dataset.
IngestStats cmd_synth(std::size_t n, std::uint64_t seed, const SynthParams& params,
                      const std::filesystem::path& out_dir);

struct TrainOutput {
  ModelArtifact artifact;
  TrainHistory history;  // empty epoch list for the pure forest baseline
};

// Trains the configured model kind; writes model.json and history.csv.
TrainOutput cmd_train(const RunConfig& config, const DatasetPaths& paths,
                      const std::filesystem::path& out_dir);

// Evaluates on one split with predictions clamped at zero; writes report.json.
EvalReport cmd_evaluate(const ModelArtifact& artifact, const DatasetPaths& paths, Split split,
                        const std::filesystem::path& out_dir);

std::string report_to_json(const ModelArtifact& artifact, Split split, const EvalReport& report);

struct ExplainOptions {
  bool exact = false;              // default: permutation sampling
  std::size_t background_size = 256;
  std::size_t n_permutations = 200;
  std::size_t max_instances = 0;   // 0 = all pairs of the split
  Split split = Split::Test;
  std::uint64_t seed = 0;
};

struct ExplainOutput {
  std::vector<std::string> feature_names;
  std::vector<ShapSummaryRow> summary;  // pooled per-feature grouping
  std::size_t n_instances = 0;
};

// Shapley attributions for the RF baseline; writes shap_summary.csv and
// shap_points.csv.
ExplainOutput cmd_explain(const ModelArtifact& artifact, const DatasetPaths& paths,
                          const ExplainOptions& options, const std::filesystem::path& out_dir);

// Per-threshold si-gcn validation metrics; writes threshold_sweep.csv.
SweepResult cmd_sweep_threshold(const RunConfig& config, const DatasetPaths& paths,
                                const std::vector<double>& thresholds,
                                const std::filesystem::path& out_dir);

struct FlowmapStats {
  std::size_t features_written = 0;
  std::size_t skipped = 0;  // pairs with ids missing from the artifact
};

// GeoJSON FeatureCollection of LineStrings between attraction centers with
// true/predicted flows and a 5-bin quantile class; writes flows.geojson.
FlowmapStats cmd_export_flowmap(const ModelArtifact& artifact, const DatasetPaths& paths,
                                std::optional<Split> split_filter,
                                const std::filesystem::path& out_dir);

// Directed prediction through the DistMult decoder; requires a directed
// artifact.
double cmd_predict_directed(const ModelArtifact& artifact, const std::string& src,
                            const std::string& dst);

}  // namespace flowgraph
