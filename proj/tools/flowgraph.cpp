// flowgraph: inter-attraction tourism flow prediction toolkit.
//
// Subcommands cover the full pipeline: ingest raw travel notes into a flow
// table, generate synthetic gravity-law data, train one of the six models,
// evaluate, explain the RF baseline with Shapley values, sweep the graph
// threshold, export a GeoJSON flow map and predict directed flows.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowgraph/error.hpp"
#include "flowgraph/pipeline.hpp"

namespace {

using namespace flowgraph;

struct CommonData {
  std::string attractions;
  std::string itf;
  std::string splits;
  std::string edges;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Flat key=value config support: values from the file are injected as
// "--key=value" arguments for any key not already given on the command
// line, so explicit flags always win.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config file: " + config_path);
  std::string line;
  while (std::getline(in, line)) {
    const std::string entry = trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line is not key=value: '" + entry + "'");
    }
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    if (key.empty() || key == "config") continue;
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& arg : args) {
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) {
        given = true;
        break;
      }
    }
    if (!given) args.push_back(flag + "=" + value);
  }
  return args;
}

void add_config(CLI::App* cmd) {
  cmd->add_option("--config", "flat key=value config file; flags win over file values");
}

void add_data_flags(CLI::App* cmd, CommonData& data, bool with_attractions = true) {
  if (with_attractions) {
    cmd->add_option("--attractions", data.attractions, "attractions.csv path")->required();
  }
  cmd->add_option("--itf", data.itf, "itf.csv path")->required();
  cmd->add_option("--splits", data.splits, "splits.csv path");
  cmd->add_option("--edges", data.edges, "edge-list csv overriding the threshold graph");
}

DatasetPaths to_paths(const CommonData& data) {
  DatasetPaths paths;
  paths.attractions = data.attractions;
  paths.itf = data.itf;
  paths.splits = data.splits;
  paths.edges = data.edges;
  return paths;
}

void print_ingest_stats(const IngestStats& s) {
  std::cout << "{\n"
            << "  \"n_attractions\": " << s.n_attractions << ",\n"
            << "  \"n_trips\": " << s.n_trips << ",\n"
            << "  \"mean_attractions_per_trip\": " << s.mean_attractions_per_trip << ",\n"
            << "  \"median_attractions_per_trip\": " << s.median_attractions_per_trip << ",\n"
            << "  \"n_pairs\": " << s.n_pairs << ",\n"
            << "  \"itf_mean\": " << s.itf_mean << ",\n"
            << "  \"itf_std\": " << s.itf_std << ",\n"
            << "  \"total_lines\": " << s.total_lines << ",\n"
            << "  \"malformed_lines\": " << s.malformed_lines << ",\n"
            << "  \"skipped_notes\": " << s.skipped_notes << "\n"
            << "}\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inter-attraction tourism flow prediction"};
  app.require_subcommand(1);

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "build itf.csv and splits.csv from travel notes");
  std::string in_trips, in_attractions, out_dir = ".";
  int window_days = 5;
  std::uint64_t seed = 0;
  bool directed = false;
  ingest->add_option("--trips", in_trips, "trips.jsonl path")->required();
  ingest->add_option("--attractions", in_attractions, "attractions.csv path")->required();
  ingest->add_option("--window-days", window_days, "note merge window in days");
  ingest->add_option("--seed", seed, "split seed")->envname("FLOWGRAPH_SEED");
  ingest->add_option("--out", out_dir, "output directory");
  ingest->add_flag("--directed", directed, "extract directed (consecutive-visit) flows");
  add_config(ingest);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic gravity-law dataset");
  std::size_t synth_n = 80;
  SynthParams synth_params;
  synth->add_option("--n", synth_n, "number of attractions (>= 10)");
  synth->add_option("--seed", seed, "generator seed")->envname("FLOWGRAPH_SEED");
  synth->add_option("--alpha", synth_params.alpha, "gravity mass exponent");
  synth->add_option("--beta", synth_params.beta, "gravity distance exponent");
  synth->add_option("--scale", synth_params.scale, "gravity scale factor");
  synth->add_option("--noise", synth_params.noise_sigma, "log-normal noise sigma");
  synth->add_option("--out", out_dir, "output directory");
  add_config(synth);

  // ---- train ----
  auto* train = app.add_subcommand("train", "train a model on an ingested dataset");
  CommonData train_data;
  RunConfig run;
  std::string model_kind = "si-gcn-rf";
  add_data_flags(train, train_data);
  train->add_option("--model", model_kind,
                    "rf | deep-gravity | gcn-rf | si-gcn | si-gcn-rf | si-gcn-rf-no-edge");
  train->add_option("--threshold", run.threshold, "interaction-graph flow threshold");
  train->add_option("--epochs", run.train.max_epochs, "max training epochs");
  train->add_option("--patience", run.train.patience, "early-stopping patience");
  train->add_option("--lr", run.train.lr, "Adam learning rate");
  train->add_option("--clip-norm", run.train.clip_max_norm, "gradient clip max norm");
  train->add_option("--dropout", run.train.dropout, "encoder activation dropout");
  train->add_option("--embed-dim", run.train.embed_dim, "embedding dimension D");
  train->add_option("--layers", run.train.layers, "graph convolution layers L");
  train->add_option("--mlp-hidden", run.train.mlp_hidden, "hidden width of MLP nets");
  train->add_option("--trees", run.forest.n_estimators, "forest size");
  train->add_option("--max-depth", run.forest.max_depth, "forest max depth (<=0 unlimited)");
  train->add_option("--seed", run.train.seed, "run seed")->envname("FLOWGRAPH_SEED");
  train->add_flag("--log1p", run.train.log1p_targets, "train on log1p counts");
  train->add_flag("--include-zero-pairs", run.include_zero_pairs,
                  "add never-co-visited pairs as zero targets (training only)");
  train->add_flag("--directed", run.directed, "directed DistMult extension (si-gcn only)");
  train->add_option("--out", out_dir, "output directory");
  add_config(train);

  // ---- evaluate ----
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a trained model on one split");
  CommonData eval_data;
  std::string model_path, split_name_arg = "test";
  evaluate->add_option("--model", model_path, "model.json path")->required();
  add_data_flags(evaluate, eval_data, /*with_attractions=*/false);
  evaluate->add_option("--split", split_name_arg, "train | val | test");
  evaluate->add_option("--out", out_dir, "output directory");
  add_config(evaluate);

  // ---- explain ----
  auto* explain = app.add_subcommand("explain", "Shapley attributions for an rf model");
  CommonData explain_data;
  ExplainOptions explain_options;
  std::string explain_mode = "sample";
  explain->add_option("--model", model_path, "model.json path (rf)")->required();
  add_data_flags(explain, explain_data, /*with_attractions=*/false);
  explain->add_option("--split", split_name_arg, "split to explain (default test)");
  explain->add_option("--mode", explain_mode, "exact | sample");
  explain->add_option("--background", explain_options.background_size, "background subsample cap");
  explain->add_option("--permutations", explain_options.n_permutations,
                      "permutations per instance in sample mode");
  explain->add_option("--instances", explain_options.max_instances, "instance cap (0 = all)");
  explain->add_option("--seed", explain_options.seed, "sampling seed")->envname("FLOWGRAPH_SEED");
  explain->add_option("--out", out_dir, "output directory");
  add_config(explain);

  // ---- sweep-threshold ----
  auto* sweep = app.add_subcommand("sweep-threshold", "validation metrics per graph threshold");
  CommonData sweep_data;
  std::vector<double> thresholds = {0, 50, 100, 200, 400};
  add_data_flags(sweep, sweep_data);
  sweep->add_option("--thresholds", thresholds, "threshold list");
  sweep->add_option("--epochs", run.train.max_epochs, "max training epochs");
  sweep->add_option("--patience", run.train.patience, "early-stopping patience");
  sweep->add_option("--lr", run.train.lr, "Adam learning rate");
  sweep->add_option("--clip-norm", run.train.clip_max_norm, "gradient clip max norm");
  sweep->add_option("--embed-dim", run.train.embed_dim, "embedding dimension D");
  sweep->add_option("--layers", run.train.layers, "graph convolution layers L");
  sweep->add_option("--seed", run.train.seed, "run seed")->envname("FLOWGRAPH_SEED");
  sweep->add_option("--out", out_dir, "output directory");
  add_config(sweep);

  // ---- export-flowmap ----
  auto* flowmap = app.add_subcommand("export-flowmap", "GeoJSON flow map of predictions");
  CommonData map_data;
  std::string map_split;
  flowmap->add_option("--model", model_path, "model.json path")->required();
  add_data_flags(flowmap, map_data, /*with_attractions=*/false);
  flowmap->add_option("--split", map_split, "restrict to one split (optional)");
  flowmap->add_option("--out", out_dir, "output directory");
  add_config(flowmap);

  // ---- predict ----
  auto* predict = app.add_subcommand("predict", "directed pair prediction (DistMult artifact)");
  std::string predict_src, predict_dst;
  predict->add_option("--model", model_path, "model.json path (directed)")->required();
  predict->add_option("--src", predict_src, "source attraction id")->required();
  predict->add_option("--dst", predict_dst, "destination attraction id")->required();
  add_config(predict);

  try {
    auto args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*ingest) {
      print_ingest_stats(cmd_ingest(in_trips, in_attractions, out_dir, window_days, seed, directed));
    } else if (*synth) {
      print_ingest_stats(cmd_synth(synth_n, seed, synth_params, out_dir));
    } else if (*train) {
      run.kind = model_kind_from_name(model_kind);
      const TrainOutput output = cmd_train(run, to_paths(train_data), out_dir);
      std::cout << "trained " << model_kind << ": " << output.history.epochs.size()
                << " epochs, best epoch " << output.history.best_epoch << ", best val mse "
                << output.history.best_val << "\n"
                << "wrote " << (std::filesystem::path(out_dir) / "model.json").string() << "\n";
    } else if (*evaluate) {
      const ModelArtifact artifact = load_model(model_path);
      const EvalReport report = cmd_evaluate(artifact, to_paths(eval_data),
                                             split_from_name(split_name_arg), out_dir);
      std::cout << report_to_json(artifact, split_from_name(split_name_arg), report);
    } else if (*explain) {
      explain_options.split = split_from_name(split_name_arg);
      if (explain_mode == "exact") {
        explain_options.exact = true;
      } else if (explain_mode != "sample") {
        throw ConfigError("--mode must be 'exact' or 'sample'");
      }
      const ModelArtifact artifact = load_model(model_path);
      const ExplainOutput output =
          cmd_explain(artifact, to_paths(explain_data), explain_options, out_dir);
      std::cout << "explained " << output.n_instances << " instances; top feature: "
                << (output.summary.empty() ? "-" : output.summary.front().feature) << "\n";
    } else if (*sweep) {
      const SweepResult result = cmd_sweep_threshold(run, to_paths(sweep_data), thresholds, out_dir);
      for (const auto& row : result.rows) {
        std::cout << "threshold " << row.threshold << ": ";
        if (row.eval) {
          std::cout << "val_mape " << row.eval->val_mape << ", val_cpc " << row.eval->val_cpc
                    << ", edges " << row.eval->n_edges << "\n";
        } else {
          std::cout << "training failed\n";
        }
      }
      if (result.best_threshold) {
        std::cout << "best threshold by val mape: " << *result.best_threshold << "\n";
      }
    } else if (*flowmap) {
      const ModelArtifact artifact = load_model(model_path);
      std::optional<Split> filter;
      if (!map_split.empty()) filter = split_from_name(map_split);
      const FlowmapStats stats = cmd_export_flowmap(artifact, to_paths(map_data), filter, out_dir);
      std::cout << "wrote " << stats.features_written << " features ("
                << stats.skipped << " skipped)\n";
    } else if (*predict) {
      const ModelArtifact artifact = load_model(model_path);
      std::cout << cmd_predict_directed(artifact, predict_src, predict_dst) << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
