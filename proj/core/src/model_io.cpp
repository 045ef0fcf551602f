#include "flowgraph/model_io.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "flowgraph/error.hpp"

namespace flowgraph {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw DataError("model file matrix payload does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  Eigen::VectorXd v(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) v[static_cast<Eigen::Index>(i)] = data[i];
  return v;
}

json forest_to_json(const Forest& forest) {
  json j;
  j["n_estimators"] = forest.config().n_estimators;
  j["max_depth"] = forest.config().max_depth;
  j["min_samples_split"] = forest.config().min_samples_split;
  j["max_features"] = forest.config().max_features;
  j["bootstrap"] = forest.config().bootstrap;
  j["feature_count"] = forest.feature_count();
  json trees = json::array();
  for (const auto& tree : forest.trees()) {
    json t;
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value;
    std::vector<std::size_t> count;
    for (const auto& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(node.value);
      count.push_back(node.count);
    }
    t["feature"] = feature;
    t["threshold"] = threshold;
    t["left"] = left;
    t["right"] = right;
    t["value"] = value;
    t["count"] = count;
    trees.push_back(std::move(t));
  }
  j["trees"] = std::move(trees);
  return j;
}

Forest forest_from_json(const json& j) {
  ForestConfig config;
  config.n_estimators = j.at("n_estimators").get<std::size_t>();
  config.max_depth = j.at("max_depth").get<int>();
  config.min_samples_split = j.at("min_samples_split").get<std::size_t>();
  config.max_features = j.at("max_features").get<std::size_t>();
  config.bootstrap = j.at("bootstrap").get<bool>();
  std::vector<RegressionTree> trees;
  for (const auto& t : j.at("trees")) {
    const auto feature = t.at("feature").get<std::vector<int>>();
    const auto threshold = t.at("threshold").get<std::vector<double>>();
    const auto left = t.at("left").get<std::vector<int>>();
    const auto right = t.at("right").get<std::vector<int>>();
    const auto value = t.at("value").get<std::vector<double>>();
    const auto count = t.at("count").get<std::vector<std::size_t>>();
    RegressionTree tree;
    for (std::size_t i = 0; i < feature.size(); ++i) {
      tree.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i], count[i]});
    }
    trees.push_back(std::move(tree));
  }
  return Forest::from_parts(std::move(trees), config, j.at("feature_count").get<std::size_t>());
}

json mlp_to_json(const nn::MlpParams& mlp) {
  json j;
  json weights = json::array();
  json biases = json::array();
  json acts = json::array();
  for (const auto& w : mlp.weights) weights.push_back(matrix_to_json(w));
  for (const auto& b : mlp.biases) biases.push_back(vector_to_json(b));
  for (const auto a : mlp.activations) {
    acts.push_back(a == nn::Activation::LeakyRelu ? "leaky_relu" : "linear");
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  j["activations"] = std::move(acts);
  j["leaky_slope"] = mlp.leaky_slope;
  return j;
}

nn::MlpParams mlp_from_json(const json& j) {
  nn::MlpParams mlp;
  for (const auto& w : j.at("weights")) mlp.weights.push_back(matrix_from_json(w));
  for (const auto& b : j.at("biases")) mlp.biases.push_back(vector_from_json(b));
  for (const auto& a : j.at("activations")) {
    mlp.activations.push_back(a.get<std::string>() == "leaky_relu" ? nn::Activation::LeakyRelu
                                                                   : nn::Activation::Linear);
  }
  mlp.leaky_slope = j.at("leaky_slope").get<double>();
  return mlp;
}

json config_to_json(const TrainConfig& c) {
  json j;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["lr"] = c.lr;
  j["clip_max_norm"] = c.clip_max_norm;
  j["dropout"] = c.dropout;
  j["embed_dim"] = c.embed_dim;
  j["layers"] = c.layers;
  j["mlp_hidden"] = c.mlp_hidden;
  j["log1p_targets"] = c.log1p_targets;
  j["seed"] = c.seed;
  return j;
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.lr = j.at("lr").get<double>();
  c.clip_max_norm = j.at("clip_max_norm").get<double>();
  c.dropout = j.at("dropout").get<double>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.layers = j.at("layers").get<std::size_t>();
  c.mlp_hidden = j.at("mlp_hidden").get<std::size_t>();
  c.log1p_targets = j.at("log1p_targets").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::size_t ModelArtifact::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return i;
  }
  throw DataError("unknown attraction id '" + id + "'");
}

double ModelArtifact::scaled_distance(std::size_t i, std::size_t j) const {
  const double d = haversine_distance(coords[i], coords[j]);
  if (dist_max == dist_min) return 0.0;
  return (d - dist_min) / (dist_max - dist_min);
}

void ModelArtifact::rebuild_caches() {
  graph_cache_.reset();
  embed_cache_.reset();
  if (!encoder) return;
  std::vector<std::vector<std::size_t>> neighbors(ids.size());
  for (const auto& [a, b] : edges) {
    if (directed) {
      neighbors[b].push_back(a);  // in-neighbors
    } else {
      neighbors[a].push_back(b);
      neighbors[b].push_back(a);
    }
  }
  graph_cache_.emplace(ids, features, std::move(neighbors), directed);
  const nn::EncodeMode mode =
      kind == ModelKind::SiGcnRfNoEdge ? nn::EncodeMode::NoEdges : nn::EncodeMode::WithEdges;
  embed_cache_ = nn::encode(*graph_cache_, *encoder, mode);
}

const Eigen::MatrixXd& ModelArtifact::embeddings() const {
  if (!embed_cache_) throw Error("model caches not built; call rebuild_caches() first");
  return *embed_cache_;
}

double ModelArtifact::predict(const std::string& src, const std::string& dst) const {
  return predict_index(index_of(src), index_of(dst));
}

double ModelArtifact::predict_index(std::size_t i, std::size_t j) const {
  const double d = scaled_distance(i, j);
  double out = 0.0;
  switch (kind) {
    case ModelKind::Rf: {
      const Eigen::RowVectorXd fi = features.row(static_cast<Eigen::Index>(i));
      const Eigen::RowVectorXd fj = features.row(static_cast<Eigen::Index>(j));
      const std::span<const double> si(fi.data(), static_cast<std::size_t>(fi.size()));
      const std::span<const double> sj(fj.data(), static_cast<std::size_t>(fj.size()));
      out = predict_pair_symmetric(*forest, si, sj, d);
      break;
    }
    case ModelKind::DeepGravity: {
      const Eigen::RowVectorXd fi = features.row(static_cast<Eigen::Index>(i));
      const Eigen::RowVectorXd fj = features.row(static_cast<Eigen::Index>(j));
      const auto row = pair_features_raw({fi.data(), static_cast<std::size_t>(fi.size())},
                                         {fj.data(), static_cast<std::size_t>(fj.size())}, d);
      Eigen::VectorXd x(static_cast<Eigen::Index>(row.size()));
      for (std::size_t k = 0; k < row.size(); ++k) x[static_cast<Eigen::Index>(k)] = row[k];
      out = nn::mlp_forward(x, *mlp);
      break;
    }
    case ModelKind::SiGcn: {
      const Eigen::VectorXd ei = embeddings().row(static_cast<Eigen::Index>(i)).transpose();
      const Eigen::VectorXd ej = embeddings().row(static_cast<Eigen::Index>(j)).transpose();
      out = directed ? nn::distmult_score(ei, ej, distmult->r)
                     : nn::bilinear_score(ei, ej, bilinear->r);
      break;
    }
    case ModelKind::GcnRf:
    case ModelKind::SiGcnRf:
    case ModelKind::SiGcnRfNoEdge: {
      const Eigen::RowVectorXd ei = embeddings().row(static_cast<Eigen::Index>(i));
      const Eigen::RowVectorXd ej = embeddings().row(static_cast<Eigen::Index>(j));
      const std::span<const double> si(ei.data(), static_cast<std::size_t>(ei.size()));
      const std::span<const double> sj(ej.data(), static_cast<std::size_t>(ej.size()));
      out = predict_pair_symmetric(*forest, si, sj, d);
      break;
    }
  }
  if (config.log1p_targets) out = std::expm1(out);
  return out;
}

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path) {
  json j;
  j["format_version"] = artifact.format_version;
  j["model_kind"] = std::string(model_kind_name(artifact.kind));
  j["directed"] = artifact.directed;
  j["seed"] = artifact.seed;
  j["config"] = config_to_json(artifact.config);

  json prep;
  prep["adname_labels"] = artifact.codec.adname.labels();
  prep["type_labels"] = artifact.codec.type.labels();
  prep["scaler_min"] = artifact.codec.scaler.mins();
  prep["scaler_max"] = artifact.codec.scaler.maxs();
  prep["ids"] = artifact.ids;
  json coords = json::array();
  for (const auto& c : artifact.coords) coords.push_back({c.lon, c.lat});
  prep["coords"] = std::move(coords);
  prep["features"] = matrix_to_json(artifact.features);
  json edges = json::array();
  for (const auto& [a, b] : artifact.edges) edges.push_back({a, b});
  prep["edges"] = std::move(edges);
  prep["threshold"] = artifact.threshold;
  prep["dist_min"] = artifact.dist_min;
  prep["dist_max"] = artifact.dist_max;
  j["preprocessing"] = std::move(prep);

  if (artifact.encoder) {
    json enc;
    enc["input_proj"] = matrix_to_json(artifact.encoder->input_proj);
    json agg = json::array(), self = json::array();
    for (const auto& w : artifact.encoder->agg_weight) agg.push_back(matrix_to_json(w));
    for (const auto& w : artifact.encoder->self_weight) self.push_back(matrix_to_json(w));
    enc["agg_weight"] = std::move(agg);
    enc["self_weight"] = std::move(self);
    j["encoder"] = std::move(enc);
  }
  json dec;
  if (artifact.bilinear) dec["bilinear_r"] = vector_to_json(artifact.bilinear->r);
  if (artifact.distmult) dec["distmult_r"] = matrix_to_json(artifact.distmult->r);
  if (artifact.mlp) dec["mlp"] = mlp_to_json(*artifact.mlp);
  j["decoder"] = std::move(dec);
  if (artifact.forest) j["forest"] = forest_to_json(*artifact.forest);

  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path.string());
  out << j.dump(2) << '\n';
}

ModelArtifact load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed model file " + path.string() + ": " + e.what());
  }

  ModelArtifact artifact;
  artifact.format_version = j.at("format_version").get<int>();
  if (artifact.format_version != kModelFormatVersion) {
    throw DataError("unsupported model format version " +
                    std::to_string(artifact.format_version));
  }
  artifact.kind = model_kind_from_name(j.at("model_kind").get<std::string>());
  artifact.directed = j.at("directed").get<bool>();
  artifact.seed = j.at("seed").get<std::uint64_t>();
  artifact.config = config_from_json(j.at("config"));

  const json& prep = j.at("preprocessing");
  artifact.codec.adname =
      CategoryEncoder::from_labels(prep.at("adname_labels").get<std::vector<std::string>>());
  artifact.codec.type =
      CategoryEncoder::from_labels(prep.at("type_labels").get<std::vector<std::string>>());
  artifact.codec.scaler =
      FeatureScaler::from_bounds(prep.at("scaler_min").get<std::vector<double>>(),
                                 prep.at("scaler_max").get<std::vector<double>>());
  artifact.ids = prep.at("ids").get<std::vector<std::string>>();
  for (const auto& c : prep.at("coords")) {
    artifact.coords.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
  }
  artifact.features = matrix_from_json(prep.at("features"));
  for (const auto& e : prep.at("edges")) {
    artifact.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
  }
  artifact.threshold = prep.at("threshold").get<double>();
  artifact.dist_min = prep.at("dist_min").get<double>();
  artifact.dist_max = prep.at("dist_max").get<double>();

  if (j.contains("encoder")) {
    nn::EncoderParams enc;
    enc.input_proj = matrix_from_json(j["encoder"].at("input_proj"));
    for (const auto& w : j["encoder"].at("agg_weight")) enc.agg_weight.push_back(matrix_from_json(w));
    for (const auto& w : j["encoder"].at("self_weight")) enc.self_weight.push_back(matrix_from_json(w));
    artifact.encoder = std::move(enc);
  }
  const json& dec = j.at("decoder");
  if (dec.contains("bilinear_r")) artifact.bilinear = nn::BilinearParams{vector_from_json(dec["bilinear_r"])};
  if (dec.contains("distmult_r")) artifact.distmult = nn::DistMultParams{matrix_from_json(dec["distmult_r"])};
  if (dec.contains("mlp")) artifact.mlp = mlp_from_json(dec["mlp"]);
  if (j.contains("forest")) artifact.forest = forest_from_json(j["forest"]);

  artifact.rebuild_caches();
  return artifact;
}

}  // namespace flowgraph
