#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flowgraph/encode.hpp"
#include "flowgraph/forest.hpp"
#include "flowgraph/graph.hpp"
#include "flowgraph/train.hpp"

namespace flowgraph {

inline constexpr int kModelFormatVersion = 1;

// Self-contained trained model: preprocessing state, node data, graph edges
// and learned parameters. Loading an artifact reproduces predictions exactly.
struct ModelArtifact {
  int format_version = kModelFormatVersion;
  ModelKind kind = ModelKind::Rf;
  bool directed = false;

  // Preprocessing and node state.
  FeatureCodec codec;
  std::vector<std::string> ids;  // node order (sorted attraction ids)
  std::vector<LonLat> coords;
  Eigen::MatrixXd features;  // scaled, n x F
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  double threshold = 200.0;
  double dist_min = 0.0;  // distance scaling fitted on training pairs
  double dist_max = 0.0;

  // Learned parameters; presence depends on the model kind.
  std::optional<nn::EncoderParams> encoder;
  std::optional<nn::BilinearParams> bilinear;
  std::optional<nn::DistMultParams> distmult;
  std::optional<nn::MlpParams> mlp;  // decoder MLP or the deep-gravity net
  std::optional<Forest> forest;

  TrainConfig config;
  std::uint64_t seed = 0;

  std::size_t index_of(const std::string& id) const;
  double scaled_distance(std::size_t i, std::size_t j) const;

  // Recomputes the graph and embedding caches from the stored state. Called
  // after training and after load; predictions require it.
  void rebuild_caches();

  // Raw model output for an ordered pair (no clamping). Undirected kinds
  // return the same value for both orders.
  double predict(const std::string& src, const std::string& dst) const;
  double predict_index(std::size_t i, std::size_t j) const;

  const Eigen::MatrixXd& embeddings() const;

 private:
  std::optional<InteractionGraph> graph_cache_;
  std::optional<Eigen::MatrixXd> embed_cache_;
};

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

}  // namespace flowgraph
