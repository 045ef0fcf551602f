#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "flowgraph/nn.hpp"

namespace flowgraph {

enum class ModelKind { Rf, DeepGravity, GcnRf, SiGcn, SiGcnRf, SiGcnRfNoEdge };

std::string_view model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(std::string_view name);

struct TrainConfig {
  std::size_t max_epochs = 50'000;
  std::size_t patience = 500;     // epochs without validation improvement
  double lr = 0.02;
  double clip_max_norm = 1.0;
  double dropout = 0.0;           // on encoder layer activations
  std::size_t embed_dim = 500;    // D; hidden GCN layers share this width
  std::size_t layers = 2;         // L
  std::size_t mlp_hidden = 64;    // hidden width of MLP decoder / deep gravity
  bool log1p_targets = false;
  std::uint64_t seed = 0;
  // batch size is always full batch
};

void validate_train_config(const TrainConfig& config);

// One supervised pair by node index.
struct LabeledPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double y = 0.0;
};
using PairSet = std::vector<LabeledPair>;

struct EpochStats {
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;  // index 0 = epoch 1
  std::size_t best_epoch = 0;      // 1-based
  double best_val = std::numeric_limits<double>::infinity();
  bool diverged = false;
  std::size_t diverged_epoch = 0;  // 1-based, valid when diverged
};

// Best-so-far tracking with patience. observe() returns true when the value
// strictly improves; should_stop() fires once `patience` epochs pass without
// improvement, so a run worsening from epoch 1 stops at epoch 1 + patience.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  bool observe(std::size_t epoch, double val) {
    if (val < best_val_) {
      best_val_ = val;
      best_epoch_ = epoch;
      return true;
    }
    return false;
  }

  bool should_stop(std::size_t epoch) const { return epoch - best_epoch_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_val() const { return best_val_; }

 private:
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  double best_val_ = std::numeric_limits<double>::infinity();
};

enum class DecoderKind { Bilinear, DistMult, Mlp };

struct GcnModel {
  nn::EncoderParams encoder;
  DecoderKind decoder_kind = DecoderKind::Bilinear;
  nn::EncodeMode mode = nn::EncodeMode::WithEdges;
  nn::BilinearParams bilinear;
  nn::DistMultParams distmult;
  nn::MlpParams mlp;

  nn::Vec predict_pairs(const nn::Mat& embeddings, const PairSet& pairs) const;
  double predict_pair(const nn::Mat& embeddings, std::size_t i, std::size_t j) const;
};

GcnModel init_gcn_model(std::size_t feature_count, DecoderKind decoder, nn::EncodeMode mode,
                        const TrainConfig& config);

struct GcnTrainResult {
  GcnModel model;  // best-validation checkpoint
  TrainHistory history;
};

// Full-batch training of encoder + decoder on the training pairs with
// early stopping on validation MSE. Deterministic for a fixed seed.
GcnTrainResult train_gcn(const InteractionGraph& graph, const PairSet& train_pairs,
                         const PairSet& val_pairs, DecoderKind decoder, nn::EncodeMode mode,
                         const TrainConfig& config);

// Plain MLP regressor (the Deep Gravity backbone): hidden LeakyReLU layers,
// linear scalar output, trained like the GCN models.
nn::MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed);

struct MlpTrainResult {
  nn::MlpParams net;
  TrainHistory history;
};

MlpTrainResult train_mlp_regressor(const nn::Mat& x_train, const nn::Vec& y_train,
                                   const nn::Mat& x_val, const nn::Vec& y_val,
                                   std::size_t hidden_layers, const TrainConfig& config);

}  // namespace flowgraph
