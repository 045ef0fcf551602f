#include "flowgraph/train.hpp"

#include <cmath>

#include "flowgraph/error.hpp"

namespace flowgraph {

using nn::Mat;
using nn::Vec;

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Rf: return "rf";
    case ModelKind::DeepGravity: return "deep-gravity";
    case ModelKind::GcnRf: return "gcn-rf";
    case ModelKind::SiGcn: return "si-gcn";
    case ModelKind::SiGcnRf: return "si-gcn-rf";
    case ModelKind::SiGcnRfNoEdge: return "si-gcn-rf-no-edge";
  }
  return "unknown";
}

ModelKind model_kind_from_name(std::string_view name) {
  if (name == "rf") return ModelKind::Rf;
  if (name == "deep-gravity") return ModelKind::DeepGravity;
  if (name == "gcn-rf") return ModelKind::GcnRf;
  if (name == "si-gcn") return ModelKind::SiGcn;
  if (name == "si-gcn-rf") return ModelKind::SiGcnRf;
  if (name == "si-gcn-rf-no-edge") return ModelKind::SiGcnRfNoEdge;
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

void validate_train_config(const TrainConfig& config) {
  if (config.patience < 1) throw ConfigError("patience must be >= 1");
  if (config.patience >= config.max_epochs) throw ConfigError("patience must be < max_epochs");
  if (config.lr <= 0.0) throw ConfigError("learning rate must be > 0");
  if (config.clip_max_norm <= 0.0) throw ConfigError("clip max norm must be > 0");
  if (config.dropout < 0.0 || config.dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (config.embed_dim == 0 || config.layers == 0) throw ConfigError("embed_dim and layers must be > 0");
}

namespace {

Mat gather_rows(const Mat& embeddings, const PairSet& pairs, bool first) {
  Mat out(static_cast<Eigen::Index>(pairs.size()), embeddings.cols());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::size_t idx = first ? pairs[k].i : pairs[k].j;
    out.row(static_cast<Eigen::Index>(k)) = embeddings.row(static_cast<Eigen::Index>(idx));
  }
  return out;
}

Vec pair_targets(const PairSet& pairs) {
  Vec y(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t k = 0; k < pairs.size(); ++k) y[static_cast<Eigen::Index>(k)] = pairs[k].y;
  return y;
}

void scatter_pair_grads(Mat& d_embed, const PairSet& pairs, const Mat& d_eu, const Mat& d_ev) {
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    d_embed.row(static_cast<Eigen::Index>(pairs[k].i)) += d_eu.row(static_cast<Eigen::Index>(k));
    d_embed.row(static_cast<Eigen::Index>(pairs[k].j)) += d_ev.row(static_cast<Eigen::Index>(k));
  }
}

}  // namespace

Vec GcnModel::predict_pairs(const Mat& embeddings, const PairSet& pairs) const {
  Vec preds(static_cast<Eigen::Index>(pairs.size()));
  switch (decoder_kind) {
    case DecoderKind::Bilinear: {
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        preds[static_cast<Eigen::Index>(k)] =
            nn::bilinear_score(embeddings.row(static_cast<Eigen::Index>(pairs[k].i)).transpose(),
                               embeddings.row(static_cast<Eigen::Index>(pairs[k].j)).transpose(),
                               bilinear.r);
      }
      break;
    }
    case DecoderKind::DistMult: {
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        preds[static_cast<Eigen::Index>(k)] =
            nn::distmult_score(embeddings.row(static_cast<Eigen::Index>(pairs[k].i)).transpose(),
                               embeddings.row(static_cast<Eigen::Index>(pairs[k].j)).transpose(),
                               distmult.r);
      }
      break;
    }
    case DecoderKind::Mlp: {
      const Mat eu = gather_rows(embeddings, pairs, true);
      const Mat ev = gather_rows(embeddings, pairs, false);
      Mat z(eu.rows(), eu.cols() + ev.cols());
      z << eu, ev;
      preds = nn::mlp_forward_batch(z, mlp);
      break;
    }
  }
  return preds;
}

double GcnModel::predict_pair(const Mat& embeddings, std::size_t i, std::size_t j) const {
  PairSet one{{i, j, 0.0}};
  return predict_pairs(embeddings, one)[0];
}

GcnModel init_gcn_model(std::size_t feature_count, DecoderKind decoder, nn::EncodeMode mode,
                        const TrainConfig& config) {
  const std::size_t d = config.embed_dim;
  Rng rng(derive_seed(config.seed, 0x6e11));
  GcnModel model;
  model.decoder_kind = decoder;
  model.mode = mode;
  model.encoder.input_proj = Mat(feature_count, d);
  nn::glorot_fill(model.encoder.input_proj, feature_count, d, rng);
  for (std::size_t l = 0; l < config.layers; ++l) {
    Mat w(d, d), b(d, d);
    nn::glorot_fill(w, d, d, rng);
    nn::glorot_fill(b, d, d, rng);
    model.encoder.agg_weight.push_back(std::move(w));
    model.encoder.self_weight.push_back(std::move(b));
  }
  switch (decoder) {
    case DecoderKind::Bilinear:
      model.bilinear.r = Vec(d);
      nn::glorot_fill(model.bilinear.r, d, 1, rng);
      break;
    case DecoderKind::DistMult:
      model.distmult.r = Mat(d, d);
      nn::glorot_fill(model.distmult.r, d, d, rng);
      break;
    case DecoderKind::Mlp: {
      // concat(E_u, E_v) -> one hidden LeakyReLU layer -> linear scalar
      const std::vector<std::size_t> sizes = {2 * d, config.mlp_hidden, 1};
      model.mlp = init_mlp(sizes, derive_seed(config.seed, 0x6e12));
      break;
    }
  }
  return model;
}

nn::MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw ConfigError("mlp needs at least input and output sizes");
  Rng rng(seed);
  nn::MlpParams params;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    Mat w(layer_sizes[l + 1], layer_sizes[l]);
    nn::glorot_fill(w, layer_sizes[l], layer_sizes[l + 1], rng);
    params.weights.push_back(std::move(w));
    params.biases.push_back(Vec::Zero(static_cast<Eigen::Index>(layer_sizes[l + 1])));
    const bool last = l + 2 == layer_sizes.size();
    params.activations.push_back(last ? nn::Activation::Linear : nn::Activation::LeakyRelu);
  }
  return params;
}

namespace {

struct GcnGradients {
  nn::EncoderGrads encoder;
  Vec bilinear_r;
  Mat distmult_r;
  nn::MlpGrads mlp;
};

// Analytic gradients of full-batch MSE over the training pairs.
GcnGradients gcn_backward(const InteractionGraph& graph, GcnModel& model,
                          const nn::EncoderTrace& trace, const PairSet& pairs, const Vec& preds,
                          const Vec& targets) {
  const Mat& embeddings = trace.h.back();
  const auto m = static_cast<double>(pairs.size());
  const Vec d_pred = 2.0 / m * (preds - targets);

  GcnGradients grads;
  Mat d_embed = Mat::Zero(embeddings.rows(), embeddings.cols());
  const Mat eu = gather_rows(embeddings, pairs, true);
  const Mat ev = gather_rows(embeddings, pairs, false);

  switch (model.decoder_kind) {
    case DecoderKind::Bilinear: {
      const Mat hadamard = eu.cwiseProduct(ev);
      grads.bilinear_r = hadamard.transpose() * d_pred;
      const Eigen::RowVectorXd r_row = model.bilinear.r.transpose();
      const Mat d_eu =
          ((ev.array().rowwise() * r_row.array()).colwise() * d_pred.array()).matrix();
      const Mat d_ev =
          ((eu.array().rowwise() * r_row.array()).colwise() * d_pred.array()).matrix();
      scatter_pair_grads(d_embed, pairs, d_eu, d_ev);
      break;
    }
    case DecoderKind::DistMult: {
      const Mat ev_scaled = (ev.array().colwise() * d_pred.array()).matrix();
      grads.distmult_r = eu.transpose() * ev_scaled;
      const Mat d_eu = ev_scaled * model.distmult.r.transpose();
      const Mat eu_scaled = (eu.array().colwise() * d_pred.array()).matrix();
      const Mat d_ev = eu_scaled * model.distmult.r;
      scatter_pair_grads(d_embed, pairs, d_eu, d_ev);
      break;
    }
    case DecoderKind::Mlp: {
      Mat z(eu.rows(), eu.cols() + ev.cols());
      z << eu, ev;
      nn::MlpTrace mlp_trace;
      nn::mlp_forward_batch(z, model.mlp, &mlp_trace);
      Mat d_z;
      grads.mlp = nn::mlp_backward(model.mlp, mlp_trace, d_pred, &d_z);
      scatter_pair_grads(d_embed, pairs, d_z.leftCols(eu.cols()), d_z.rightCols(ev.cols()));
      break;
    }
  }
  grads.encoder = nn::encoder_backward(graph, model.encoder, trace, d_embed, model.mode);
  return grads;
}

std::vector<nn::ParamRef> gcn_param_refs(GcnModel& model) {
  std::vector<nn::ParamRef> refs;
  refs.push_back(nn::ref(model.encoder.input_proj));
  for (auto& w : model.encoder.agg_weight) refs.push_back(nn::ref(w));
  for (auto& w : model.encoder.self_weight) refs.push_back(nn::ref(w));
  switch (model.decoder_kind) {
    case DecoderKind::Bilinear: refs.push_back(nn::ref(model.bilinear.r)); break;
    case DecoderKind::DistMult: refs.push_back(nn::ref(model.distmult.r)); break;
    case DecoderKind::Mlp:
      for (auto& w : model.mlp.weights) refs.push_back(nn::ref(w));
      for (auto& b : model.mlp.biases) refs.push_back(nn::ref(b));
      break;
  }
  return refs;
}

std::vector<nn::ParamRef> gcn_grad_refs(GcnGradients& grads, DecoderKind kind) {
  std::vector<nn::ParamRef> refs;
  refs.push_back(nn::ref(grads.encoder.input_proj));
  for (auto& w : grads.encoder.agg_weight) refs.push_back(nn::ref(w));
  for (auto& w : grads.encoder.self_weight) refs.push_back(nn::ref(w));
  switch (kind) {
    case DecoderKind::Bilinear: refs.push_back(nn::ref(grads.bilinear_r)); break;
    case DecoderKind::DistMult: refs.push_back(nn::ref(grads.distmult_r)); break;
    case DecoderKind::Mlp:
      for (auto& w : grads.mlp.weights) refs.push_back(nn::ref(w));
      for (auto& b : grads.mlp.biases) refs.push_back(nn::ref(b));
      break;
  }
  return refs;
}

bool refs_finite(const std::vector<nn::ParamRef>& refs) {
  for (const auto& r : refs) {
    for (std::size_t i = 0; i < r.size; ++i) {
      if (!std::isfinite(r.data[i])) return false;
    }
  }
  return true;
}

}  // namespace

GcnTrainResult train_gcn(const InteractionGraph& graph, const PairSet& train_pairs,
                         const PairSet& val_pairs, DecoderKind decoder, nn::EncodeMode mode,
                         const TrainConfig& config) {
  validate_train_config(config);
  if (train_pairs.empty() || val_pairs.empty()) {
    throw ConfigError("training needs non-empty train and validation pair sets");
  }

  GcnTrainResult result;
  result.model = init_gcn_model(static_cast<std::size_t>(graph.features().cols()), decoder, mode,
                                config);
  GcnModel& model = result.model;
  GcnModel best = model;

  auto params = gcn_param_refs(model);
  nn::AdamState adam(config.lr, params);
  Rng dropout_rng(derive_seed(config.seed, 0xd20));
  const Vec y_train = pair_targets(train_pairs);
  const Vec y_val = pair_targets(val_pairs);

  TrainHistory& history = result.history;
  EarlyStopper stopper(config.patience);
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto trace = nn::encode_trace(graph, model.encoder, mode, config.dropout,
                                        config.dropout > 0.0 ? &dropout_rng : nullptr);
    const Vec preds = model.predict_pairs(trace.h.back(), train_pairs);
    const double train_mse = nn::mse_loss(preds, y_train);
    if (!std::isfinite(train_mse) || !trace.h.back().allFinite()) {
      history.diverged = true;
      history.diverged_epoch = epoch;
      break;
    }

    auto grads = gcn_backward(graph, model, trace, train_pairs, preds, y_train);
    auto grad_refs = gcn_grad_refs(grads, decoder);
    if (!refs_finite(grad_refs)) {
      history.diverged = true;
      history.diverged_epoch = epoch;
      break;
    }
    nn::clip_grad_norm(grad_refs, config.clip_max_norm);
    adam.step(params, grad_refs);

    const Mat eval_embed = nn::encode(graph, model.encoder, mode);
    const double val_mse = nn::mse_loss(model.predict_pairs(eval_embed, val_pairs), y_val);
    history.epochs.push_back({train_mse, val_mse});
    if (!std::isfinite(val_mse)) {
      history.diverged = true;
      history.diverged_epoch = epoch;
      break;
    }

    if (stopper.observe(epoch, val_mse)) best = model;
    if (stopper.should_stop(epoch)) break;
  }
  history.best_epoch = stopper.best_epoch();
  history.best_val = stopper.best_val();

  result.model = std::move(best);
  return result;
}

MlpTrainResult train_mlp_regressor(const Mat& x_train, const Vec& y_train, const Mat& x_val,
                                   const Vec& y_val, std::size_t hidden_layers,
                                   const TrainConfig& config) {
  validate_train_config(config);
  if (x_train.rows() == 0 || x_val.rows() == 0) {
    throw ConfigError("training needs non-empty train and validation sets");
  }

  std::vector<std::size_t> sizes;
  sizes.push_back(static_cast<std::size_t>(x_train.cols()));
  for (std::size_t l = 0; l < hidden_layers; ++l) sizes.push_back(config.mlp_hidden);
  sizes.push_back(1);

  MlpTrainResult result;
  result.net = init_mlp(sizes, derive_seed(config.seed, 0xd6));
  nn::MlpParams best = result.net;

  std::vector<nn::ParamRef> params;
  for (auto& w : result.net.weights) params.push_back(nn::ref(w));
  for (auto& b : result.net.biases) params.push_back(nn::ref(b));
  nn::AdamState adam(config.lr, params);

  TrainHistory& history = result.history;
  EarlyStopper stopper(config.patience);
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    nn::MlpTrace trace;
    const Vec preds = nn::mlp_forward_batch(x_train, result.net, &trace);
    const double train_mse = nn::mse_loss(preds, y_train);
    if (!std::isfinite(train_mse)) {
      history.diverged = true;
      history.diverged_epoch = epoch;
      break;
    }

    const Mat d_out = 2.0 / static_cast<double>(x_train.rows()) * (preds - y_train);
    auto grads = nn::mlp_backward(result.net, trace, d_out);
    std::vector<nn::ParamRef> grad_refs;
    for (auto& w : grads.weights) grad_refs.push_back(nn::ref(w));
    for (auto& b : grads.biases) grad_refs.push_back(nn::ref(b));
    if (!refs_finite(grad_refs)) {
      history.diverged = true;
      history.diverged_epoch = epoch;
      break;
    }
    nn::clip_grad_norm(grad_refs, config.clip_max_norm);
    adam.step(params, grad_refs);

    const double val_mse = nn::mse_loss(nn::mlp_forward_batch(x_val, result.net), y_val);
    history.epochs.push_back({train_mse, val_mse});
    if (!std::isfinite(val_mse)) {
      history.diverged = true;
      history.diverged_epoch = epoch;
      break;
    }

    if (stopper.observe(epoch, val_mse)) best = result.net;
    if (stopper.should_stop(epoch)) break;
  }
  history.best_epoch = stopper.best_epoch();
  history.best_val = stopper.best_val();

  result.net = std::move(best);
  return result;
}

}  // namespace flowgraph
