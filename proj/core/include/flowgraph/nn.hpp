#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "flowgraph/graph.hpp"
#include "flowgraph/rng.hpp"

namespace flowgraph::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Encoder: linear input projection followed by L graph convolution layers
//   h_v' = relu(W_l * mean_{u in N(v)} h_u + B_l * h_v)
// Nodes without neighbors use a zero message term. In NoEdges mode the
// message term is zeroed for every node.
// ---------------------------------------------------------------------------

struct EncoderParams {
  Mat input_proj;               // F x D
  std::vector<Mat> agg_weight;  // L matrices, D x D
  std::vector<Mat> self_weight; // L matrices, D x D
  std::size_t layers() const { return agg_weight.size(); }
  Eigen::Index embed_dim() const { return input_proj.cols(); }
};

enum class EncodeMode { WithEdges, NoEdges };

// Row v = mean of h rows over neighbors(v); zero row for isolated nodes.
Mat mean_neighbors(const InteractionGraph& graph, const Mat& h);

Mat gcn_layer_forward(const Mat& h, const InteractionGraph& graph, const Mat& agg_weight,
                      const Mat& self_weight, EncodeMode mode);

struct EncoderTrace {
  std::vector<Mat> h;     // L+1 entries, h[0] = X * P
  std::vector<Mat> msg;   // L entries, mean-neighbor aggregate of h[l]
  std::vector<Mat> pre;   // L entries, pre-activation
  std::vector<Mat> mask;  // L entries, dropout scale; empty when dropout off
};

// Forward pass keeping intermediates for backprop. Dropout (inverted, rate in
// [0,1)) applies to layer activations during training only.
EncoderTrace encode_trace(const InteractionGraph& graph, const EncoderParams& params,
                          EncodeMode mode, double dropout = 0.0, Rng* rng = nullptr);

// Inference-mode embeddings (no dropout).
Mat encode(const InteractionGraph& graph, const EncoderParams& params, EncodeMode mode);

struct EncoderGrads {
  Mat input_proj;
  std::vector<Mat> agg_weight;
  std::vector<Mat> self_weight;
  static EncoderGrads zeros_like(const EncoderParams& params);
};

// Backpropagates d_embed (gradient w.r.t. final embeddings) through the
// stack; returns parameter gradients.
EncoderGrads encoder_backward(const InteractionGraph& graph, const EncoderParams& params,
                              const EncoderTrace& trace, const Mat& d_embed, EncodeMode mode);

// ---------------------------------------------------------------------------
// Decoders
// ---------------------------------------------------------------------------

struct BilinearParams {
  Vec r;  // length D
};

// sum_i (eu_i * ev_i) * r_i; the elementwise-product form keeps the score
// bitwise symmetric in its two embedding arguments.
double bilinear_score(const Vec& e_u, const Vec& e_v, const Vec& r);

struct DistMultParams {
  Mat r;  // D x D, not constrained symmetric
};

double distmult_score(const Vec& e_u, const Vec& e_v, const Mat& r);

enum class Activation { LeakyRelu, Linear };

struct MlpParams {
  std::vector<Mat> weights;            // per layer, out x in
  std::vector<Vec> biases;             // per layer
  std::vector<Activation> activations; // per layer
  double leaky_slope = 0.01;
  std::size_t layer_count() const { return weights.size(); }
  std::size_t hidden_count() const { return weights.empty() ? 0 : weights.size() - 1; }
};

double mlp_forward(const Vec& x, const MlpParams& params);

struct MlpTrace {
  std::vector<Mat> acts;  // layer_count+1 entries, acts[0] = input batch
  std::vector<Mat> pre;   // layer_count entries
};

Mat mlp_forward_batch(const Mat& x, const MlpParams& params, MlpTrace* trace = nullptr);

struct MlpGrads {
  std::vector<Mat> weights;
  std::vector<Vec> biases;
  static MlpGrads zeros_like(const MlpParams& params);
};

// Returns parameter gradients; d_input receives the gradient w.r.t. the
// input batch when non-null.
MlpGrads mlp_backward(const MlpParams& params, const MlpTrace& trace, const Mat& d_out,
                      Mat* d_input = nullptr);

// ---------------------------------------------------------------------------
// Loss and optimizer
// ---------------------------------------------------------------------------

double mse_loss(const Vec& pred, const Vec& target);

// Flat view of one parameter (or gradient) tensor.
struct ParamRef {
  double* data = nullptr;
  std::size_t size = 0;
};

ParamRef ref(Mat& m);
ParamRef ref(Vec& v);

double global_norm(const std::vector<ParamRef>& grads);

// Scales all gradients by max_norm / norm when the global L2 norm exceeds
// max_norm; otherwise leaves them unchanged.
void clip_grad_norm(const std::vector<ParamRef>& grads, double max_norm);

// Standard bias-corrected Adam over a fixed list of parameter tensors.
class AdamState {
 public:
  AdamState(double lr, const std::vector<ParamRef>& params);

  void step(const std::vector<ParamRef>& params, const std::vector<ParamRef>& grads);

  double lr() const { return lr_; }
  double beta1() const { return beta1_; }
  double beta2() const { return beta2_; }
  double epsilon() const { return eps_; }
  long step_count() const { return step_; }

 private:
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

// Glorot-uniform fill in [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))].
void glorot_fill(Mat& m, std::size_t fan_in, std::size_t fan_out, Rng& rng);
void glorot_fill(Vec& v, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace flowgraph::nn
