#include "flowgraph/nn.hpp"

#include <cmath>

#include "flowgraph/error.hpp"

namespace flowgraph::nn {

namespace {

Mat relu(const Mat& x) { return x.cwiseMax(0.0); }

Mat relu_grad_mask(const Mat& pre) {
  return (pre.array() > 0.0).cast<double>().matrix();
}

}  // namespace

Mat mean_neighbors(const InteractionGraph& graph, const Mat& h) {
  Mat out = Mat::Zero(h.rows(), h.cols());
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    const auto& nbrs = graph.neighbors(v);
    if (nbrs.empty()) continue;
    for (std::size_t u : nbrs) out.row(static_cast<Eigen::Index>(v)) += h.row(static_cast<Eigen::Index>(u));
    out.row(static_cast<Eigen::Index>(v)) /= static_cast<double>(nbrs.size());
  }
  return out;
}

Mat gcn_layer_forward(const Mat& h, const InteractionGraph& graph, const Mat& agg_weight,
                      const Mat& self_weight, EncodeMode mode) {
  Mat pre = h * self_weight.transpose();
  if (mode == EncodeMode::WithEdges) {
    pre += mean_neighbors(graph, h) * agg_weight.transpose();
  }
  return relu(pre);
}

EncoderTrace encode_trace(const InteractionGraph& graph, const EncoderParams& params,
                          EncodeMode mode, double dropout, Rng* rng) {
  if (static_cast<std::size_t>(params.input_proj.rows()) !=
      static_cast<std::size_t>(graph.features().cols())) {
    throw ConfigError("encoder projection rows do not match feature count");
  }
  const bool use_dropout = dropout > 0.0 && rng != nullptr;
  EncoderTrace trace;
  trace.h.push_back(graph.features() * params.input_proj);  // no activation on projection
  for (std::size_t l = 0; l < params.layers(); ++l) {
    const Mat& h = trace.h.back();
    Mat msg = (mode == EncodeMode::WithEdges) ? mean_neighbors(graph, h)
                                              : Mat::Zero(h.rows(), h.cols());
    Mat pre = h * params.self_weight[l].transpose();
    if (mode == EncodeMode::WithEdges) pre += msg * params.agg_weight[l].transpose();
    Mat out = relu(pre);
    if (use_dropout) {
      Mat mask(out.rows(), out.cols());
      const double keep_scale = 1.0 / (1.0 - dropout);
      for (Eigen::Index r = 0; r < mask.rows(); ++r) {
        for (Eigen::Index c = 0; c < mask.cols(); ++c) {
          mask(r, c) = rng->uniform() < dropout ? 0.0 : keep_scale;
        }
      }
      out = out.cwiseProduct(mask);
      trace.mask.push_back(std::move(mask));
    }
    trace.msg.push_back(std::move(msg));
    trace.pre.push_back(std::move(pre));
    trace.h.push_back(std::move(out));
  }
  return trace;
}

Mat encode(const InteractionGraph& graph, const EncoderParams& params, EncodeMode mode) {
  return encode_trace(graph, params, mode).h.back();
}

EncoderGrads EncoderGrads::zeros_like(const EncoderParams& params) {
  EncoderGrads g;
  g.input_proj = Mat::Zero(params.input_proj.rows(), params.input_proj.cols());
  for (const auto& w : params.agg_weight) g.agg_weight.push_back(Mat::Zero(w.rows(), w.cols()));
  for (const auto& w : params.self_weight) g.self_weight.push_back(Mat::Zero(w.rows(), w.cols()));
  return g;
}

EncoderGrads encoder_backward(const InteractionGraph& graph, const EncoderParams& params,
                              const EncoderTrace& trace, const Mat& d_embed, EncodeMode mode) {
  EncoderGrads grads = EncoderGrads::zeros_like(params);
  Mat d_h = d_embed;
  const bool has_mask = !trace.mask.empty();
  for (std::size_t l = params.layers(); l-- > 0;) {
    if (has_mask) d_h = d_h.cwiseProduct(trace.mask[l]);
    const Mat d_pre = d_h.cwiseProduct(relu_grad_mask(trace.pre[l]));
    grads.self_weight[l] = d_pre.transpose() * trace.h[l];
    Mat d_h_prev = d_pre * params.self_weight[l];
    if (mode == EncodeMode::WithEdges) {
      grads.agg_weight[l] = d_pre.transpose() * trace.msg[l];
      const Mat d_msg = d_pre * params.agg_weight[l];
      for (std::size_t v = 0; v < graph.node_count(); ++v) {
        const auto& nbrs = graph.neighbors(v);
        if (nbrs.empty()) continue;
        const double inv_deg = 1.0 / static_cast<double>(nbrs.size());
        for (std::size_t u : nbrs) {
          d_h_prev.row(static_cast<Eigen::Index>(u)) +=
              inv_deg * d_msg.row(static_cast<Eigen::Index>(v));
        }
      }
    }
    d_h = std::move(d_h_prev);
  }
  grads.input_proj = graph.features().transpose() * d_h;
  return grads;
}

double bilinear_score(const Vec& e_u, const Vec& e_v, const Vec& r) {
  if (e_u.size() != e_v.size() || e_u.size() != r.size()) {
    throw ConfigError("bilinear score requires equal-length vectors");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) total += (e_u[i] * e_v[i]) * r[i];
  return total;
}

double distmult_score(const Vec& e_u, const Vec& e_v, const Mat& r) {
  if (r.rows() != r.cols() || e_u.size() != r.rows() || e_v.size() != r.cols()) {
    throw ConfigError("distmult score shape mismatch");
  }
  return e_u.transpose() * r * e_v;
}

double mlp_forward(const Vec& x, const MlpParams& params) {
  Mat out = mlp_forward_batch(x.transpose(), params);
  return out(0, 0);
}

Mat mlp_forward_batch(const Mat& x, const MlpParams& params, MlpTrace* trace) {
  if (params.weights.empty()) throw ConfigError("mlp has no layers");
  if (x.cols() != params.weights.front().cols()) {
    throw ConfigError("mlp input width mismatch");
  }
  Mat act = x;
  if (trace) trace->acts.push_back(act);
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    Mat pre = act * params.weights[l].transpose();
    pre.rowwise() += params.biases[l].transpose();
    if (params.activations[l] == Activation::LeakyRelu) {
      act = pre.unaryExpr(
          [s = params.leaky_slope](double v) { return v > 0.0 ? v : s * v; });
    } else {
      act = pre;
    }
    if (trace) {
      trace->pre.push_back(std::move(pre));
      trace->acts.push_back(act);
    }
  }
  return act;
}

MlpGrads MlpGrads::zeros_like(const MlpParams& params) {
  MlpGrads g;
  for (const auto& w : params.weights) g.weights.push_back(Mat::Zero(w.rows(), w.cols()));
  for (const auto& b : params.biases) g.biases.push_back(Vec::Zero(b.size()));
  return g;
}

MlpGrads mlp_backward(const MlpParams& params, const MlpTrace& trace, const Mat& d_out,
                      Mat* d_input) {
  MlpGrads grads = MlpGrads::zeros_like(params);
  Mat d_act = d_out;
  for (std::size_t l = params.layer_count(); l-- > 0;) {
    Mat d_pre;
    if (params.activations[l] == Activation::LeakyRelu) {
      const Mat slope = trace.pre[l].unaryExpr(
          [s = params.leaky_slope](double v) { return v > 0.0 ? 1.0 : s; });
      d_pre = d_act.cwiseProduct(slope);
    } else {
      d_pre = std::move(d_act);
    }
    grads.weights[l] = d_pre.transpose() * trace.acts[l];
    grads.biases[l] = d_pre.colwise().sum().transpose();
    d_act = d_pre * params.weights[l];
  }
  if (d_input) *d_input = std::move(d_act);
  return grads;
}

double mse_loss(const Vec& pred, const Vec& target) {
  if (pred.size() != target.size() || pred.size() == 0) {
    throw ConfigError("mse requires equal-length non-empty arrays");
  }
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

ParamRef ref(Mat& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
ParamRef ref(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double global_norm(const std::vector<ParamRef>& grads) {
  double total = 0.0;
  for (const auto& g : grads) {
    for (std::size_t i = 0; i < g.size; ++i) total += g.data[i] * g.data[i];
  }
  return std::sqrt(total);
}

void clip_grad_norm(const std::vector<ParamRef>& grads, double max_norm) {
  if (max_norm <= 0.0) throw ConfigError("clip max norm must be > 0");
  const double norm = global_norm(grads);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (const auto& g : grads) {
    for (std::size_t i = 0; i < g.size; ++i) g.data[i] *= scale;
  }
}

AdamState::AdamState(double lr, const std::vector<ParamRef>& params) : lr_(lr) {
  if (lr <= 0.0) throw ConfigError("learning rate must be > 0");
  for (const auto& p : params) {
    m_.emplace_back(p.size, 0.0);
    v_.emplace_back(p.size, 0.0);
  }
}

void AdamState::step(const std::vector<ParamRef>& params, const std::vector<ParamRef>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ConfigError("adam state does not mirror the parameter list");
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& m = m_[t];
    auto& v = v_[t];
    for (std::size_t i = 0; i < params[t].size; ++i) {
      const double g = grads[t].data[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      params[t].data[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

void glorot_fill(Mat& m, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-bound, bound);
  }
}

void glorot_fill(Vec& v, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-bound, bound);
}

}  // namespace flowgraph::nn
