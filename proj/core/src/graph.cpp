#include "flowgraph/graph.hpp"

#include <algorithm>

#include "flowgraph/error.hpp"

namespace flowgraph {

InteractionGraph::InteractionGraph(std::vector<std::string> ids, Eigen::MatrixXd features,
                                   std::vector<std::vector<std::size_t>> neighbors, bool directed)
    : ids_(std::move(ids)),
      features_(std::move(features)),
      neighbors_(std::move(neighbors)),
      directed_(directed) {
  if (static_cast<std::size_t>(features_.rows()) != ids_.size()) {
    throw DataError("feature matrix rows (" + std::to_string(features_.rows()) +
                    ") do not match node count (" + std::to_string(ids_.size()) + ")");
  }
  if (neighbors_.size() != ids_.size()) throw DataError("adjacency size mismatch");
  for (auto& list : neighbors_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) index_by_id_[ids_[i]] = i;
  if (index_by_id_.size() != ids_.size()) throw DataError("duplicate node ids in graph");
}

std::size_t InteractionGraph::index_of(const std::string& id) const {
  const auto it = index_by_id_.find(id);
  if (it == index_by_id_.end()) throw DataError("unknown attraction id '" + id + "'");
  return it->second;
}

std::size_t InteractionGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : neighbors_) total += list.size();
  return directed_ ? total : total / 2;
}

std::vector<std::pair<std::size_t, std::size_t>> InteractionGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t v = 0; v < neighbors_.size(); ++v) {
    for (std::size_t u : neighbors_[v]) {
      if (directed_) {
        out.emplace_back(u, v);  // u -> v arc
      } else if (v < u) {
        out.emplace_back(v, u);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

InteractionGraph build_graph(const FlowTable& flows, const std::vector<std::string>& node_ids,
                             const Eigen::MatrixXd& features, double threshold, bool directed) {
  if (threshold < 0.0) throw ConfigError("graph threshold must be >= 0");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < node_ids.size(); ++i) index[node_ids[i]] = i;

  std::vector<std::vector<std::size_t>> neighbors(node_ids.size());
  for (const auto& [key, flow] : flows.pairs()) {
    if (flow.split != Split::Train) continue;  // leakage guard
    if (!(static_cast<double>(flow.count) > threshold)) continue;
    const auto a = index.find(key.first);
    const auto b = index.find(key.second);
    if (a == index.end() || b == index.end()) {
      throw DataError("flow pair (" + key.first + ", " + key.second +
                      ") references an unknown attraction");
    }
    if (directed) {
      neighbors[b->second].push_back(a->second);  // in-neighbors of dst
    } else {
      neighbors[a->second].push_back(b->second);
      neighbors[b->second].push_back(a->second);
    }
  }
  return InteractionGraph(node_ids, features, std::move(neighbors), directed);
}

InteractionGraph build_graph_from_edges(
    const std::vector<std::string>& node_ids, const Eigen::MatrixXd& features,
    const std::vector<std::pair<std::string, std::string>>& edge_ids, bool directed) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < node_ids.size(); ++i) index[node_ids[i]] = i;
  std::vector<std::vector<std::size_t>> neighbors(node_ids.size());
  for (const auto& [src, dst] : edge_ids) {
    const auto a = index.find(src);
    const auto b = index.find(dst);
    if (a == index.end() || b == index.end()) {
      throw DataError("edge (" + src + ", " + dst + ") references an unknown attraction");
    }
    if (a->second == b->second) continue;  // no self-loops
    if (directed) {
      neighbors[b->second].push_back(a->second);
    } else {
      neighbors[a->second].push_back(b->second);
      neighbors[b->second].push_back(a->second);
    }
  }
  return InteractionGraph(node_ids, features, std::move(neighbors), directed);
}

SweepResult sweep_threshold(std::vector<double> thresholds,
                            const std::function<SweepEval(double)>& evaluate) {
  if (thresholds.empty()) throw ConfigError("threshold sweep needs at least one threshold");
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  SweepResult result;
  std::optional<std::size_t> last_edges;
  double best_mape = 0.0;
  for (double t : thresholds) {
    SweepRow row;
    row.threshold = t;
    try {
      row.eval = evaluate(t);
    } catch (const Error&) {
      row.eval = std::nullopt;  // missing, not fatal
    }
    if (row.eval) {
      if (last_edges && row.eval->n_edges > *last_edges) {
        throw Error("edge count increased while raising the threshold");
      }
      last_edges = row.eval->n_edges;
      if (!result.best_threshold || row.eval->val_mape < best_mape) {
        result.best_threshold = t;
        best_mape = row.eval->val_mape;
      }
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace flowgraph
