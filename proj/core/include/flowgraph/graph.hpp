#pragma once

#include <Eigen/Core>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowgraph/flow_table.hpp"

namespace flowgraph {

// Thresholded interaction graph: unweighted adjacency over attraction nodes
// plus the scaled node feature matrix. Immutable after construction. In
// directed mode neighbors(v) holds the in-neighbors of v.
class InteractionGraph {
 public:
  InteractionGraph(std::vector<std::string> ids, Eigen::MatrixXd features,
                   std::vector<std::vector<std::size_t>> neighbors, bool directed);

  std::size_t node_count() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t index_of(const std::string& id) const;  // DataError if unknown
  const Eigen::MatrixXd& features() const { return features_; }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return neighbors_[v]; }
  std::size_t degree(std::size_t v) const { return neighbors_[v].size(); }
  bool directed() const { return directed_; }

  // Undirected edges counted once; directed arcs counted individually.
  std::size_t edge_count() const;

  // Edge list in canonical order (u < v for undirected; (src, dst) arcs
  // for directed, where dst holds src in its in-neighbor list).
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

 private:
  std::vector<std::string> ids_;
  Eigen::MatrixXd features_;  // node_count x feature_count
  std::vector<std::vector<std::size_t>> neighbors_;  // sorted, duplicate-free
  bool directed_;
  std::map<std::string, std::size_t> index_by_id_;
};

// Edge (i, j) exists iff the training-split flow count is strictly greater
// than the threshold. Flows outside the training split never create edges.
InteractionGraph build_graph(const FlowTable& flows, const std::vector<std::string>& node_ids,
                             const Eigen::MatrixXd& features, double threshold,
                             bool directed = false);

// Explicit edge list (e.g. travel-agency routes) bypassing thresholding.
InteractionGraph build_graph_from_edges(
    const std::vector<std::string>& node_ids, const Eigen::MatrixXd& features,
    const std::vector<std::pair<std::string, std::string>>& edge_ids, bool directed = false);

struct SweepEval {
  double val_mape = 0.0;
  double val_cpc = 0.0;
  std::size_t n_edges = 0;
};

struct SweepRow {
  double threshold = 0.0;
  std::optional<SweepEval> eval;  // nullopt when training failed
};

struct SweepResult {
  std::vector<SweepRow> rows;                // ascending threshold order
  std::optional<double> best_threshold;      // argmin validation MAPE
};

// Runs evaluate(threshold) per threshold (ascending). A throwing evaluation
// is recorded as a missing row, not a failure of the sweep. Edge-count
// monotonicity across successful rows is verified.
SweepResult sweep_threshold(std::vector<double> thresholds,
                            const std::function<SweepEval(double)>& evaluate);

}  // namespace flowgraph
