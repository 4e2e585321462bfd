#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlasso {

/// Vector-valued signal on the nodes of a graph. Column i is the d-vector
/// attached to node i.
using NodeSignal = Eigen::MatrixXd;

/// Vector-valued signal on the edges. Column e is the d-vector attached to
/// edge e, edges in canonical (low index, high index) order.
using EdgeSignal = Eigen::MatrixXd;

struct Edge {
  int i;          // lower endpoint, 0-based
  int j;          // higher endpoint, i < j
  double weight;  // strictly positive
};

/// Undirected weighted graph over nodes {0..N-1}. Immutable after
/// construction; all operators below are matrix-free.
class EmpiricalGraph {
 public:
  /// Throws std::invalid_argument on self-loops, duplicate edges,
  /// non-positive weights or isolated nodes.
  EmpiricalGraph(int node_count, std::vector<Edge> edges);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<size_t>(e)]; }

  /// Weighted degree d_i = sum of incident edge weights.
  double degree(int i) const { return degrees_[static_cast<size_t>(i)]; }
  const std::vector<double>& degrees() const { return degrees_; }
  double max_weight() const { return max_weight_; }

  /// Incident edge ids of node i.
  const std::vector<int>& incident_edges(int i) const {
    return incident_[static_cast<size_t>(i)];
  }

  bool is_connected() const;
  /// 0-based component label per node (BFS order).
  std::vector<int> connected_components() const;

 private:
  int node_count_;
  std::vector<Edge> edges_;
  std::vector<double> degrees_;
  std::vector<std::vector<int>> incident_;
  double max_weight_ = 0.0;
};

/// Partition of the nodes into clusters 0..k-1. Each induced cluster
/// subgraph must be connected.
class Partition {
 public:
  /// assignment[i] is the cluster of node i. Throws if a cluster is empty
  /// or an induced cluster subgraph is disconnected.
  Partition(const EmpiricalGraph& g, std::vector<int> assignment);

  int cluster_count() const { return static_cast<int>(clusters_.size()); }
  int cluster_of(int node) const { return assignment_[static_cast<size_t>(node)]; }
  const std::vector<int>& cluster(int c) const { return clusters_[static_cast<size_t>(c)]; }
  const std::vector<int>& assignment() const { return assignment_; }

  /// Edge ids with endpoints in different clusters.
  std::vector<int> boundary_edges(const EmpiricalGraph& g) const;

 private:
  std::vector<int> assignment_;
  std::vector<std::vector<int>> clusters_;
};

/// Block e of the output is A_ij (w^(i) - w^(j)) for edge e = {i,j}, i < j.
EdgeSignal apply_incidence(const EmpiricalGraph& g, const NodeSignal& w);

/// Transpose of apply_incidence.
NodeSignal apply_incidence_adjoint(const EmpiricalGraph& g, const EdgeSignal& u);

/// Same as apply_incidence but with sqrt(A_ij) edge weights, so that
/// D~^T D~ equals the Laplacian.
EdgeSignal apply_incidence_sqrt(const EmpiricalGraph& g, const NodeSignal& w);
NodeSignal apply_incidence_sqrt_adjoint(const EmpiricalGraph& g, const EdgeSignal& u);

/// Total variation: sum over edges of A_ij ||w^(j) - w^(i)||_2, optionally
/// restricted to a subset of edge ids.
double tv_norm(const EmpiricalGraph& g, const NodeSignal& w,
               std::optional<std::span<const int>> edge_subset = std::nullopt);

/// Applies the (block) graph Laplacian.
NodeSignal laplacian_apply(const EmpiricalGraph& g, const NodeSignal& w);

/// Smallest nonzero Laplacian eigenvalue of the scalar Laplacian.
/// Throws std::domain_error naming a disconnected component if g is not
/// connected. Dense eigendecomposition for N <= 2000, deflated power
/// iteration above.
double spectral_gap(const EmpiricalGraph& g);

/// min over clusters of the spectral gap of the induced subgraph.
/// Single-node clusters do not constrain the minimum.
double partition_spectral_gap(const EmpiricalGraph& g, const Partition& p);

/// Maximum flow from source to the sink set (joined to a super sink),
/// undirected edges modeled as a directed arc in each direction with the
/// given capacity. Edmonds-Karp.
double max_flow(const EmpiricalGraph& g, int source, const std::vector<int>& sinks,
                const std::vector<double>& capacities);

struct ClusterConnectivity {
  std::vector<double> per_cluster;  // +inf when the cluster has no boundary
  double mean;                      // over clusters with finite value
};

/// For each cluster: max flow (within the induced subgraph, capacities A)
/// from the representative node to the in-cluster endpoints of boundary
/// edges, divided by the boundary edge count.
ClusterConnectivity normalized_connectivity(const EmpiricalGraph& g, const Partition& p,
                                            const std::vector<int>& representatives);

/// Induced subgraph on the given nodes plus the node relabeling
/// (old index -> position in `nodes`). Throws if the result would contain
/// an isolated node.
EmpiricalGraph induced_subgraph(const EmpiricalGraph& g, const std::vector<int>& nodes,
                                std::vector<int>* node_map = nullptr);

}  // namespace nlasso
