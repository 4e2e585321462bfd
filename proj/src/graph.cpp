#include "nlasso/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nlasso {

namespace {

void check_signal(const Eigen::MatrixXd& s, int expected_blocks, const char* what) {
  if (s.cols() != expected_blocks) {
    std::ostringstream msg;
    msg << what << ": expected " << expected_blocks << " blocks, got " << s.cols();
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

EmpiricalGraph::EmpiricalGraph(int node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ <= 0) throw std::invalid_argument("node_count must be positive");
  degrees_.assign(static_cast<size_t>(node_count_), 0.0);
  incident_.assign(static_cast<size_t>(node_count_), {});
  std::set<std::pair<int, int>> seen;
  for (size_t e = 0; e < edges_.size(); ++e) {
    Edge& ed = edges_[e];
    if (ed.i > ed.j) std::swap(ed.i, ed.j);
    if (ed.i < 0 || ed.j >= node_count_)
      throw std::invalid_argument("edge endpoint out of range");
    if (ed.i == ed.j) throw std::invalid_argument("self-loop rejected");
    if (!(ed.weight > 0.0)) throw std::invalid_argument("edge weight must be positive");
    if (!seen.insert({ed.i, ed.j}).second)
      throw std::invalid_argument("duplicate edge rejected");
    degrees_[static_cast<size_t>(ed.i)] += ed.weight;
    degrees_[static_cast<size_t>(ed.j)] += ed.weight;
    incident_[static_cast<size_t>(ed.i)].push_back(static_cast<int>(e));
    incident_[static_cast<size_t>(ed.j)].push_back(static_cast<int>(e));
    max_weight_ = std::max(max_weight_, ed.weight);
  }
  for (int i = 0; i < node_count_; ++i) {
    if (degrees_[static_cast<size_t>(i)] <= 0.0) {
      std::ostringstream msg;
      msg << "isolated node " << i << " rejected";
      throw std::invalid_argument(msg.str());
    }
  }
}

std::vector<int> EmpiricalGraph::connected_components() const {
  std::vector<int> comp(static_cast<size_t>(node_count_), -1);
  int label = 0;
  for (int start = 0; start < node_count_; ++start) {
    if (comp[static_cast<size_t>(start)] >= 0) continue;
    std::deque<int> queue{start};
    comp[static_cast<size_t>(start)] = label;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int e : incident_[static_cast<size_t>(v)]) {
        int other = edges_[static_cast<size_t>(e)].i == v ? edges_[static_cast<size_t>(e)].j
                                                         : edges_[static_cast<size_t>(e)].i;
        if (comp[static_cast<size_t>(other)] < 0) {
          comp[static_cast<size_t>(other)] = label;
          queue.push_back(other);
        }
      }
    }
    ++label;
  }
  return comp;
}

bool EmpiricalGraph::is_connected() const {
  auto comp = connected_components();
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

Partition::Partition(const EmpiricalGraph& g, std::vector<int> assignment)
    : assignment_(std::move(assignment)) {
  if (static_cast<int>(assignment_.size()) != g.node_count())
    throw std::invalid_argument("partition assignment size mismatch");
  int k = 0;
  for (int c : assignment_) {
    if (c < 0) throw std::invalid_argument("negative cluster id");
    k = std::max(k, c + 1);
  }
  clusters_.assign(static_cast<size_t>(k), {});
  for (int i = 0; i < g.node_count(); ++i)
    clusters_[static_cast<size_t>(assignment_[static_cast<size_t>(i)])].push_back(i);
  for (int c = 0; c < k; ++c) {
    const auto& nodes = clusters_[static_cast<size_t>(c)];
    if (nodes.empty()) {
      std::ostringstream msg;
      msg << "cluster " << c << " is empty";
      throw std::invalid_argument(msg.str());
    }
    if (nodes.size() == 1) continue;
    // BFS within the cluster.
    std::vector<char> in_cluster(static_cast<size_t>(g.node_count()), 0);
    for (int v : nodes) in_cluster[static_cast<size_t>(v)] = 1;
    std::vector<char> visited(static_cast<size_t>(g.node_count()), 0);
    std::deque<int> queue{nodes.front()};
    visited[static_cast<size_t>(nodes.front())] = 1;
    size_t count = 1;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int e : g.incident_edges(v)) {
        const Edge& ed = g.edge(e);
        int other = ed.i == v ? ed.j : ed.i;
        if (in_cluster[static_cast<size_t>(other)] && !visited[static_cast<size_t>(other)]) {
          visited[static_cast<size_t>(other)] = 1;
          ++count;
          queue.push_back(other);
        }
      }
    }
    if (count != nodes.size()) {
      std::ostringstream msg;
      msg << "cluster " << c << " induces a disconnected subgraph";
      throw std::invalid_argument(msg.str());
    }
  }
}

std::vector<int> Partition::boundary_edges(const EmpiricalGraph& g) const {
  std::vector<int> out;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (cluster_of(ed.i) != cluster_of(ed.j)) out.push_back(e);
  }
  return out;
}

EdgeSignal apply_incidence(const EmpiricalGraph& g, const NodeSignal& w) {
  check_signal(w, g.node_count(), "apply_incidence");
  EdgeSignal out(w.rows(), g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    out.col(e) = ed.weight * (w.col(ed.i) - w.col(ed.j));
  }
  return out;
}

NodeSignal apply_incidence_adjoint(const EmpiricalGraph& g, const EdgeSignal& u) {
  check_signal(u, g.edge_count(), "apply_incidence_adjoint");
  NodeSignal out = NodeSignal::Zero(u.rows(), g.node_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    out.col(ed.i) += ed.weight * u.col(e);
    out.col(ed.j) -= ed.weight * u.col(e);
  }
  return out;
}

EdgeSignal apply_incidence_sqrt(const EmpiricalGraph& g, const NodeSignal& w) {
  check_signal(w, g.node_count(), "apply_incidence_sqrt");
  EdgeSignal out(w.rows(), g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    out.col(e) = std::sqrt(ed.weight) * (w.col(ed.i) - w.col(ed.j));
  }
  return out;
}

NodeSignal apply_incidence_sqrt_adjoint(const EmpiricalGraph& g, const EdgeSignal& u) {
  check_signal(u, g.edge_count(), "apply_incidence_sqrt_adjoint");
  NodeSignal out = NodeSignal::Zero(u.rows(), g.node_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const double s = std::sqrt(ed.weight);
    out.col(ed.i) += s * u.col(e);
    out.col(ed.j) -= s * u.col(e);
  }
  return out;
}

double tv_norm(const EmpiricalGraph& g, const NodeSignal& w,
               std::optional<std::span<const int>> edge_subset) {
  check_signal(w, g.node_count(), "tv_norm");
  double total = 0.0;
  auto add_edge = [&](int e) {
    const Edge& ed = g.edge(e);
    total += ed.weight * (w.col(ed.j) - w.col(ed.i)).norm();
  };
  if (edge_subset) {
    for (int e : *edge_subset) {
      if (e < 0 || e >= g.edge_count()) throw std::invalid_argument("unknown edge id");
      add_edge(e);
    }
  } else {
    for (int e = 0; e < g.edge_count(); ++e) add_edge(e);
  }
  return total;
}

NodeSignal laplacian_apply(const EmpiricalGraph& g, const NodeSignal& w) {
  check_signal(w, g.node_count(), "laplacian_apply");
  // Accumulated edgewise so constant signals map to exact zero.
  NodeSignal out = NodeSignal::Zero(w.rows(), g.node_count());
  for (const Edge& ed : g.edges()) {
    const auto diff = (ed.weight * (w.col(ed.i) - w.col(ed.j))).eval();
    out.col(ed.i) += diff;
    out.col(ed.j) -= diff;
  }
  return out;
}

namespace {

Eigen::MatrixXd dense_laplacian(const EmpiricalGraph& g) {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(g.node_count(), g.node_count());
  for (const Edge& ed : g.edges()) {
    lap(ed.i, ed.i) += ed.weight;
    lap(ed.j, ed.j) += ed.weight;
    lap(ed.i, ed.j) -= ed.weight;
    lap(ed.j, ed.i) -= ed.weight;
  }
  return lap;
}

double spectral_gap_power_iteration(const EmpiricalGraph& g) {
  // Largest eigenvalue of c I - L on the complement of the constant vector.
  const int n = g.node_count();
  const double shift = 2.0 * *std::max_element(g.degrees().begin(), g.degrees().end());
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = std::cos(1.0 + 0.7 * i);  // fixed start vector
  auto deflate = [&](Eigen::VectorXd& x) { x.array() -= x.mean(); };
  deflate(v);
  v.normalize();
  double ev = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    NodeSignal lw = laplacian_apply(g, v.transpose());
    Eigen::VectorXd next = shift * v - lw.transpose().col(0);
    deflate(next);
    const double norm = next.norm();
    if (norm == 0.0) break;
    next /= norm;
    const double prev = ev;
    NodeSignal lnext = laplacian_apply(g, next.transpose());
    ev = next.dot(shift * next - lnext.transpose().col(0));
    v = next;
    if (iter > 10 && std::abs(ev - prev) <= 1e-9 * std::abs(shift)) break;
  }
  return shift - ev;
}

}  // namespace

double spectral_gap(const EmpiricalGraph& g) {
  auto comp = g.connected_components();
  for (int i = 0; i < g.node_count(); ++i) {
    if (comp[static_cast<size_t>(i)] != 0) {
      std::ostringstream msg;
      msg << "graph is disconnected: node " << i << " lies in component "
          << comp[static_cast<size_t>(i)];
      throw std::domain_error(msg.str());
    }
  }
  if (g.node_count() <= 2000) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_laplacian(g),
                                                          Eigen::EigenvaluesOnly);
    return solver.eigenvalues()[1];
  }
  return spectral_gap_power_iteration(g);
}

double partition_spectral_gap(const EmpiricalGraph& g, const Partition& p) {
  double gap = std::numeric_limits<double>::infinity();
  for (int c = 0; c < p.cluster_count(); ++c) {
    const auto& nodes = p.cluster(c);
    if (nodes.size() == 1) continue;
    EmpiricalGraph sub = induced_subgraph(g, nodes);
    gap = std::min(gap, spectral_gap(sub));
  }
  return gap;
}

EmpiricalGraph induced_subgraph(const EmpiricalGraph& g, const std::vector<int>& nodes,
                                std::vector<int>* node_map) {
  std::vector<int> local(static_cast<size_t>(g.node_count()), -1);
  for (size_t k = 0; k < nodes.size(); ++k) local[static_cast<size_t>(nodes[k])] = static_cast<int>(k);
  std::vector<Edge> edges;
  for (const Edge& ed : g.edges()) {
    int a = local[static_cast<size_t>(ed.i)];
    int b = local[static_cast<size_t>(ed.j)];
    if (a >= 0 && b >= 0) edges.push_back({a, b, ed.weight});
  }
  if (node_map) *node_map = local;
  return EmpiricalGraph(static_cast<int>(nodes.size()), std::move(edges));
}

double max_flow(const EmpiricalGraph& g, int source, const std::vector<int>& sinks,
                const std::vector<double>& capacities) {
  if (sinks.empty()) throw std::invalid_argument("sink set must be nonempty");
  for (int s : sinks)
    if (s == source) throw std::invalid_argument("source must not be a sink");
  if (static_cast<int>(capacities.size()) != g.edge_count())
    throw std::invalid_argument("capacity vector size mismatch");

  // Directed arc list: two arcs per undirected edge plus one per sink to the
  // super sink. Paired arcs sit at indices 2k, 2k+1.
  const int n = g.node_count() + 1;
  const int super_sink = g.node_count();
  std::vector<int> head, next_arc;
  std::vector<double> residual;
  std::vector<int> first(static_cast<size_t>(n), -1);
  auto add_arc_pair = [&](int a, int b, double cap_ab, double cap_ba) {
    head.push_back(b);
    residual.push_back(cap_ab);
    next_arc.push_back(first[static_cast<size_t>(a)]);
    first[static_cast<size_t>(a)] = static_cast<int>(head.size()) - 1;
    head.push_back(a);
    residual.push_back(cap_ba);
    next_arc.push_back(first[static_cast<size_t>(b)]);
    first[static_cast<size_t>(b)] = static_cast<int>(head.size()) - 1;
  };
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    const double c = capacities[static_cast<size_t>(e)];
    if (c < 0.0) throw std::invalid_argument("negative capacity");
    add_arc_pair(ed.i, ed.j, c, c);
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (int s : sinks) add_arc_pair(s, super_sink, inf, 0.0);

  constexpr double kEps = 1e-12;
  double flow = 0.0;
  for (;;) {
    // BFS for a shortest augmenting path.
    std::vector<int> pred_arc(static_cast<size_t>(n), -1);
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::deque<int> queue{source};
    seen[static_cast<size_t>(source)] = 1;
    while (!queue.empty() && !seen[static_cast<size_t>(super_sink)]) {
      int v = queue.front();
      queue.pop_front();
      for (int a = first[static_cast<size_t>(v)]; a >= 0; a = next_arc[static_cast<size_t>(a)]) {
        int to = head[static_cast<size_t>(a)];
        if (!seen[static_cast<size_t>(to)] && residual[static_cast<size_t>(a)] > kEps) {
          seen[static_cast<size_t>(to)] = 1;
          pred_arc[static_cast<size_t>(to)] = a;
          queue.push_back(to);
        }
      }
    }
    if (!seen[static_cast<size_t>(super_sink)]) break;
    double bottleneck = inf;
    for (int v = super_sink; v != source;) {
      int a = pred_arc[static_cast<size_t>(v)];
      bottleneck = std::min(bottleneck, residual[static_cast<size_t>(a)]);
      v = head[static_cast<size_t>(a ^ 1)];
    }
    for (int v = super_sink; v != source;) {
      int a = pred_arc[static_cast<size_t>(v)];
      residual[static_cast<size_t>(a)] -= bottleneck;
      residual[static_cast<size_t>(a ^ 1)] += bottleneck;
      v = head[static_cast<size_t>(a ^ 1)];
    }
    flow += bottleneck;
  }
  return flow;
}

ClusterConnectivity normalized_connectivity(const EmpiricalGraph& g, const Partition& p,
                                            const std::vector<int>& representatives) {
  if (static_cast<int>(representatives.size()) != p.cluster_count())
    throw std::invalid_argument("one representative per cluster required");
  auto boundary = p.boundary_edges(g);
  ClusterConnectivity out;
  out.per_cluster.assign(static_cast<size_t>(p.cluster_count()),
                         std::numeric_limits<double>::infinity());
  double sum = 0.0;
  int finite = 0;
  for (int c = 0; c < p.cluster_count(); ++c) {
    if (boundary.empty()) continue;
    const int rep = representatives[static_cast<size_t>(c)];
    if (p.cluster_of(rep) != c) throw std::invalid_argument("representative outside cluster");
    // In-cluster endpoints of boundary edges.
    std::set<int> sink_set;
    for (int e : boundary) {
      const Edge& ed = g.edge(e);
      if (p.cluster_of(ed.i) == c) sink_set.insert(ed.i);
      if (p.cluster_of(ed.j) == c) sink_set.insert(ed.j);
    }
    if (sink_set.empty()) continue;  // no boundary touches this cluster
    double value;
    if (sink_set.count(rep)) {
      value = std::numeric_limits<double>::infinity();
    } else {
      std::vector<int> local;
      EmpiricalGraph sub = induced_subgraph(g, p.cluster(c), &local);
      std::vector<double> caps(static_cast<size_t>(sub.edge_count()));
      for (int e = 0; e < sub.edge_count(); ++e) caps[static_cast<size_t>(e)] = sub.edge(e).weight;
      std::vector<int> sinks;
      for (int s : sink_set) sinks.push_back(local[static_cast<size_t>(s)]);
      value = max_flow(sub, local[static_cast<size_t>(rep)], sinks, caps) /
              static_cast<double>(boundary.size());
    }
    out.per_cluster[static_cast<size_t>(c)] = value;
    if (std::isfinite(value)) {
      sum += value;
      ++finite;
    }
  }
  out.mean = finite > 0 ? sum / finite : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace nlasso
