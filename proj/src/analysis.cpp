#include "nlasso/analysis.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nlasso {

NodeSignal expand_clustered(const ClusteredSignalSpec& spec) {
  const Partition& p = *spec.partition;
  if (spec.values.cols() != p.cluster_count())
    throw std::invalid_argument("one value column per cluster required");
  NodeSignal out(spec.values.rows(), p.assignment().size());
  for (size_t i = 0; i < p.assignment().size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = spec.values.col(p.assignment()[i]);
  return out;
}

double nmse(const NodeSignal& w_hat, const NodeSignal& w_bar) {
  if (w_hat.rows() != w_bar.rows() || w_hat.cols() != w_bar.cols())
    throw std::invalid_argument("signal shape mismatch");
  const double denom = w_bar.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("true signal is identically zero");
  return (w_bar - w_hat).squaredNorm() / denom;
}

Theorem1Result theorem1_bound(const Theorem1Params& p) {
  if (!(p.asspt3_L > 3.0)) throw std::invalid_argument("compatibility constant L must exceed 3");
  if (!(p.compat_K > 1.0 && p.compat_K < p.asspt3_L - 2.0))
    throw std::invalid_argument("compatibility constant K must lie in (1, L-2)");
  if (p.cluster_sizes.empty()) throw std::invalid_argument("cluster sizes required");
  if (!(p.eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(p.fim_U > 0.0) || p.train_size < 1 || !(p.partition_gap > 0.0) ||
      !(p.max_degree > 0.0) || p.edge_count < 1 || p.dim < 1)
    throw std::invalid_argument("invalid bound parameters");

  Theorem1Result r;
  r.kappa = (p.compat_K + 3.0) / (p.asspt3_L - 3.0);
  r.kappa_proof_variant = (p.compat_K + 1.0) / (p.asspt3_L - 1.0);
  r.lambda = p.eta / (5.0 * r.kappa * r.kappa);

  const double eta2 = p.eta * p.eta;
  const double kappa2 = r.kappa * r.kappa;
  int min_cluster = p.cluster_sizes.front();
  for (int s : p.cluster_sizes) min_cluster = std::min(min_cluster, s);
  const double cluster_term =
      2.0 * static_cast<double>(p.cluster_sizes.size()) *
      std::exp(-static_cast<double>(min_cluster) * eta2 / (8.0 * 25.0 * p.dim * p.fim_U * kappa2));
  const double edge_term =
      2.0 * static_cast<double>(p.edge_count) *
      std::exp(-static_cast<double>(p.train_size) * p.partition_gap * p.partition_gap * eta2 /
               (64.0 * 25.0 * p.fim_U * p.dim * p.max_degree * p.max_degree * kappa2 * kappa2));
  r.bound = cluster_term + edge_term;
  r.vacuous = r.bound >= 1.0;
  return r;
}

CompatibilityEstimate compatibility_ratio(const EmpiricalGraph& g, const Partition& p,
                                          const std::vector<int>& training_set, double asspt3_L,
                                          int dim, int samples, std::uint64_t seed) {
  if (training_set.empty()) throw std::invalid_argument("training set must be nonempty");
  if (samples < 1) throw std::invalid_argument("at least one sample required");

  const auto boundary = p.boundary_edges(g);
  std::vector<char> is_boundary(static_cast<size_t>(g.edge_count()), 0);
  for (int e : boundary) is_boundary[static_cast<size_t>(e)] = 1;
  std::vector<int> interior;
  for (int e = 0; e < g.edge_count(); ++e)
    if (!is_boundary[static_cast<size_t>(e)]) interior.push_back(e);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  CompatibilityEstimate est;
  est.k_est = 0.0;
  est.worst_signal = Eigen::MatrixXd::Zero(dim, p.cluster_count());

  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd values(dim, p.cluster_count());
    for (int c = 0; c < p.cluster_count(); ++c)
      for (int r = 0; r < dim; ++r) values(r, c) = gauss(rng);
    ClusteredSignalSpec spec{&p, values};
    NodeSignal z = expand_clustered(spec);
    const double norm = z.norm();
    if (norm == 0.0) continue;
    z /= norm;

    const double tv_boundary = tv_norm(g, z, std::span<const int>(boundary));
    const double tv_interior = tv_norm(g, z, std::span<const int>(interior));
    double train_mass = 0.0;
    for (int i : training_set) train_mass += z.col(i).norm();

    const double excess = asspt3_L * tv_boundary - tv_interior;
    if (excess <= 0.0) continue;  // any K works for this sample
    double needed;
    if (train_mass > 0.0) {
      needed = excess / train_mass;
    } else {
      needed = std::numeric_limits<double>::infinity();
    }
    if (needed > est.k_est) {
      est.k_est = needed;
      est.worst_signal = values / norm;
    }
  }
  return est;
}

PseudoInverseBound pseudo_inverse_column_bound(const EmpiricalGraph& g, int dim) {
  const double gap = spectral_gap(g);  // throws on disconnected input
  PseudoInverseBound out;
  out.bound = std::sqrt(2.0 * dim * g.max_weight()) / gap;
  out.exact = std::numeric_limits<double>::quiet_NaN();
  out.exact_computed = false;
  if (g.node_count() > 200) return out;

  // Dense scalar incidence matrix; the Kronecker structure makes the block
  // (2,inf) norms equal to the scalar entry maxima.
  Eigen::MatrixXd dmat = Eigen::MatrixXd::Zero(g.edge_count(), g.node_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    dmat(e, ed.i) = ed.weight;
    dmat(e, ed.j) = -ed.weight;
  }
  Eigen::MatrixXd pinv =
      dmat.completeOrthogonalDecomposition().pseudoInverse();  // N x E
  out.exact = pinv.cwiseAbs().maxCoeff();
  out.exact_computed = true;
  if (out.exact > out.bound * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "pseudo-inverse column norm " << out.exact << " exceeds bound " << out.bound;
    throw std::logic_error(msg.str());
  }
  return out;
}

}  // namespace nlasso
