#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nlasso/graph.hpp"

namespace nlasso {

/// Piecewise-constant signal: one d-vector per cluster of a partition.
struct ClusteredSignalSpec {
  const Partition* partition;
  Eigen::MatrixXd values;  // d x cluster_count
};

NodeSignal expand_clustered(const ClusteredSignalSpec& spec);

/// ||w_bar - w_hat||^2 / ||w_bar||^2. Throws if w_bar is identically zero.
double nmse(const NodeSignal& w_hat, const NodeSignal& w_bar);

struct Theorem1Params {
  double compat_K = 2.0;   // K of the compatibility condition
  double asspt3_L = 7.0;   // L of the compatibility condition (distinct from the FIM bound)
  double fim_U = 1.0;      // spectral upper bound on the FIM
  int dim = 1;
  std::vector<int> cluster_sizes;
  int train_size = 1;
  double partition_gap = 1.0;  // rho_P
  double max_degree = 1.0;     // infinity norm of the weight matrix
  int edge_count = 1;
  double eta = 1.0;            // target TV error level
};

struct Theorem1Result {
  double kappa;              // (K+3)/(L-3)
  double kappa_proof_variant;  // (K+1)/(L-1); reported alongside, see diag output
  double lambda;             // eta / (5 kappa^2)
  double bound;              // right-hand side of the error probability bound
  bool vacuous;              // bound >= 1
};

/// Evaluates the error-probability bound. Throws on L <= 3 or K outside
/// (1, L-2).
Theorem1Result theorem1_bound(const Theorem1Params& p);

struct CompatibilityEstimate {
  double k_est;                 // minimal K covering all samples (lower estimate)
  Eigen::MatrixXd worst_signal;  // per-cluster values of the worst sample (d x clusters)
};

/// Randomized check of the compatibility condition
/// L ||z||_boundary <= K ||z||_M + ||z||_interior over piecewise-constant
/// samples. An estimate of the worst case, not a certificate.
CompatibilityEstimate compatibility_ratio(const EmpiricalGraph& g, const Partition& p,
                                          const std::vector<int>& training_set, double asspt3_L,
                                          int dim, int samples, std::uint64_t seed);

struct PseudoInverseBound {
  double bound;        // sqrt(2 d max A) / rho(G)
  double exact;        // max column-block (2,inf) norm of D^+; NaN when skipped
  bool exact_computed;
};

/// Bound on the column blocks of the incidence pseudo-inverse; the exact
/// value is computed densely for N <= 200 and checked against the bound.
PseudoInverseBound pseudo_inverse_column_bound(const EmpiricalGraph& g, int dim = 1);

}  // namespace nlasso
