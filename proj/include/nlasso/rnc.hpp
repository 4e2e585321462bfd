#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nlasso/graph.hpp"

namespace nlasso {

struct RncConfig {
  double lambda = 1.0;
  double cg_tolerance = 1e-10;
  int cg_max_iterations = 10000;
};

/// Laplacian-regularized least squares: minimizer of
/// sum_{i in M} (y_i - w_i)^2 + lambda w^T L w, solved by conjugate
/// gradients on (S + lambda L) w = S y with S the labeled-node selector.
/// Returns a 1 x N signal.
NodeSignal rnc_solve_scalar(const EmpiricalGraph& g, const std::vector<int>& labeled_nodes,
                            const Eigen::VectorXd& labels, const RncConfig& cfg);

}  // namespace nlasso
