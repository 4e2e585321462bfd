#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "nlasso/exp_family.hpp"
#include "nlasso/graph.hpp"

namespace nlasso {

/// Raised when an iteration produces non-finite values.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Diagonal primal/dual step sizes: sigma_e = 1/(2 A_e), tau_i = tau / d_i.
struct Preconditioners {
  Eigen::VectorXd edge_sigma;
  Eigen::VectorXd node_tau;
};

Preconditioners make_preconditioners(const EmpiricalGraph& g, double tau);

/// Power-iteration estimate of ||Sigma^{1/2} D T^{1/2}||^2; must be < 1 for
/// the fixed-point iterations to converge.
double scaled_operator_norm_sq(const EmpiricalGraph& g, const Preconditioners& pre,
                               int max_iterations = 500);

enum class PrimalUpdateMode { kClosedForm, kFixedPoint, kNewtonStep };

struct SolverConfig {
  double lambda = 1.0;
  double tau = 0.9;
  int max_iterations = 1000;
  double rel_change_tol = 0.0;  // 0 disables the early stop
  PrimalUpdateMode mode = PrimalUpdateMode::kFixedPoint;
  double inexactness_floor = 1e-3;  // eps_0 in the schedule e_k = min(eps_0, 1/k^2)
};

struct SolverHistory {
  std::vector<double> objective;
  std::vector<double> iterate_change;
  std::vector<double> max_dual_norm;
};

struct SolverResult {
  NodeSignal weights;
  EdgeSignal dual;
  SolverHistory history;
  int iterations = 0;
  bool converged_by_tolerance = false;
};

/// Blockwise Euclidean projection onto the lambda-ball (the resolvent of the
/// TV dual, equivalently the paper's clipping rule).
EdgeSignal dual_resolvent(const EdgeSignal& u_bar, double lambda);

/// Exact minimizer of -w^T t + Phi(w) + tau_tilde ||w - w_bar||^2 for a
/// Gaussian-linear node, tau_tilde = M / (2 tau_i), via Sherman-Morrison.
Eigen::VectorXd primal_update_gaussian(const GaussianLinearModel& model, int node,
                                       const Eigen::VectorXd& w_bar, double tau_i, int train_size);

/// Contraction fixed-point iteration w <- w_bar + (tau_i/M)(t - grad Phi(w)),
/// run long enough that the geometric bound guarantees error <= target_error.
/// Throws if R = (tau_i/M) * fim bound >= 1.
Eigen::VectorXd primal_update_fixed_point(const ExpFamilyModel& model, int node,
                                          const Eigen::VectorXd& w_bar, double tau_i,
                                          int train_size, double target_error);

/// Single Newton step on the node objective from w_bar.
Eigen::VectorXd primal_update_newton(const ExpFamilyModel& model, int node,
                                     const Eigen::VectorXd& w_bar, double tau_i, int train_size);

/// Regularized empirical risk (the quantity the solver minimizes).
double objective(const EmpiricalGraph& g, const ExpFamilyModel& model,
                 const std::vector<int>& training_set, const NodeSignal& w, double lambda);

/// Preconditioned primal-dual iteration. Gaussian-linear models always take
/// the closed-form primal update; cfg.mode selects the update for other
/// models.
SolverResult solve(const EmpiricalGraph& g, const ExpFamilyModel& model,
                   const std::vector<int>& training_set, const SolverConfig& cfg);

}  // namespace nlasso
