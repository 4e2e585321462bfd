#include "nlasso/solver.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nlasso {

Preconditioners make_preconditioners(const EmpiricalGraph& g, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
  Preconditioners pre;
  pre.edge_sigma.resize(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) pre.edge_sigma[e] = 1.0 / (2.0 * g.edge(e).weight);
  pre.node_tau.resize(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) pre.node_tau[i] = tau / g.degree(i);
  return pre;
}

double scaled_operator_norm_sq(const EmpiricalGraph& g, const Preconditioners& pre,
                               int max_iterations) {
  // Power iteration on T^{1/2} D^T Sigma D T^{1/2} (scalar blocks suffice).
  const int n = g.node_count();
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = std::sin(1.0 + 0.3 * i);
  v.normalize();
  double ev = 0.0;
  for (int iter = 0; iter < max_iterations; ++iter) {
    Eigen::VectorXd x = pre.node_tau.array().sqrt() * v.array();
    EdgeSignal dx = apply_incidence(g, x.transpose());
    for (int e = 0; e < g.edge_count(); ++e) dx(0, e) *= pre.edge_sigma[e];
    NodeSignal dtx = apply_incidence_adjoint(g, dx);
    Eigen::VectorXd next = pre.node_tau.array().sqrt() * dtx.row(0).transpose().array();
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    const double prev = ev;
    ev = v.dot(next);
    v = next / norm;
    if (iter > 5 && std::abs(ev - prev) <= 1e-12 + 1e-9 * std::abs(ev)) break;
  }
  return ev;
}

EdgeSignal dual_resolvent(const EdgeSignal& u_bar, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  EdgeSignal out = u_bar;
  for (int e = 0; e < out.cols(); ++e) {
    const double norm = out.col(e).norm();
    if (norm > lambda) out.col(e) *= lambda / norm;
  }
  return out;
}

Eigen::VectorXd primal_update_gaussian(const GaussianLinearModel& model, int node,
                                       const Eigen::VectorXd& w_bar, double tau_i,
                                       int train_size) {
  if (!(tau_i > 0.0)) throw std::invalid_argument("tau_i must be positive");
  const double tau_tilde = static_cast<double>(train_size) / (2.0 * tau_i);
  // Stationarity: (x x^T / sigma^2 + 2 tau_tilde I) w = t + 2 tau_tilde w_bar.
  const Eigen::VectorXd u = model.feature(node) / std::sqrt(model.noise_variance(node));
  const Eigen::VectorXd b =
      model.sufficient_statistic(node) + 2.0 * tau_tilde * w_bar;
  const double a = 2.0 * tau_tilde;
  return b / a - u * (u.dot(b) / (a * (a + u.squaredNorm())));
}

Eigen::VectorXd primal_update_fixed_point(const ExpFamilyModel& model, int node,
                                          const Eigen::VectorXd& w_bar, double tau_i,
                                          int train_size, double target_error) {
  if (!(tau_i > 0.0)) throw std::invalid_argument("tau_i must be positive");
  const double scale = tau_i / static_cast<double>(train_size);
  const double contraction = scale * model.fim_upper_bound(node);
  if (contraction >= 1.0) {
    std::ostringstream msg;
    msg << "fixed-point contraction violated: R = " << contraction
        << " >= 1; decrease tau";
    throw std::invalid_argument(msg.str());
  }
  const Eigen::VectorXd& stat = model.sufficient_statistic(node);
  auto step = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return w_bar + scale * (stat - model.grad_log_partition(node, w));
  };
  Eigen::VectorXd w = step(w_bar);
  const double first_step = (w - w_bar).norm();
  if (first_step == 0.0 || contraction == 0.0) return w;
  // Geometric bound: after r steps the error is at most R^r/(1-R)*||w1 - w0||,
  // so r >= log[||w1 - w0|| / ((1-R) e_k)] / log(1/R) suffices.
  const double ratio = first_step / ((1.0 - contraction) * target_error);
  int steps = 1;
  if (ratio > 1.0) {
    steps = std::max(1, static_cast<int>(std::ceil(std::log(ratio) / -std::log(contraction))));
  }
  for (int r = 1; r < steps; ++r) w = step(w);
  return w;
}

Eigen::VectorXd primal_update_newton(const ExpFamilyModel& model, int node,
                                     const Eigen::VectorXd& w_bar, double tau_i,
                                     int train_size) {
  if (!(tau_i > 0.0)) throw std::invalid_argument("tau_i must be positive");
  const double tau_tilde = static_cast<double>(train_size) / (2.0 * tau_i);
  const Eigen::VectorXd grad = -model.sufficient_statistic(node) +
                               model.grad_log_partition(node, w_bar);
  Eigen::MatrixXd hess = model.hessian_log_partition(node, w_bar);
  hess.diagonal().array() += 2.0 * tau_tilde;
  return w_bar - hess.llt().solve(grad);
}

double objective(const EmpiricalGraph& g, const ExpFamilyModel& model,
                 const std::vector<int>& training_set, const NodeSignal& w, double lambda) {
  return neg_log_likelihood(model, w, training_set) + lambda * tv_norm(g, w);
}

SolverResult solve(const EmpiricalGraph& g, const ExpFamilyModel& model,
                   const std::vector<int>& training_set, const SolverConfig& cfg) {
  if (!g.is_connected()) throw std::invalid_argument("solver requires a connected graph");
  if (training_set.empty()) throw std::invalid_argument("training set must be nonempty");
  if (model.node_count() != g.node_count())
    throw std::invalid_argument("model/graph node count mismatch");
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (cfg.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");

  const Preconditioners pre = make_preconditioners(g, cfg.tau);
  const double cert = scaled_operator_norm_sq(g, pre);
  if (cert >= 1.0) {
    std::ostringstream msg;
    msg << "step-size condition violated: ||Sigma^1/2 D T^1/2||^2 = " << cert;
    throw std::invalid_argument(msg.str());
  }

  const int d = model.dim();
  const int n = g.node_count();
  const int m = static_cast<int>(training_set.size());
  std::vector<char> labeled(static_cast<size_t>(n), 0);
  for (int i : training_set) labeled[static_cast<size_t>(i)] = 1;

  const auto* gaussian = dynamic_cast<const GaussianLinearModel*>(&model);

  NodeSignal w = NodeSignal::Zero(d, n);
  EdgeSignal u = EdgeSignal::Zero(d, g.edge_count());
  SolverResult result;

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    // w_bar = w_k - T D^T u_k
    const NodeSignal dtu = apply_incidence_adjoint(g, u);
    NodeSignal w_bar(d, n);
    for (int i = 0; i < n; ++i) w_bar.col(i) = w.col(i) - pre.node_tau[i] * dtu.col(i);

    const double target_error = std::min(cfg.inexactness_floor, 1.0 / (static_cast<double>(k) * k));
    NodeSignal w_next = w_bar;
    for (int i : training_set) {
      if (gaussian) {
        w_next.col(i) = primal_update_gaussian(*gaussian, i, w_bar.col(i), pre.node_tau[i], m);
      } else {
        switch (cfg.mode) {
          case PrimalUpdateMode::kClosedForm:
          case PrimalUpdateMode::kFixedPoint:
            w_next.col(i) =
                primal_update_fixed_point(model, i, w_bar.col(i), pre.node_tau[i], m, target_error);
            break;
          case PrimalUpdateMode::kNewtonStep:
            w_next.col(i) = primal_update_newton(model, i, w_bar.col(i), pre.node_tau[i], m);
            break;
        }
      }
    }

    EdgeSignal u_bar = u + [&] {
      EdgeSignal du = apply_incidence(g, 2.0 * w_next - w);
      for (int e = 0; e < g.edge_count(); ++e) du.col(e) *= pre.edge_sigma[e];
      return du;
    }();
    u = dual_resolvent(u_bar, cfg.lambda);

    const double change = (w_next - w).norm();
    double max_dual = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) max_dual = std::max(max_dual, u.col(e).norm());
    result.history.objective.push_back(objective(g, model, training_set, w_next, cfg.lambda));
    result.history.iterate_change.push_back(change);
    result.history.max_dual_norm.push_back(max_dual);

    if (!w_next.allFinite() || !u.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite iterate at iteration " << k;
      throw NumericalError(msg.str());
    }

    const double prev_norm = w.norm();
    w = w_next;
    result.iterations = k;
    if (cfg.rel_change_tol > 0.0 && change <= cfg.rel_change_tol * std::max(1.0, prev_norm)) {
      result.converged_by_tolerance = true;
      break;
    }
  }

  result.weights = std::move(w);
  result.dual = std::move(u);
  return result;
}

}  // namespace nlasso
