#include "nlasso/rnc.hpp"

#include <cmath>
#include <stdexcept>

namespace nlasso {

NodeSignal rnc_solve_scalar(const EmpiricalGraph& g, const std::vector<int>& labeled_nodes,
                            const Eigen::VectorXd& labels, const RncConfig& cfg) {
  const int n = g.node_count();
  if (labeled_nodes.empty()) throw std::invalid_argument("at least one labeled node required");
  if (labels.size() != static_cast<Eigen::Index>(labeled_nodes.size()))
    throw std::invalid_argument("label count mismatch");
  if (!(cfg.lambda > 0.0))
    throw std::invalid_argument("lambda_rnc must be positive (system singular otherwise)");

  Eigen::VectorXd selector = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (size_t k = 0; k < labeled_nodes.size(); ++k) {
    const int i = labeled_nodes[k];
    if (i < 0 || i >= n) throw std::invalid_argument("labeled node out of range");
    selector[i] = 1.0;
    rhs[i] = labels[static_cast<Eigen::Index>(k)];
  }

  auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    NodeSignal lv = laplacian_apply(g, v.transpose());
    return selector.cwiseProduct(v) + cfg.lambda * lv.row(0).transpose();
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = rhs - apply(x);
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  const double stop = cfg.cg_tolerance * std::max(1.0, rhs.norm());
  for (int it = 0; it < cfg.cg_max_iterations && std::sqrt(rs) > stop; ++it) {
    const Eigen::VectorXd ap = apply(p);
    const double alpha = rs / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const double rs_next = r.squaredNorm();
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }
  return x.transpose();
}

}  // namespace nlasso
