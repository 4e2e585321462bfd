#include "nlasso/rnc.hpp"

#include <random>

#include "doctest.h"

using namespace nlasso;

namespace {

EmpiricalGraph chain_graph(int n, double weight = 1.0) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
  return EmpiricalGraph(n, std::move(edges));
}

EmpiricalGraph random_connected_graph(std::mt19937_64& rng, int n) {
  std::vector<Edge> edges;
  std::uniform_real_distribution<double> weight(0.2, 3.0);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    edges.push_back({parent(rng), i, weight(rng)});
  }
  for (int i = 0; i + 3 < n; i += 3) {
    bool dup = false;
    for (const Edge& e : edges) dup = dup || (e.i == i && e.j == i + 3);
    if (!dup) edges.push_back({i, i + 3, weight(rng)});
  }
  return EmpiricalGraph(n, std::move(edges));
}

std::vector<int> all_nodes(int n) {
  std::vector<int> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = i;
  return out;
}

// Residual of (S + lambda L) w = S y, computed without the CG code path.
double normal_equation_residual(const EmpiricalGraph& g, const std::vector<int>& labeled,
                                const Eigen::VectorXd& labels, double lambda,
                                const NodeSignal& w) {
  Eigen::VectorXd res = lambda * laplacian_apply(g, w).row(0).transpose();
  for (size_t k = 0; k < labeled.size(); ++k) {
    res[labeled[k]] += w(0, labeled[k]) - labels[static_cast<Eigen::Index>(k)];
  }
  return res.norm();
}

}  // namespace

TEST_CASE("two-node hand solve") {
  EmpiricalGraph g = chain_graph(2);
  Eigen::VectorXd y(2);
  y << 1.0, -1.0;
  RncConfig cfg;
  cfg.lambda = 1.0;
  const NodeSignal w = rnc_solve_scalar(g, {0, 1}, y, cfg);
  // [[2,-1],[-1,2]] w = (1,-1)  =>  w = (1/3, -1/3).
  CHECK(w(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(w(0, 1) == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("interpolation limit as lambda vanishes") {
  EmpiricalGraph g = chain_graph(6);
  Eigen::VectorXd y(6);
  y << 1.0, -0.5, 2.0, 0.0, 1.5, -2.0;
  RncConfig cfg;
  cfg.lambda = 1e-9;
  const NodeSignal w = rnc_solve_scalar(g, all_nodes(6), y, cfg);
  CHECK((w.row(0).transpose() - y).norm() <= 1e-6);
}

TEST_CASE("constant limit as lambda grows") {
  EmpiricalGraph g = chain_graph(5);
  Eigen::VectorXd y(5);
  y << 1.0, 2.0, 3.0, 4.0, 5.0;
  RncConfig cfg;
  cfg.lambda = 1e9;
  const NodeSignal w = rnc_solve_scalar(g, all_nodes(5), y, cfg);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(w(0, i) - 3.0) <= 1e-4);
}

TEST_CASE("label negation negates the solution") {
  std::mt19937_64 rng(111);
  EmpiricalGraph g = random_connected_graph(rng, 15);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::vector<int> labeled = {0, 3, 7, 11, 14};
  Eigen::VectorXd y(5);
  for (int k = 0; k < 5; ++k) y[k] = gauss(rng);
  RncConfig cfg;
  cfg.lambda = 0.7;
  const NodeSignal w_pos = rnc_solve_scalar(g, labeled, y, cfg);
  const NodeSignal w_neg = rnc_solve_scalar(g, labeled, -y, cfg);
  CHECK((w_pos + w_neg).norm() <= 1e-10);
}

TEST_CASE("normal-equation residual is small on random instances") {
  std::mt19937_64 rng(113);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 8 + 4 * trial;
    EmpiricalGraph g = random_connected_graph(rng, n);
    std::vector<int> labeled;
    for (int i = 0; i < n; i += 2) labeled.push_back(i);
    Eigen::VectorXd y(static_cast<Eigen::Index>(labeled.size()));
    for (Eigen::Index k = 0; k < y.size(); ++k) y[k] = gauss(rng);
    RncConfig cfg;
    cfg.lambda = 0.1 + 0.3 * trial;
    const NodeSignal w = rnc_solve_scalar(g, labeled, y, cfg);
    CHECK(normal_equation_residual(g, labeled, y, cfg.lambda, w) <= 1e-8);
  }
}

TEST_CASE("smoothness decreases along a lambda sweep") {
  std::mt19937_64 rng(127);
  std::normal_distribution<double> gauss(0.0, 1.0);
  EmpiricalGraph g = random_connected_graph(rng, 20);
  const std::vector<int> labeled = all_nodes(20);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) y[i] = gauss(rng);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    RncConfig cfg;
    cfg.lambda = lambda;
    const NodeSignal w = rnc_solve_scalar(g, labeled, y, cfg);
    const double smooth = (w.cwiseProduct(laplacian_apply(g, w))).sum();
    CHECK(smooth <= prev + 1e-10);
    prev = smooth;
  }
}

TEST_CASE("input validation") {
  EmpiricalGraph g = chain_graph(3);
  Eigen::VectorXd y(1);
  y << 1.0;
  RncConfig cfg;
  CHECK_THROWS_AS(rnc_solve_scalar(g, {}, Eigen::VectorXd(), cfg), std::invalid_argument);
  CHECK_THROWS_AS(rnc_solve_scalar(g, {0, 1}, y, cfg), std::invalid_argument);
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(rnc_solve_scalar(g, {0}, y, cfg), std::invalid_argument);
  cfg.lambda = 1.0;
  CHECK_THROWS_AS(rnc_solve_scalar(g, {5}, y, cfg), std::invalid_argument);
}
