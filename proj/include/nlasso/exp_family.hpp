#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "nlasso/graph.hpp"

namespace nlasso {

/// Per-node exponential-family model: sufficient statistic t^(i), log
/// partition Phi^(i) and its derivatives. Sufficient statistics are
/// precomputed at construction; the solver never sees raw attributes.
/// Implementations are immutable and safe for concurrent use.
class ExpFamilyModel {
 public:
  virtual ~ExpFamilyModel() = default;

  virtual int dim() const = 0;
  virtual int node_count() const = 0;

  virtual const Eigen::VectorXd& sufficient_statistic(int i) const = 0;
  virtual double log_partition(int i, const Eigen::VectorXd& w) const = 0;
  virtual Eigen::VectorXd grad_log_partition(int i, const Eigen::VectorXd& w) const = 0;
  virtual Eigen::MatrixXd hessian_log_partition(int i, const Eigen::VectorXd& w) const = 0;

  /// Upper bound on ||Hessian of Phi^(i)|| over the domain.
  virtual double fim_upper_bound(int i) const = 0;
  /// Lower spectral bound; 0 when no positive bound holds (e.g. logistic).
  virtual double fim_lower_bound(int i) const { return 0.0; }
};

/// Linear regression with Gaussian noise: t = (y/sigma^2) x,
/// Phi(w) = (w^T x)^2 / (2 sigma^2).
class GaussianLinearModel : public ExpFamilyModel {
 public:
  /// features: d x N, one column per node. sigma2 empty means all ones.
  GaussianLinearModel(Eigen::MatrixXd features, Eigen::VectorXd labels,
                      Eigen::VectorXd sigma2 = {});

  int dim() const override { return static_cast<int>(features_.rows()); }
  int node_count() const override { return static_cast<int>(features_.cols()); }
  const Eigen::VectorXd& sufficient_statistic(int i) const override {
    return stats_[static_cast<size_t>(i)];
  }
  double log_partition(int i, const Eigen::VectorXd& w) const override;
  Eigen::VectorXd grad_log_partition(int i, const Eigen::VectorXd& w) const override;
  Eigen::MatrixXd hessian_log_partition(int i, const Eigen::VectorXd& w) const override;
  double fim_upper_bound(int i) const override;
  double fim_lower_bound(int i) const override { return 0.0; }

  const Eigen::VectorXd feature(int i) const { return features_.col(i); }
  double label(int i) const { return labels_[i]; }
  double noise_variance(int i) const { return sigma2_[i]; }

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;
  Eigen::VectorXd sigma2_;
  std::vector<Eigen::VectorXd> stats_;
};

/// Logistic regression with labels in {-1,+1}: t = x y / 2,
/// Phi(w) = log(exp(w^T x / 2) + exp(-w^T x / 2)), overflow-safe.
class LogisticModel : public ExpFamilyModel {
 public:
  LogisticModel(Eigen::MatrixXd features, Eigen::VectorXd labels);

  int dim() const override { return static_cast<int>(features_.rows()); }
  int node_count() const override { return static_cast<int>(features_.cols()); }
  const Eigen::VectorXd& sufficient_statistic(int i) const override {
    return stats_[static_cast<size_t>(i)];
  }
  double log_partition(int i, const Eigen::VectorXd& w) const override;
  Eigen::VectorXd grad_log_partition(int i, const Eigen::VectorXd& w) const override;
  Eigen::MatrixXd hessian_log_partition(int i, const Eigen::VectorXd& w) const override;
  double fim_upper_bound(int i) const override;

  const Eigen::VectorXd feature(int i) const { return features_.col(i); }
  double label(int i) const { return labels_[i]; }

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;
  std::vector<Eigen::VectorXd> stats_;
};

/// Scalar signal in noise y = w + eps: Gaussian-linear with d = 1, x = 1.
class ScalarSignalModel : public GaussianLinearModel {
 public:
  ScalarSignalModel(Eigen::VectorXd labels, double sigma2);
};

/// (1/M) sum over the training set of -t^T w + Phi(w).
double neg_log_likelihood(const ExpFamilyModel& model, const NodeSignal& w,
                          const std::vector<int>& training_set);

}  // namespace nlasso
