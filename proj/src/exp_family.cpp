#include "nlasso/exp_family.hpp"

#include <cmath>
#include <stdexcept>

namespace nlasso {

GaussianLinearModel::GaussianLinearModel(Eigen::MatrixXd features, Eigen::VectorXd labels,
                                         Eigen::VectorXd sigma2)
    : features_(std::move(features)), labels_(std::move(labels)), sigma2_(std::move(sigma2)) {
  const int n = node_count();
  if (labels_.size() != n) throw std::invalid_argument("label count mismatch");
  if (sigma2_.size() == 0) sigma2_ = Eigen::VectorXd::Ones(n);
  if (sigma2_.size() != n) throw std::invalid_argument("sigma2 count mismatch");
  for (int i = 0; i < n; ++i)
    if (!(sigma2_[i] > 0.0)) throw std::invalid_argument("noise variance must be positive");
  stats_.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    stats_.push_back((labels_[i] / sigma2_[i]) * features_.col(i));
}

double GaussianLinearModel::log_partition(int i, const Eigen::VectorXd& w) const {
  const double s = w.dot(features_.col(i));
  return s * s / (2.0 * sigma2_[i]);
}

Eigen::VectorXd GaussianLinearModel::grad_log_partition(int i, const Eigen::VectorXd& w) const {
  return (w.dot(features_.col(i)) / sigma2_[i]) * features_.col(i);
}

Eigen::MatrixXd GaussianLinearModel::hessian_log_partition(int i, const Eigen::VectorXd&) const {
  const Eigen::VectorXd x = features_.col(i);
  return (x * x.transpose()) / sigma2_[i];
}

double GaussianLinearModel::fim_upper_bound(int i) const {
  return features_.col(i).squaredNorm() / sigma2_[i];
}

LogisticModel::LogisticModel(Eigen::MatrixXd features, Eigen::VectorXd labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  const int n = node_count();
  if (labels_.size() != n) throw std::invalid_argument("label count mismatch");
  for (int i = 0; i < n; ++i)
    if (labels_[i] != 1.0 && labels_[i] != -1.0)
      throw std::invalid_argument("logistic labels must be -1 or +1");
  stats_.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) stats_.push_back(0.5 * labels_[i] * features_.col(i));
}

double LogisticModel::log_partition(int i, const Eigen::VectorXd& w) const {
  // log(exp(s/2) + exp(-s/2)) = |s|/2 + log(1 + exp(-|s|))
  const double s = std::abs(w.dot(features_.col(i)));
  return 0.5 * s + std::log1p(std::exp(-s));
}

Eigen::VectorXd LogisticModel::grad_log_partition(int i, const Eigen::VectorXd& w) const {
  const double s = w.dot(features_.col(i));
  return 0.5 * std::tanh(0.5 * s) * features_.col(i);
}

Eigen::MatrixXd LogisticModel::hessian_log_partition(int i, const Eigen::VectorXd& w) const {
  const Eigen::VectorXd x = features_.col(i);
  const double c = std::cosh(std::min(std::abs(0.5 * w.dot(x)), 350.0));
  return (x * x.transpose()) * (0.25 / (c * c));
}

double LogisticModel::fim_upper_bound(int i) const {
  return features_.col(i).squaredNorm() / 4.0;
}

// `labels` is passed by copy below: argument evaluation order is unspecified,
// so moving it would race with the labels.size() reads.
ScalarSignalModel::ScalarSignalModel(Eigen::VectorXd labels, double sigma2)
    : GaussianLinearModel(Eigen::MatrixXd::Ones(1, labels.size()), labels,
                          Eigen::VectorXd::Constant(labels.size(), sigma2)) {}

double neg_log_likelihood(const ExpFamilyModel& model, const NodeSignal& w,
                          const std::vector<int>& training_set) {
  if (training_set.empty()) throw std::invalid_argument("training set must be nonempty");
  if (w.cols() != model.node_count() || w.rows() != model.dim())
    throw std::invalid_argument("signal shape mismatch");
  double total = 0.0;
  for (int i : training_set) {
    const Eigen::VectorXd wi = w.col(i);
    total += -model.sufficient_statistic(i).dot(wi) + model.log_partition(i, wi);
  }
  return total / static_cast<double>(training_set.size());
}

}  // namespace nlasso
