#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "nlasso/exp_family.hpp"
#include "nlasso/graph.hpp"

namespace nlasso {

struct TwoClusterSpec {
  int cluster_size = 40;
  double avg_degree = 10.0;
  int inter_cluster_edges = 1;
  Eigen::Vector2d weights_a{1.0, 1.0};
  Eigen::Vector2d weights_b{-1.0, -1.0};
  int labels_per_cluster = 3;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  int connectivity_retries = 200;
};

struct TwoClusterInstance {
  std::shared_ptr<EmpiricalGraph> graph;
  std::shared_ptr<GaussianLinearModel> model;
  NodeSignal truth;  // 2 x N
  std::vector<int> training_set;
  std::shared_ptr<Partition> partition;
};

/// Two G(n,p) clusters with target average degree, joined by uniformly
/// drawn inter-cluster edges. Features i.i.d. uniform on the unit circle,
/// labels y = x^T w_bar + noise, fixed number of labeled nodes per cluster.
TwoClusterInstance gen_two_cluster(const TwoClusterSpec& spec);

struct ChainSignalInstance {
  std::shared_ptr<EmpiricalGraph> graph;
  std::shared_ptr<ScalarSignalModel> model;
  NodeSignal truth;  // 1 x N, +1 on the first half, -1 on the second
  std::vector<int> training_set;  // {0,1,2,N-3,N-2,N-1}
};

/// Chain graph with a piecewise-constant +/-1 signal split at N/2 and
/// Gaussian label noise. Requires N >= 8.
ChainSignalInstance gen_chain_signal(int node_count, double sigma, std::uint64_t seed);

struct ImageInstance {
  std::shared_ptr<EmpiricalGraph> graph;   // 4-neighbor grid, unit weights
  std::shared_ptr<LogisticModel> model;    // standardized RGB features
  std::vector<int> training_set;           // background (+foreground) seed pixels
  std::vector<int> seed_labels;            // -1 background, +1 foreground, per training node
  int width = 0;
  int height = 0;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<double> red, green, blue;  // row-major, values in [0,1]
  int index(int row, int col) const { return row * width + col; }
};

/// Grid-graph logistic instance; training labels derived from the
/// normalized redness thresholds 1/2 (background) and 9/10 (foreground).
ImageInstance image_to_instance(const RgbImage& pixels);

/// Symmetrized K-nearest-neighbor graph with unit weights; ties broken by
/// node index.
EmpiricalGraph knn_graph(const std::vector<Eigen::VectorXd>& coordinates, int k);

/// Smooth spatial temperature field plus noise; stands in for station
/// measurements. Returns per-station coordinates and a series of daily
/// means (days x stations).
struct WeatherLikeData {
  std::vector<Eigen::VectorXd> coordinates;
  Eigen::MatrixXd daily_means;
};
WeatherLikeData gen_weather_like(int stations, int days, double noise_sigma, std::uint64_t seed);

}  // namespace nlasso
