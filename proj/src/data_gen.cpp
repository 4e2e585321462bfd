#include "nlasso/data_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nlasso {

namespace {

// G(n, p) with p chosen for the target average degree; retried until
// connected.
std::vector<Edge> random_cluster_edges(int n, double avg_degree, std::mt19937_64& rng,
                                       int retries) {
  const double p = std::min(1.0, avg_degree / static_cast<double>(n - 1));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < retries; ++attempt) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (unif(rng) < p) edges.push_back({i, j, 1.0});
    // Connectivity check via union-find.
    std::vector<int> parent(static_cast<size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[static_cast<size_t>(v)] != v) {
        parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
        v = parent[static_cast<size_t>(v)];
      }
      return v;
    };
    int components = n;
    for (const Edge& e : edges) {
      int a = find(e.i), b = find(e.j);
      if (a != b) {
        parent[static_cast<size_t>(a)] = b;
        --components;
      }
    }
    if (components == 1) return edges;
  }
  throw std::runtime_error("connectivity retry limit exceeded for random cluster");
}

}  // namespace

TwoClusterInstance gen_two_cluster(const TwoClusterSpec& spec) {
  if (spec.cluster_size < 2) throw std::invalid_argument("cluster_size must be >= 2");
  if (spec.labels_per_cluster < 1 || spec.labels_per_cluster > spec.cluster_size)
    throw std::invalid_argument("labels_per_cluster out of range");
  const int half = spec.cluster_size;
  const int n = 2 * half;
  const long max_inter = static_cast<long>(half) * half;
  if (spec.inter_cluster_edges < 0 || spec.inter_cluster_edges > max_inter)
    throw std::invalid_argument("inter_cluster_edges out of range");

  std::mt19937_64 rng(spec.seed);
  std::vector<Edge> edges = random_cluster_edges(half, spec.avg_degree, rng,
                                                 spec.connectivity_retries);
  {
    std::vector<Edge> second =
        random_cluster_edges(half, spec.avg_degree, rng, spec.connectivity_retries);
    for (Edge e : second) edges.push_back({e.i + half, e.j + half, 1.0});
  }
  // Inter-cluster edges drawn uniformly without replacement.
  std::set<std::pair<int, int>> chosen;
  std::uniform_int_distribution<int> pick(0, half - 1);
  while (static_cast<int>(chosen.size()) < spec.inter_cluster_edges)
    chosen.insert({pick(rng), pick(rng) + half});
  for (auto [a, b] : chosen) edges.push_back({a, b, 1.0});

  TwoClusterInstance inst;
  inst.graph = std::make_shared<EmpiricalGraph>(n, std::move(edges));

  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  Eigen::MatrixXd features(2, n);
  for (int i = 0; i < n; ++i) {
    const double a = angle(rng);
    features(0, i) = std::cos(a);
    features(1, i) = std::sin(a);
  }
  inst.truth.resize(2, n);
  for (int i = 0; i < n; ++i)
    inst.truth.col(i) = i < half ? spec.weights_a : spec.weights_b;
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::VectorXd labels(n);
  for (int i = 0; i < n; ++i)
    labels[i] = features.col(i).dot(inst.truth.col(i)) +
                (spec.noise_sigma > 0.0 ? spec.noise_sigma * noise(rng) : 0.0);
  inst.model = std::make_shared<GaussianLinearModel>(std::move(features), std::move(labels));

  for (int c = 0; c < 2; ++c) {
    std::vector<int> nodes(static_cast<size_t>(half));
    std::iota(nodes.begin(), nodes.end(), c * half);
    std::shuffle(nodes.begin(), nodes.end(), rng);
    nodes.resize(static_cast<size_t>(spec.labels_per_cluster));
    std::sort(nodes.begin(), nodes.end());
    inst.training_set.insert(inst.training_set.end(), nodes.begin(), nodes.end());
  }

  std::vector<int> assignment(static_cast<size_t>(n), 0);
  for (int i = half; i < n; ++i) assignment[static_cast<size_t>(i)] = 1;
  inst.partition = std::make_shared<Partition>(*inst.graph, std::move(assignment));
  return inst;
}

ChainSignalInstance gen_chain_signal(int node_count, double sigma, std::uint64_t seed) {
  if (node_count < 8) throw std::invalid_argument("chain instance requires N >= 8");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < node_count; ++i) edges.push_back({i, i + 1, 1.0});
  ChainSignalInstance inst;
  inst.graph = std::make_shared<EmpiricalGraph>(node_count, std::move(edges));
  inst.truth.resize(1, node_count);
  const int half = node_count / 2;
  for (int i = 0; i < node_count; ++i) inst.truth(0, i) = i < half ? 1.0 : -1.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::VectorXd labels(node_count);
  for (int i = 0; i < node_count; ++i)
    labels[i] = inst.truth(0, i) + (sigma > 0.0 ? sigma * noise(rng) : 0.0);
  const double sigma2 = sigma > 0.0 ? sigma * sigma : 1.0;
  inst.model = std::make_shared<ScalarSignalModel>(std::move(labels), sigma2);
  inst.training_set = {0, 1, 2, node_count - 3, node_count - 2, node_count - 1};
  return inst;
}

ImageInstance image_to_instance(const RgbImage& pixels) {
  const int n = pixels.width * pixels.height;
  if (n <= 0) throw std::invalid_argument("empty image");
  if (static_cast<int>(pixels.red.size()) != n || static_cast<int>(pixels.green.size()) != n ||
      static_cast<int>(pixels.blue.size()) != n)
    throw std::invalid_argument("channel size mismatch");

  const double max_red = *std::max_element(pixels.red.begin(), pixels.red.end());
  if (max_red <= 0.0) throw std::invalid_argument("degenerate image: max red is zero");

  std::vector<Edge> edges;
  for (int r = 0; r < pixels.height; ++r) {
    for (int c = 0; c < pixels.width; ++c) {
      const int i = pixels.index(r, c);
      if (c + 1 < pixels.width) edges.push_back({i, pixels.index(r, c + 1), 1.0});
      if (r + 1 < pixels.height) edges.push_back({i, pixels.index(r + 1, c), 1.0});
    }
  }

  ImageInstance inst;
  inst.width = pixels.width;
  inst.height = pixels.height;
  inst.graph = std::make_shared<EmpiricalGraph>(n, std::move(edges));

  // Per-channel standardization; constant channels are zeroed.
  Eigen::MatrixXd features(3, n);
  const std::vector<double>* channels[3] = {&pixels.red, &pixels.green, &pixels.blue};
  for (int ch = 0; ch < 3; ++ch) {
    const auto& v = *channels[ch];
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= n;
    if (var < 1e-12) {
      features.row(ch).setZero();
    } else {
      const double inv_std = 1.0 / std::sqrt(var);
      for (int i = 0; i < n; ++i) features(ch, i) = (v[static_cast<size_t>(i)] - mean) * inv_std;
    }
  }

  Eigen::VectorXd labels = Eigen::VectorXd::Ones(n);  // placeholder outside M
  for (int i = 0; i < n; ++i) {
    const double redness = pixels.red[static_cast<size_t>(i)] / max_red;
    if (redness < 0.5) {
      inst.training_set.push_back(i);
      inst.seed_labels.push_back(-1);
      labels[i] = -1.0;
    } else if (redness > 0.9) {
      inst.training_set.push_back(i);
      inst.seed_labels.push_back(1);
      labels[i] = 1.0;
    }
  }
  bool has_fg = false, has_bg = false;
  for (int l : inst.seed_labels) (l > 0 ? has_fg : has_bg) = true;
  if (!has_bg) throw std::invalid_argument("degenerate image: background seed set empty");
  if (!has_fg) throw std::invalid_argument("degenerate image: foreground seed set empty");

  inst.model = std::make_shared<LogisticModel>(std::move(features), std::move(labels));
  return inst;
}

EmpiricalGraph knn_graph(const std::vector<Eigen::VectorXd>& coordinates, int k) {
  const int n = static_cast<int>(coordinates.size());
  if (k < 1 || k >= n) throw std::invalid_argument("K must lie in [1, N-1]");
  std::set<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> dist;
    dist.reserve(static_cast<size_t>(n) - 1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      dist.push_back({(coordinates[static_cast<size_t>(i)] - coordinates[static_cast<size_t>(j)]).norm(), j});
    }
    std::sort(dist.begin(), dist.end());  // ties broken by node index
    for (int t = 0; t < k; ++t) {
      const int j = dist[static_cast<size_t>(t)].second;
      pairs.insert({std::min(i, j), std::max(i, j)});
    }
  }
  std::vector<Edge> edges;
  for (auto [a, b] : pairs) edges.push_back({a, b, 1.0});
  return EmpiricalGraph(n, std::move(edges));
}

WeatherLikeData gen_weather_like(int stations, int days, double noise_sigma, std::uint64_t seed) {
  if (stations < 2 || days < 1) throw std::invalid_argument("invalid weather spec");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  WeatherLikeData data;
  data.coordinates.reserve(static_cast<size_t>(stations));
  for (int i = 0; i < stations; ++i) {
    Eigen::VectorXd p(2);
    p << unif(rng), unif(rng);
    data.coordinates.push_back(p);
  }
  data.daily_means.resize(days, stations);
  for (int t = 0; t < days; ++t) {
    const double season = 10.0 * std::sin(2.0 * M_PI * t / 365.0);
    for (int i = 0; i < stations; ++i) {
      const auto& p = data.coordinates[static_cast<size_t>(i)];
      // Smooth north-south gradient plus a local bump.
      const double field = 5.0 - 8.0 * p[1] + 3.0 * std::sin(3.0 * p[0]) * std::cos(2.0 * p[1]);
      data.daily_means(t, i) = season + field + noise_sigma * noise(rng);
    }
  }
  return data;
}

}  // namespace nlasso
