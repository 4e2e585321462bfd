#include "nlasso/data_gen.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"

using namespace nlasso;

TEST_CASE("two-cluster generator is deterministic under a fixed seed") {
  TwoClusterSpec spec;
  spec.seed = 42;
  const TwoClusterInstance a = gen_two_cluster(spec);
  const TwoClusterInstance b = gen_two_cluster(spec);
  REQUIRE(a.graph->edge_count() == b.graph->edge_count());
  for (int e = 0; e < a.graph->edge_count(); ++e) {
    CHECK(a.graph->edge(e).i == b.graph->edge(e).i);
    CHECK(a.graph->edge(e).j == b.graph->edge(e).j);
  }
  CHECK(a.training_set == b.training_set);
  for (int i = 0; i < a.graph->node_count(); ++i) {
    CHECK(a.model->label(i) == b.model->label(i));
    CHECK((a.model->feature(i) - b.model->feature(i)).norm() == 0.0);
  }
}

TEST_CASE("two-cluster defaults: 80 nodes, around 400 intra-cluster edges") {
  TwoClusterSpec spec;
  spec.seed = 7;
  spec.inter_cluster_edges = 5;
  const TwoClusterInstance inst = gen_two_cluster(spec);
  CHECK(inst.graph->node_count() == 80);
  const int intra = inst.graph->edge_count() - 5;
  // Expectation 2 * C(40,2) * 10/39 = 400; generous concentration band.
  CHECK(intra >= 320);
  CHECK(intra <= 480);
  CHECK(inst.training_set.size() == 6);
  int first_cluster = 0;
  for (int i : inst.training_set) first_cluster += (i < 40) ? 1 : 0;
  CHECK(first_cluster == 3);
}

TEST_CASE("two-cluster truth TV sits on the boundary edges only") {
  TwoClusterSpec spec;
  spec.seed = 3;
  spec.inter_cluster_edges = 4;
  const TwoClusterInstance inst = gen_two_cluster(spec);
  const auto boundary = inst.partition->boundary_edges(*inst.graph);
  CHECK(boundary.size() == 4);
  std::vector<int> interior;
  for (int e = 0; e < inst.graph->edge_count(); ++e)
    if (std::find(boundary.begin(), boundary.end(), e) == boundary.end()) interior.push_back(e);
  CHECK(tv_norm(*inst.graph, inst.truth, std::span<const int>(interior)) == 0.0);
  const double jump = (spec.weights_a - spec.weights_b).norm();
  CHECK(tv_norm(*inst.graph, inst.truth) == doctest::Approx(4.0 * jump));
}

TEST_CASE("two-cluster zero-noise labels are exact") {
  TwoClusterSpec spec;
  spec.seed = 11;
  spec.noise_sigma = 0.0;
  const TwoClusterInstance inst = gen_two_cluster(spec);
  for (int i = 0; i < inst.graph->node_count(); ++i) {
    CHECK(inst.model->label(i) ==
          doctest::Approx(inst.model->feature(i).dot(inst.truth.col(i))).epsilon(1e-14));
    CHECK(inst.model->feature(i).norm() == doctest::Approx(1.0));  // unit circle
  }
}

TEST_CASE("two-cluster with no inter edges splits the graph") {
  TwoClusterSpec spec;
  spec.seed = 19;
  spec.cluster_size = 15;
  spec.inter_cluster_edges = 0;
  const TwoClusterInstance inst = gen_two_cluster(spec);
  CHECK(inst.partition->boundary_edges(*inst.graph).empty());
  CHECK_FALSE(inst.graph->is_connected());
  CHECK(partition_spectral_gap(*inst.graph, *inst.partition) > 0.0);
}

TEST_CASE("two-cluster spec validation") {
  TwoClusterSpec spec;
  spec.cluster_size = 1;
  CHECK_THROWS_AS(gen_two_cluster(spec), std::invalid_argument);
  spec.cluster_size = 10;
  spec.labels_per_cluster = 11;
  CHECK_THROWS_AS(gen_two_cluster(spec), std::invalid_argument);
  spec.labels_per_cluster = 3;
  spec.inter_cluster_edges = 101;
  CHECK_THROWS_AS(gen_two_cluster(spec), std::invalid_argument);
}

TEST_CASE("chain signal instance") {
  const ChainSignalInstance inst = gen_chain_signal(20, 0.0, 1);
  CHECK(inst.graph->node_count() == 20);
  CHECK(inst.graph->edge_count() == 19);
  CHECK(inst.training_set == std::vector<int>({0, 1, 2, 17, 18, 19}));
  for (int i = 0; i < 20; ++i) {
    CHECK(inst.truth(0, i) == (i < 10 ? 1.0 : -1.0));
    CHECK(inst.model->label(i) == inst.truth(0, i));  // sigma = 0
  }
  CHECK(tv_norm(*inst.graph, inst.truth) == doctest::Approx(2.0));
  CHECK_THROWS_AS(gen_chain_signal(7, 0.1, 1), std::invalid_argument);

  const ChainSignalInstance noisy_a = gen_chain_signal(30, 0.2, 5);
  const ChainSignalInstance noisy_b = gen_chain_signal(30, 0.2, 5);
  for (int i = 0; i < 30; ++i) CHECK(noisy_a.model->label(i) == noisy_b.model->label(i));
}

TEST_CASE("image instance standardizes the channels") {
  RgbImage img;
  img.width = 4;
  img.height = 3;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 12; ++i) {
    img.red.push_back(i < 4 ? 0.1 : (i < 8 ? 0.95 : unif(rng) * 0.3));
    img.green.push_back(unif(rng));
    img.blue.push_back(unif(rng));
  }
  const ImageInstance inst = image_to_instance(img);
  for (int ch = 0; ch < 3; ++ch) {
    double mean = 0.0, var = 0.0;
    for (int i = 0; i < 12; ++i) mean += inst.model->feature(i)[ch];
    mean /= 12.0;
    for (int i = 0; i < 12; ++i) {
      const double d = inst.model->feature(i)[ch] - mean;
      var += d * d;
    }
    var /= 12.0;
    CHECK(std::abs(mean) <= 1e-10);
    CHECK(std::abs(var - 1.0) <= 1e-10);
  }
}

TEST_CASE("constant channel is zeroed instead of divided by zero") {
  RgbImage img;
  img.width = 2;
  img.height = 2;
  img.red = {0.2, 0.9, 0.95, 0.1};
  img.green = {0.5, 0.5, 0.5, 0.5};  // constant
  img.blue = {0.1, 0.2, 0.3, 0.4};
  const ImageInstance inst = image_to_instance(img);
  for (int i = 0; i < 4; ++i) CHECK(inst.model->feature(i)[1] == 0.0);
}

TEST_CASE("2x2 image gives 4 nodes and 4 grid edges") {
  RgbImage img;
  img.width = 2;
  img.height = 2;
  img.red = {0.1, 1.0, 1.0, 0.1};
  img.green = {0.0, 0.1, 0.2, 0.3};
  img.blue = {0.3, 0.2, 0.1, 0.0};
  const ImageInstance inst = image_to_instance(img);
  CHECK(inst.graph->node_count() == 4);
  CHECK(inst.graph->edge_count() == 4);
}

TEST_CASE("pure red image is rejected: no background seeds") {
  RgbImage img;
  img.width = 2;
  img.height = 2;
  img.red.assign(4, 1.0);
  img.green.assign(4, 0.0);
  img.blue.assign(4, 0.0);
  CHECK_THROWS_AS(image_to_instance(img), std::invalid_argument);
}

TEST_CASE("red square image: training set excludes the mid-redness band") {
  RgbImage img;
  img.width = 8;
  img.height = 8;
  int expected_m = 0;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      double red;
      if (r >= 2 && r <= 4 && c >= 2 && c <= 4) {
        red = 1.0;  // foreground square
      } else if (r >= 1 && r <= 5 && c >= 1 && c <= 5) {
        red = 0.6;  // excluded ring: redness in [0.5, 0.9]
      } else {
        red = 0.2;  // background
      }
      img.red.push_back(red);
      img.green.push_back(0.1);
      img.blue.push_back(red < 0.5 ? 0.8 : 0.1);
      if (red < 0.5 || red > 0.9) ++expected_m;
    }
  }
  const ImageInstance inst = image_to_instance(img);
  CHECK(static_cast<int>(inst.training_set.size()) == expected_m);
  int fg = 0;
  for (int l : inst.seed_labels) fg += (l > 0) ? 1 : 0;
  CHECK(fg == 9);
}

TEST_CASE("knn graph on collinear points with K=1") {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd p(1);
    p << static_cast<double>(i);
    pts.push_back(p);
  }
  const EmpiricalGraph g = knn_graph(pts, 1);
  // Ties at equal distance resolve to the lower index: 0 picks 1, 1 picks 0,
  // 2 picks 1, 3 picks 2; symmetrization yields the chain.
  REQUIRE(g.edge_count() == 3);
  CHECK(g.edge(0).i == 0);
  CHECK(g.edge(0).j == 1);
  CHECK(g.edge(1).i == 1);
  CHECK(g.edge(1).j == 2);
  CHECK(g.edge(2).i == 2);
  CHECK(g.edge(2).j == 3);
}

TEST_CASE("knn with K = N-1 is the complete graph") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 7; ++i) {
    Eigen::VectorXd p(2);
    p << gauss(rng), gauss(rng);
    pts.push_back(p);
  }
  const EmpiricalGraph g = knn_graph(pts, 6);
  CHECK(g.edge_count() == 21);
  CHECK_THROWS_AS(knn_graph(pts, 7), std::invalid_argument);
  CHECK_THROWS_AS(knn_graph(pts, 0), std::invalid_argument);
}

TEST_CASE("knn symmetrization matches a brute-force neighbor relation") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 12, k = 3;
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p(2);
    p << gauss(rng), gauss(rng);
    pts.push_back(p);
  }
  // Brute-force: j is a neighbor of i if it is among i's k closest.
  std::set<std::pair<int, int>> expected;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> d;
    for (int j = 0; j < n; ++j)
      if (j != i) d.push_back({(pts[i] - pts[j]).norm(), j});
    std::sort(d.begin(), d.end());
    for (int t = 0; t < k; ++t)
      expected.insert({std::min(i, d[t].second), std::max(i, d[t].second)});
  }
  const EmpiricalGraph g = knn_graph(pts, k);
  REQUIRE(g.edge_count() == static_cast<int>(expected.size()));
  for (int e = 0; e < g.edge_count(); ++e)
    CHECK(expected.count({g.edge(e).i, g.edge(e).j}) == 1);
}

TEST_CASE("weather-like generator shape and determinism") {
  const WeatherLikeData a = gen_weather_like(25, 10, 0.5, 77);
  const WeatherLikeData b = gen_weather_like(25, 10, 0.5, 77);
  CHECK(a.coordinates.size() == 25);
  CHECK(a.daily_means.rows() == 10);
  CHECK(a.daily_means.cols() == 25);
  CHECK((a.daily_means - b.daily_means).norm() == 0.0);
  for (size_t i = 0; i < a.coordinates.size(); ++i)
    CHECK((a.coordinates[i] - b.coordinates[i]).norm() == 0.0);
  CHECK_THROWS_AS(gen_weather_like(1, 10, 0.5, 77), std::invalid_argument);
}
