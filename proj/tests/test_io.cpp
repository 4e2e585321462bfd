#include "nlasso/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"

using namespace nlasso;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nlasso_io_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("format_double round-trips and is stable") {
  for (double v : {0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.75}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
    CHECK(format_double(v) == s);
  }
}

TEST_CASE("graph file round trip") {
  TempDir tmp;
  EmpiricalGraph g(4, {{0, 1, 1.0}, {1, 2, 0.25}, {2, 3, 3.5}, {0, 3, 1.0 / 3.0}});
  write_graph(tmp.path / "g.txt", g, 2);
  const GraphFile back = read_graph(tmp.path / "g.txt");
  CHECK(back.dim == 2);
  REQUIRE(back.graph->node_count() == 4);
  REQUIRE(back.graph->edge_count() == 4);
  for (int e = 0; e < 4; ++e) {
    CHECK(back.graph->edge(e).i == g.edge(e).i);
    CHECK(back.graph->edge(e).j == g.edge(e).j);
    CHECK(back.graph->edge(e).weight == g.edge(e).weight);
  }
}

TEST_CASE("graph file uses 1-based indices on disk") {
  TempDir tmp;
  EmpiricalGraph g(2, {{0, 1, 2.0}});
  write_graph(tmp.path / "g.txt", g, 1);
  CHECK(slurp(tmp.path / "g.txt") == "2 1 1\n1 2 2\n");
}

TEST_CASE("malformed graph files are rejected") {
  TempDir tmp;
  CHECK_THROWS_AS(read_graph(tmp.path / "missing.txt"), std::runtime_error);
  write_text(tmp.path / "bad.txt", "not a header\n");
  CHECK_THROWS_AS(read_graph(tmp.path / "bad.txt"), std::runtime_error);
  write_text(tmp.path / "trunc.txt", "3 2 1\n1 2 1.0\n");
  CHECK_THROWS_AS(read_graph(tmp.path / "trunc.txt"), std::runtime_error);
  // Structurally invalid content surfaces the graph validation error.
  write_text(tmp.path / "loop.txt", "2 1 1\n1 1 1.0\n");
  CHECK_THROWS_AS(read_graph(tmp.path / "loop.txt"), std::invalid_argument);
}

TEST_CASE("partition round trip") {
  TempDir tmp;
  EmpiricalGraph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  Partition p(g, {0, 0, 1, 1});
  write_partition(tmp.path / "p.txt", p);
  const Partition back = read_partition(tmp.path / "p.txt", g);
  CHECK(back.assignment() == p.assignment());
  write_text(tmp.path / "short.txt", "1\n1\n");
  CHECK_THROWS_AS(read_partition(tmp.path / "short.txt", g), std::runtime_error);
}

TEST_CASE("attributes round trip with and without sigma2") {
  TempDir tmp;
  NodeAttributes attrs;
  attrs.features.resize(2, 3);
  attrs.features << 0.5, -1.0, 2.0, 1.0 / 3.0, 0.0, -7.5;
  attrs.labels.resize(3);
  attrs.labels << 1.0, -0.25, 0.125;

  write_attributes(tmp.path / "a.csv", attrs);
  NodeAttributes back = read_attributes(tmp.path / "a.csv");
  CHECK((back.features - attrs.features).norm() == 0.0);
  CHECK((back.labels - attrs.labels).norm() == 0.0);
  CHECK(back.sigma2.size() == 0);

  attrs.sigma2.resize(3);
  attrs.sigma2 << 0.01, 0.5, 2.0;
  write_attributes(tmp.path / "b.csv", attrs);
  back = read_attributes(tmp.path / "b.csv");
  CHECK((back.sigma2 - attrs.sigma2).norm() == 0.0);
}

TEST_CASE("malformed attributes are rejected with line diagnostics") {
  TempDir tmp;
  write_text(tmp.path / "h.csv", "id,y,x_1\n1,1.0,2.0\n");
  CHECK_THROWS_AS(read_attributes(tmp.path / "h.csv"), std::runtime_error);
  write_text(tmp.path / "f.csv", "node_id,y,x_1\n1,1.0\n");
  CHECK_THROWS_AS(read_attributes(tmp.path / "f.csv"), std::runtime_error);
  write_text(tmp.path / "n.csv", "node_id,y,x_1\n1,abc,2.0\n");
  CHECK_THROWS_WITH_AS(read_attributes(tmp.path / "n.csv"),
                       doctest::Contains("line 2"), std::runtime_error);
  write_text(tmp.path / "e.csv", "node_id,y,x_1\n");
  CHECK_THROWS_AS(read_attributes(tmp.path / "e.csv"), std::runtime_error);
}

TEST_CASE("training set round trip and validation") {
  TempDir tmp;
  const std::vector<int> nodes = {0, 2, 5};
  write_training_set(tmp.path / "t.txt", nodes);
  CHECK(slurp(tmp.path / "t.txt") == "1\n3\n6\n");
  CHECK(read_training_set(tmp.path / "t.txt", 6) == nodes);
  CHECK_THROWS_AS(read_training_set(tmp.path / "t.txt", 5), std::runtime_error);
  write_text(tmp.path / "empty.txt", "");
  CHECK_THROWS_AS(read_training_set(tmp.path / "empty.txt", 5), std::runtime_error);
}

TEST_CASE("weights round trip") {
  TempDir tmp;
  std::mt19937_64 rng(151);
  std::normal_distribution<double> gauss(0.0, 3.0);
  NodeSignal w(3, 7);
  for (int i = 0; i < 7; ++i)
    for (int k = 0; k < 3; ++k) w(k, i) = gauss(rng);
  write_weights(tmp.path / "w.csv", w);
  const NodeSignal back = read_weights(tmp.path / "w.csv");
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 7);
  CHECK((back - w).norm() == 0.0);
}

TEST_CASE("history file layout") {
  TempDir tmp;
  SolverHistory h;
  h.objective = {1.5, 1.25};
  h.iterate_change = {0.5, 0.125};
  h.max_dual_norm = {0.25, 0.75};
  write_history(tmp.path / "h.csv", h);
  CHECK(slurp(tmp.path / "h.csv") ==
        "k,objective,iterate_change,max_dual_norm\n"
        "1,1.5,0.5,0.25\n"
        "2,1.25,0.125,0.75\n");
}

TEST_CASE("ppm round trip through P6") {
  TempDir tmp;
  RgbImage img;
  img.width = 3;
  img.height = 2;
  for (int i = 0; i < 6; ++i) {
    img.red.push_back(i / 5.0);
    img.green.push_back(1.0 - i / 5.0);
    img.blue.push_back(0.5);
  }
  write_ppm(tmp.path / "img.ppm", img);
  const RgbImage back = read_ppm(tmp.path / "img.ppm");
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  for (int i = 0; i < 6; ++i) {
    // 8-bit quantization only.
    CHECK(std::abs(back.red[i] - img.red[i]) <= 0.5 / 255.0);
    CHECK(std::abs(back.green[i] - img.green[i]) <= 0.5 / 255.0);
    CHECK(std::abs(back.blue[i] - img.blue[i]) <= 0.5 / 255.0);
  }
}

TEST_CASE("P3 images with comments parse correctly") {
  TempDir tmp;
  write_text(tmp.path / "p3.ppm",
             "P3\n# a comment\n2 1\n255\n255 0 0   0 128 255\n");
  const RgbImage img = read_ppm(tmp.path / "p3.ppm");
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  CHECK(img.red[0] == doctest::Approx(1.0));
  CHECK(img.green[1] == doctest::Approx(128.0 / 255.0));
  CHECK(img.blue[1] == doctest::Approx(1.0));

  write_text(tmp.path / "bad.ppm", "P5\n2 1\n255\n");
  CHECK_THROWS_AS(read_ppm(tmp.path / "bad.ppm"), std::runtime_error);
  write_text(tmp.path / "trunc.ppm", "P3\n2 1\n255\n255 0 0\n");
  CHECK_THROWS_AS(read_ppm(tmp.path / "trunc.ppm"), std::runtime_error);
}

TEST_CASE("bundle round trip preserves every component") {
  TempDir tmp;
  InstanceBundle bundle;
  bundle.graph = std::make_shared<EmpiricalGraph>(
      4, std::vector<Edge>{{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 1.0}, {0, 3, 0.5}});
  bundle.attributes.features.resize(1, 4);
  bundle.attributes.features << 1.0, 1.0, 1.0, 1.0;
  bundle.attributes.labels.resize(4);
  bundle.attributes.labels << 0.5, -0.25, 1.0 / 7.0, 2.0;
  bundle.attributes.sigma2.resize(4);
  bundle.attributes.sigma2 << 1.0, 1.0, 0.25, 0.25;
  bundle.training_set = {0, 2};
  bundle.model_kind = "scalar";
  bundle.truth.resize(1, 4);
  bundle.truth << 1.0, 1.0, -1.0, -1.0;
  bundle.partition = std::make_shared<Partition>(*bundle.graph, std::vector<int>{0, 0, 1, 1});

  write_bundle(tmp.path / "bundle", bundle);
  const InstanceBundle back = read_bundle(tmp.path / "bundle");
  CHECK(back.graph->edge_count() == 4);
  CHECK((back.attributes.features - bundle.attributes.features).norm() == 0.0);
  CHECK((back.attributes.labels - bundle.attributes.labels).norm() == 0.0);
  CHECK((back.attributes.sigma2 - bundle.attributes.sigma2).norm() == 0.0);
  CHECK(back.training_set == bundle.training_set);
  CHECK(back.model_kind == "scalar");
  CHECK((back.truth - bundle.truth).norm() == 0.0);
  REQUIRE(back.partition);
  CHECK(back.partition->assignment() == bundle.partition->assignment());

  const auto model = make_model(back);
  CHECK(model->node_count() == 4);
  CHECK(model->dim() == 1);
}

TEST_CASE("make_model maps 0/1 logistic labels to -1/+1") {
  InstanceBundle bundle;
  bundle.model_kind = "logistic";
  bundle.attributes.features.resize(2, 3);
  bundle.attributes.features << 1.0, 0.5, -1.0, 0.0, 1.0, 2.0;
  bundle.attributes.labels.resize(3);
  bundle.attributes.labels << 0.0, 1.0, 0.0;
  const auto model = make_model(bundle);
  const auto* logit = dynamic_cast<const LogisticModel*>(model.get());
  REQUIRE(logit != nullptr);
  CHECK(logit->label(0) == -1.0);
  CHECK(logit->label(1) == 1.0);
  CHECK(logit->label(2) == -1.0);

  bundle.model_kind = "mystery";
  CHECK_THROWS_AS(make_model(bundle), std::runtime_error);
}

TEST_CASE("round-trip property on random attribute tables") {
  TempDir tmp;
  std::mt19937_64 rng(157);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 4), count(1, 20);
  for (int trial = 0; trial < 20; ++trial) {
    NodeAttributes attrs;
    const int d = dim(rng), n = count(rng);
    attrs.features.resize(d, n);
    attrs.labels.resize(n);
    for (int i = 0; i < n; ++i) {
      attrs.labels[i] = std::exp(10.0 * gauss(rng));  // wide magnitude range
      for (int k = 0; k < d; ++k) attrs.features(k, i) = gauss(rng);
    }
    write_attributes(tmp.path / "rt.csv", attrs);
    const NodeAttributes back = read_attributes(tmp.path / "rt.csv");
    CHECK((back.features - attrs.features).norm() == 0.0);
    CHECK((back.labels - attrs.labels).norm() == 0.0);
  }
}
