// Command-line driver: instance generation, nLasso / RNC fitting,
// connectivity sweeps, image segmentation and spectral diagnostics.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "nlasso/analysis.hpp"
#include "nlasso/data_gen.hpp"
#include "nlasso/io.hpp"
#include "nlasso/rnc.hpp"
#include "nlasso/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nlasso;

namespace {

constexpr const char* kVersion = "nlasso 0.1.0";

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
};

json load_config(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("--config is required for this subcommand");
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument("malformed config " + path + ": " + err.what());
  }
}

class PhaseTimer {
 public:
  void start(const std::string& name) {
    flush();
    current_ = name;
    t0_ = std::chrono::steady_clock::now();
  }
  json finish() {
    flush();
    return timings_;
  }

 private:
  void flush() {
    if (current_.empty()) return;
    const auto dt = std::chrono::steady_clock::now() - t0_;
    timings_[current_] =
        std::chrono::duration_cast<std::chrono::duration<double>>(dt).count();
    current_.clear();
  }
  json timings_ = json::object();
  std::string current_;
  std::chrono::steady_clock::time_point t0_;
};

void write_manifest(const fs::path& out_dir, const std::string& subcommand, const json& config,
                    std::uint64_t seed, json timings) {
  json manifest;
  manifest["subcommand"] = subcommand;
  manifest["config"] = config;
  manifest["seed"] = seed;
  manifest["version"] = kVersion;
  manifest["timings_seconds"] = std::move(timings);
  std::ofstream out(out_dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

SolverConfig solver_config_from_json(const json& cfg) {
  SolverConfig sc;
  sc.lambda = cfg.value("lambda", 1.0);
  sc.tau = cfg.value("tau", 0.9);
  sc.max_iterations = cfg.value("iterations", 1000);
  sc.rel_change_tol = cfg.value("tolerance", 0.0);
  sc.inexactness_floor = cfg.value("inexactness_floor", 1e-3);
  const std::string mode = cfg.value("mode", "fixed_point");
  if (mode == "fixed_point") {
    sc.mode = PrimalUpdateMode::kFixedPoint;
  } else if (mode == "newton_step") {
    sc.mode = PrimalUpdateMode::kNewtonStep;
  } else if (mode == "closed_form") {
    sc.mode = PrimalUpdateMode::kClosedForm;
  } else {
    throw std::invalid_argument("config field 'mode': unknown value '" + mode + "'");
  }
  return sc;
}

InstanceBundle bundle_from_two_cluster(const TwoClusterInstance& inst) {
  InstanceBundle b;
  b.graph = inst.graph;
  b.attributes.features = Eigen::MatrixXd(2, inst.model->node_count());
  b.attributes.labels.resize(inst.model->node_count());
  for (int i = 0; i < inst.model->node_count(); ++i) {
    b.attributes.features.col(i) = inst.model->feature(i);
    b.attributes.labels[i] = inst.model->label(i);
  }
  b.training_set = inst.training_set;
  b.model_kind = "gaussian";
  b.truth = inst.truth;
  b.partition = inst.partition;
  return b;
}

int run_gen(const GlobalOptions& opts) {
  const json cfg = load_config(opts.config_path);
  PhaseTimer timer;
  timer.start("generate");
  const std::string type = cfg.value("type", "");
  InstanceBundle bundle;
  if (type == "two_cluster") {
    TwoClusterSpec spec;
    spec.cluster_size = cfg.value("cluster_size", 40);
    spec.avg_degree = cfg.value("avg_degree", 10.0);
    spec.inter_cluster_edges = cfg.value("inter_cluster_edges", 1);
    spec.labels_per_cluster = cfg.value("labels_per_cluster", 3);
    spec.noise_sigma = cfg.value("sigma", 0.0);
    if (cfg.contains("a")) spec.weights_a << cfg["a"][0].get<double>(), cfg["a"][1].get<double>();
    if (cfg.contains("b")) spec.weights_b << cfg["b"][0].get<double>(), cfg["b"][1].get<double>();
    spec.seed = opts.seed;
    bundle = bundle_from_two_cluster(gen_two_cluster(spec));
  } else if (type == "chain") {
    const int n = cfg.value("n", 40);
    ChainSignalInstance inst = gen_chain_signal(n, cfg.value("sigma", 0.1), opts.seed);
    bundle.graph = inst.graph;
    bundle.attributes.features = Eigen::MatrixXd::Ones(1, n);
    bundle.attributes.labels.resize(n);
    bundle.attributes.sigma2 =
        Eigen::VectorXd::Constant(n, inst.model->noise_variance(0));
    for (int i = 0; i < n; ++i) bundle.attributes.labels[i] = inst.model->label(i);
    bundle.training_set = inst.training_set;
    bundle.model_kind = "scalar";
    bundle.truth = inst.truth;
  } else if (type == "knn") {
    const int stations = cfg.value("stations", 30);
    const int k = cfg.value("k", 3);
    if (k >= stations)
      throw std::invalid_argument("config field 'k': must be smaller than 'stations'");
    const int days = cfg.value("days", 8);
    WeatherLikeData data = gen_weather_like(stations, days, cfg.value("sigma", 0.5), opts.seed);
    bundle.graph = std::make_shared<EmpiricalGraph>(knn_graph(data.coordinates, k));
    // Feature: previous three daily means; label: current daily mean.
    const int t = days - 1;
    if (t < 3) throw std::invalid_argument("config field 'days': need at least 4");
    bundle.attributes.features.resize(3, stations);
    bundle.attributes.labels.resize(stations);
    for (int i = 0; i < stations; ++i) {
      for (int l = 0; l < 3; ++l)
        bundle.attributes.features(l, i) = data.daily_means(t - 1 - l, i);
      bundle.attributes.labels[i] = data.daily_means(t, i);
    }
    bundle.training_set.resize(static_cast<size_t>(stations));
    std::iota(bundle.training_set.begin(), bundle.training_set.end(), 0);
    bundle.model_kind = "gaussian";
  } else {
    throw std::invalid_argument("config field 'type': expected two_cluster, chain or knn");
  }
  timer.start("write");
  const fs::path out(opts.out_dir);
  write_bundle(out, bundle);
  write_manifest(out, "gen", cfg, opts.seed, timer.finish());
  return 0;
}

int run_fit(const GlobalOptions& opts, const std::string& bundle_dir) {
  const json cfg = load_config(opts.config_path);
  PhaseTimer timer;
  timer.start("load");
  InstanceBundle bundle = read_bundle(bundle_dir);
  const fs::path out(opts.out_dir);
  fs::create_directories(out);

  const std::string method = cfg.value("method", "nlasso");
  timer.start("solve");
  if (method == "nlasso") {
    auto model = make_model(bundle);
    SolverConfig sc = solver_config_from_json(cfg);
    SolverResult result = solve(*bundle.graph, *model, bundle.training_set, sc);
    timer.start("write");
    write_weights(out / "weights.csv", result.weights);
    write_history(out / "history.csv", result.history);
  } else if (method == "rnc") {
    if (bundle.attributes.features.rows() != 1)
      throw std::invalid_argument("rnc baseline requires scalar (d=1) attributes");
    RncConfig rc;
    rc.lambda = cfg.value("lambda_rnc", cfg.value("lambda", 1.0));
    rc.cg_tolerance = cfg.value("cg_tolerance", 1e-10);
    Eigen::VectorXd labels(bundle.training_set.size());
    for (size_t k = 0; k < bundle.training_set.size(); ++k)
      labels[static_cast<Eigen::Index>(k)] = bundle.attributes.labels[bundle.training_set[k]];
    NodeSignal w = rnc_solve_scalar(*bundle.graph, bundle.training_set, labels, rc);
    timer.start("write");
    write_weights(out / "weights.csv", w);
  } else {
    throw std::invalid_argument("config field 'method': expected nlasso or rnc");
  }
  {
    std::ofstream echo(out / "config.json");
    echo << cfg.dump(2) << '\n';
  }
  write_manifest(out, "fit", cfg, opts.seed, timer.finish());
  return 0;
}

struct SweepPointResult {
  double rho_bar;
  double nmse_value;
};

int run_sweep(const GlobalOptions& opts) {
  const json cfg = load_config(opts.config_path);
  PhaseTimer timer;
  timer.start("sweep");

  TwoClusterSpec base;
  base.cluster_size = cfg.value("cluster_size", 40);
  base.avg_degree = cfg.value("avg_degree", 10.0);
  base.labels_per_cluster = cfg.value("labels_per_cluster", 3);
  base.noise_sigma = cfg.value("sigma", 0.0);
  if (cfg.contains("a")) base.weights_a << cfg["a"][0].get<double>(), cfg["a"][1].get<double>();
  if (cfg.contains("b")) base.weights_b << cfg["b"][0].get<double>(), cfg["b"][1].get<double>();
  std::vector<int> counts = cfg.value("inter_edge_counts", std::vector<int>{});
  if (counts.empty()) counts = {2, 4, 6, 8, 12, 16, 24, 32};
  const int reps = cfg.value("repetitions", 10);
  SolverConfig sc = solver_config_from_json(cfg);

  auto run_one = [&](int inter_edges, int rep_index) -> SweepPointResult {
    TwoClusterSpec spec = base;
    spec.inter_cluster_edges = inter_edges;
    spec.seed = opts.seed + static_cast<std::uint64_t>(rep_index);
    TwoClusterInstance inst = gen_two_cluster(spec);
    // Representatives must avoid boundary endpoints or the flow value degenerates.
    std::set<int> boundary_ends;
    for (int e : inst.partition->boundary_edges(*inst.graph)) {
      boundary_ends.insert(inst.graph->edge(e).i);
      boundary_ends.insert(inst.graph->edge(e).j);
    }
    std::vector<int> reps_nodes;
    for (int c = 0; c < inst.partition->cluster_count(); ++c) {
      int rep = inst.partition->cluster(c).front();
      for (int i : inst.partition->cluster(c)) {
        if (!boundary_ends.count(i)) {
          rep = i;
          break;
        }
      }
      reps_nodes.push_back(rep);
    }
    ClusterConnectivity conn = normalized_connectivity(*inst.graph, *inst.partition, reps_nodes);
    SolverResult result = solve(*inst.graph, *inst.model, inst.training_set, sc);
    return {conn.mean, nmse(result.weights, inst.truth)};
  };

  std::vector<std::vector<SweepPointResult>> results(counts.size());
  int global_index = 0;
  for (size_t p = 0; p < counts.size(); ++p) {
    std::vector<std::future<SweepPointResult>> futures;
    std::vector<int> indices;
    for (int r = 0; r < reps; ++r) indices.push_back(global_index++);
    if (opts.threads > 1) {
      for (int idx : indices)
        futures.push_back(std::async(std::launch::async, run_one, counts[p], idx));
      for (auto& f : futures) results[p].push_back(f.get());
    } else {
      for (int idx : indices) results[p].push_back(run_one(counts[p], idx));
    }
  }

  timer.start("write");
  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  {
    std::ofstream csv(out / "sweep.csv");
    csv << "inter_edges,rho_bar,nmse\n";
    for (size_t p = 0; p < counts.size(); ++p) {
      double rho = 0.0, err = 0.0;
      for (const auto& r : results[p]) {
        rho += r.rho_bar;
        err += r.nmse_value;
      }
      rho /= static_cast<double>(results[p].size());
      err /= static_cast<double>(results[p].size());
      csv << counts[p] << ',' << format_double(rho) << ',' << format_double(err) << '\n';
    }
  }
  {
    std::ofstream plot(out / "sweep.gp");
    plot << "set xlabel 'cluster connectivity'\nset ylabel 'NMSE'\nset datafile separator ','\n"
            "plot 'sweep.csv' using 2:3 skip 1 with points title 'nLasso'\n";
  }
  write_manifest(out, "sweep-connectivity", cfg, opts.seed, timer.finish());
  return 0;
}

int run_segment(const GlobalOptions& opts, const std::string& image_path, double lambda,
                int iterations) {
  PhaseTimer timer;
  timer.start("load");
  RgbImage image = read_ppm(image_path);
  ImageInstance inst = image_to_instance(image);

  timer.start("solve");
  SolverConfig sc;
  sc.lambda = lambda;
  sc.max_iterations = iterations;
  sc.mode = PrimalUpdateMode::kNewtonStep;
  SolverResult result = solve(*inst.graph, *inst.model, inst.training_set, sc);

  timer.start("write");
  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  const int n = image.width * image.height;
  RgbImage mask;
  mask.width = image.width;
  mask.height = image.height;
  mask.red.assign(static_cast<size_t>(n), 0.0);
  mask.green.assign(static_cast<size_t>(n), 0.0);
  mask.blue.assign(static_cast<size_t>(n), 0.0);
  {
    std::ofstream csv(out / "scores.csv");
    csv << "pixel_id,row,col,score,label\n";
    for (int i = 0; i < n; ++i) {
      const double score = result.weights.col(i).dot(inst.model->feature(i));
      const int label = score >= 0.0 ? 1 : 0;
      if (label == 1) {
        mask.red[static_cast<size_t>(i)] = 1.0;
        mask.green[static_cast<size_t>(i)] = 1.0;
        mask.blue[static_cast<size_t>(i)] = 1.0;
      }
      csv << i + 1 << ',' << i / image.width + 1 << ',' << i % image.width + 1 << ','
          << format_double(score) << ',' << label << '\n';
    }
  }
  write_ppm(out / "mask.ppm", mask);
  json cfg{{"image", image_path}, {"lambda", lambda}, {"iterations", iterations}};
  write_manifest(out, "segment", cfg, opts.seed, timer.finish());
  return 0;
}

int run_diag(const GlobalOptions& opts, const std::string& bundle_dir,
             const std::string& partition_path) {
  const json cfg = load_config(opts.config_path);
  PhaseTimer timer;
  timer.start("load");
  InstanceBundle bundle = read_bundle(bundle_dir);
  std::shared_ptr<Partition> partition = bundle.partition;
  if (!partition_path.empty())
    partition = std::make_shared<Partition>(read_partition(partition_path, *bundle.graph));
  if (!partition) throw std::invalid_argument("no partition: bundle has none and --partition unset");

  timer.start("analyze");
  auto model = make_model(bundle);
  const double gap = spectral_gap(*bundle.graph);
  const double partition_gap = partition_spectral_gap(*bundle.graph, *partition);

  Theorem1Params params;
  params.compat_K = cfg.value("K", 2.0);
  params.asspt3_L = cfg.value("L", 7.0);
  params.eta = cfg.value("eta", 1.0);
  params.dim = model->dim();
  if (cfg.contains("U")) {
    params.fim_U = cfg["U"].get<double>();
  } else {
    params.fim_U = 0.0;
    for (int i = 0; i < model->node_count(); ++i)
      params.fim_U = std::max(params.fim_U, model->fim_upper_bound(i));
  }
  for (int c = 0; c < partition->cluster_count(); ++c)
    params.cluster_sizes.push_back(static_cast<int>(partition->cluster(c).size()));
  params.train_size = static_cast<int>(bundle.training_set.size());
  params.partition_gap = partition_gap;
  params.max_degree = *std::max_element(bundle.graph->degrees().begin(),
                                        bundle.graph->degrees().end());
  params.edge_count = bundle.graph->edge_count();
  Theorem1Result bound = theorem1_bound(params);

  CompatibilityEstimate compat =
      compatibility_ratio(*bundle.graph, *partition, bundle.training_set, params.asspt3_L,
                          model->dim(), cfg.value("samples", 1000), opts.seed);

  timer.start("write");
  json report;
  report["spectral_gap"] = gap;
  report["partition_gap"] = partition_gap;
  report["kappa"] = bound.kappa;
  // The proof-side constant differs from the theorem statement; both are
  // reported so the gap is visible.
  report["kappa_proof_variant"] = bound.kappa_proof_variant;
  report["lambda_prescribed"] = bound.lambda;
  report["bound_value"] = bound.bound;
  report["vacuous"] = bound.vacuous;
  report["K_est"] = compat.k_est;
  report["K_est_is_lower_estimate"] = true;
  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  {
    std::ofstream rep(out / "report.json");
    rep << report.dump(2) << '\n';
  }
  std::cout << report.dump(2) << '\n';
  write_manifest(out, "diag", cfg, opts.seed, timer.finish());
  return 0;
}

int run_bench(const GlobalOptions& opts) {
  PhaseTimer timer;
  TwoClusterSpec spec;
  spec.inter_cluster_edges = 4;
  spec.seed = opts.seed;
  json report;
  for (int size : {40, 80, 160}) {
    spec.cluster_size = size;
    TwoClusterInstance inst = gen_two_cluster(spec);
    SolverConfig sc;
    sc.lambda = 0.1;
    sc.max_iterations = 500;
    const auto t0 = std::chrono::steady_clock::now();
    SolverResult result = solve(*inst.graph, *inst.model, inst.training_set, sc);
    const auto dt = std::chrono::steady_clock::now() - t0;
    json row;
    row["nodes"] = 2 * size;
    row["edges"] = inst.graph->edge_count();
    row["iterations"] = result.iterations;
    row["seconds"] = std::chrono::duration_cast<std::chrono::duration<double>>(dt).count();
    report.push_back(row);
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Networked exponential families via primal-dual network Lasso"};
  app.set_version_flag("--version", kVersion);

  GlobalOptions opts;
  app.add_option("--seed", opts.seed, "random seed");
  app.add_option("--config", opts.config_path, "JSON config file");
  app.add_option("--out-dir", opts.out_dir, "output directory");
  app.add_option("--threads", opts.threads, "worker threads for sweeps");

  auto* gen = app.add_subcommand("gen", "generate an instance bundle");
  std::string bundle_dir;
  auto* fit = app.add_subcommand("fit", "fit nLasso or the RNC baseline on a bundle");
  fit->add_option("bundle", bundle_dir, "instance bundle directory")->required();
  auto* sweep = app.add_subcommand("sweep-connectivity", "NMSE vs. cluster connectivity sweep");
  std::string image_path;
  double seg_lambda = 100.0;
  int seg_iterations = 10;
  auto* segment = app.add_subcommand("segment", "foreground/background segmentation of a PPM");
  segment->add_option("image", image_path, "input PPM image")->required();
  segment->add_option("--lambda", seg_lambda, "TV regularization strength");
  segment->add_option("--iterations", seg_iterations, "iteration budget");
  std::string partition_path;
  auto* diag = app.add_subcommand("diag", "spectral / error-bound diagnostics");
  diag->add_option("bundle", bundle_dir, "instance bundle directory")->required();
  diag->add_option("--partition", partition_path, "partition file (overrides the bundle's)");
  auto* bench = app.add_subcommand("bench", "timing on generated instances");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return run_gen(opts);
    if (fit->parsed()) return run_fit(opts, bundle_dir);
    if (sweep->parsed()) return run_sweep(opts);
    if (segment->parsed()) return run_segment(opts, image_path, seg_lambda, seg_iterations);
    if (diag->parsed()) return run_diag(opts, bundle_dir, partition_path);
    if (bench->parsed()) return run_bench(opts);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
