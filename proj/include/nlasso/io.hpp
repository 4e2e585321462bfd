#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "nlasso/data_gen.hpp"
#include "nlasso/exp_family.hpp"
#include "nlasso/graph.hpp"
#include "nlasso/solver.hpp"

namespace nlasso {

/// Edge-list text format: header "N E d", then one line "i j weight" per
/// edge with 1-based node indices.
void write_graph(const std::filesystem::path& path, const EmpiricalGraph& g, int dim);
struct GraphFile {
  std::shared_ptr<EmpiricalGraph> graph;
  int dim = 1;
};
GraphFile read_graph(const std::filesystem::path& path);

/// One cluster id per line (1-based).
void write_partition(const std::filesystem::path& path, const Partition& p);
Partition read_partition(const std::filesystem::path& path, const EmpiricalGraph& g);

/// CSV with header node_id,y,x_1..x_d[,sigma2].
struct NodeAttributes {
  Eigen::MatrixXd features;  // d x N
  Eigen::VectorXd labels;
  Eigen::VectorXd sigma2;    // empty when the column is absent
};
void write_attributes(const std::filesystem::path& path, const NodeAttributes& attrs);
NodeAttributes read_attributes(const std::filesystem::path& path);

/// One node id per line (1-based).
void write_training_set(const std::filesystem::path& path, const std::vector<int>& nodes);
std::vector<int> read_training_set(const std::filesystem::path& path, int node_count);

/// CSV with header node_id,w_1..w_d.
void write_weights(const std::filesystem::path& path, const NodeSignal& w);
NodeSignal read_weights(const std::filesystem::path& path);

/// CSV with header k,objective,iterate_change,max_dual_norm.
void write_history(const std::filesystem::path& path, const SolverHistory& history);

/// Plain PPM, P3 or P6, 8-bit.
RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

/// Instance bundle: a directory holding graph.txt, attributes.csv,
/// training.txt and a manifest; optionally truth.csv and partition.txt.
struct InstanceBundle {
  std::shared_ptr<EmpiricalGraph> graph;
  NodeAttributes attributes;
  std::vector<int> training_set;
  std::string model_kind;  // "gaussian", "logistic" or "scalar"
  NodeSignal truth;        // 0 x 0 when absent
  std::shared_ptr<Partition> partition;  // may be null
};
void write_bundle(const std::filesystem::path& dir, const InstanceBundle& bundle);
InstanceBundle read_bundle(const std::filesystem::path& dir);

/// Builds the model named by the bundle. Logistic labels stored as {0,1}
/// are mapped to {-1,+1} here.
std::shared_ptr<ExpFamilyModel> make_model(const InstanceBundle& bundle);

/// Shortest round-trippable decimal form.
std::string format_double(double value);

}  // namespace nlasso
