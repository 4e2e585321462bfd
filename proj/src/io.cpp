#include "nlasso/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nlasso {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) fail(path, "cannot open for writing");
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s, const fs::path& path, int line_no) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    std::ostringstream msg;
    msg << "line " << line_no << ": malformed number '" << s << "'";
    fail(path, msg.str());
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  // %.17g round-trips doubles and keeps output byte-stable across runs.
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_graph(const fs::path& path, const EmpiricalGraph& g, int dim) {
  auto out = open_out(path);
  out << g.node_count() << ' ' << g.edge_count() << ' ' << dim << '\n';
  for (const Edge& e : g.edges())
    out << e.i + 1 << ' ' << e.j + 1 << ' ' << format_double(e.weight) << '\n';
}

GraphFile read_graph(const fs::path& path) {
  auto in = open_in(path);
  int n = 0, e = 0, dim = 0;
  if (!(in >> n >> e >> dim)) fail(path, "malformed header, expected 'N E d'");
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(e));
  for (int k = 0; k < e; ++k) {
    int i = 0, j = 0;
    double w = 0.0;
    if (!(in >> i >> j >> w)) fail(path, "truncated edge list");
    edges.push_back({i - 1, j - 1, w});
  }
  GraphFile file;
  file.graph = std::make_shared<EmpiricalGraph>(n, std::move(edges));
  file.dim = dim;
  return file;
}

void write_partition(const fs::path& path, const Partition& p) {
  auto out = open_out(path);
  for (int c : p.assignment()) out << c + 1 << '\n';
}

Partition read_partition(const fs::path& path, const EmpiricalGraph& g) {
  auto in = open_in(path);
  std::vector<int> assignment;
  int c = 0;
  while (in >> c) assignment.push_back(c - 1);
  if (static_cast<int>(assignment.size()) != g.node_count())
    fail(path, "partition length does not match node count");
  return Partition(g, std::move(assignment));
}

void write_attributes(const fs::path& path, const NodeAttributes& attrs) {
  auto out = open_out(path);
  const int d = static_cast<int>(attrs.features.rows());
  const int n = static_cast<int>(attrs.features.cols());
  out << "node_id,y";
  for (int k = 1; k <= d; ++k) out << ",x_" << k;
  if (attrs.sigma2.size() > 0) out << ",sigma2";
  out << '\n';
  for (int i = 0; i < n; ++i) {
    out << i + 1 << ',' << format_double(attrs.labels[i]);
    for (int k = 0; k < d; ++k) out << ',' << format_double(attrs.features(k, i));
    if (attrs.sigma2.size() > 0) out << ',' << format_double(attrs.sigma2[i]);
    out << '\n';
  }
}

NodeAttributes read_attributes(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(path, "missing header");
  auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "node_id" || header[1] != "y")
    fail(path, "header must start with node_id,y,x_1...");
  const bool has_sigma = header.back() == "sigma2";
  const int d = static_cast<int>(header.size()) - 2 - (has_sigma ? 1 : 0);
  if (d < 1) fail(path, "no feature columns");

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != static_cast<int>(header.size())) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << header.size() << " fields";
      fail(path, msg.str());
    }
    std::vector<double> row;
    for (size_t k = 1; k < fields.size(); ++k)
      row.push_back(parse_double(fields[k], path, line_no));
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n == 0) fail(path, "no data rows");
  NodeAttributes attrs;
  attrs.features.resize(d, n);
  attrs.labels.resize(n);
  if (has_sigma) attrs.sigma2.resize(n);
  for (int i = 0; i < n; ++i) {
    attrs.labels[i] = rows[static_cast<size_t>(i)][0];
    for (int k = 0; k < d; ++k) attrs.features(k, i) = rows[static_cast<size_t>(i)][static_cast<size_t>(k) + 1];
    if (has_sigma) attrs.sigma2[i] = rows[static_cast<size_t>(i)].back();
  }
  return attrs;
}

void write_training_set(const fs::path& path, const std::vector<int>& nodes) {
  auto out = open_out(path);
  for (int i : nodes) out << i + 1 << '\n';
}

std::vector<int> read_training_set(const fs::path& path, int node_count) {
  auto in = open_in(path);
  std::vector<int> nodes;
  int i = 0;
  while (in >> i) {
    if (i < 1 || i > node_count) fail(path, "training node id out of range");
    nodes.push_back(i - 1);
  }
  if (nodes.empty()) fail(path, "empty training set");
  return nodes;
}

void write_weights(const fs::path& path, const NodeSignal& w) {
  auto out = open_out(path);
  out << "node_id";
  for (int k = 1; k <= w.rows(); ++k) out << ",w_" << k;
  out << '\n';
  for (int i = 0; i < w.cols(); ++i) {
    out << i + 1;
    for (int k = 0; k < w.rows(); ++k) out << ',' << format_double(w(k, i));
    out << '\n';
  }
}

NodeSignal read_weights(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(path, "missing header");
  const int d = static_cast<int>(split_csv_line(line).size()) - 1;
  if (d < 1) fail(path, "no weight columns");
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    std::vector<double> row;
    for (int k = 0; k < d; ++k) row.push_back(parse_double(fields[static_cast<size_t>(k) + 1], path, line_no));
    rows.push_back(std::move(row));
  }
  NodeSignal w(d, static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (int k = 0; k < d; ++k) w(k, static_cast<int>(i)) = rows[i][static_cast<size_t>(k)];
  return w;
}

void write_history(const fs::path& path, const SolverHistory& history) {
  auto out = open_out(path);
  out << "k,objective,iterate_change,max_dual_norm\n";
  for (size_t k = 0; k < history.objective.size(); ++k) {
    out << k + 1 << ',' << format_double(history.objective[k]) << ','
        << format_double(history.iterate_change[k]) << ','
        << format_double(history.max_dual_norm[k]) << '\n';
  }
}

RgbImage read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  std::string magic;
  in >> magic;
  if (magic != "P3" && magic != "P6") fail(path, "expected P3 or P6 PPM");
  auto next_token = [&]() -> int {
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    int v = 0;
    if (!(in >> v)) fail(path, "truncated PPM header");
    return v;
  };
  const int width = next_token();
  const int height = next_token();
  const int maxval = next_token();
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) fail(path, "bad PPM header");
  RgbImage img;
  img.width = width;
  img.height = height;
  const int n = width * height;
  img.red.resize(static_cast<size_t>(n));
  img.green.resize(static_cast<size_t>(n));
  img.blue.resize(static_cast<size_t>(n));
  if (magic == "P3") {
    for (int i = 0; i < n; ++i) {
      int r, g, b;
      if (!(in >> r >> g >> b)) fail(path, "truncated P3 pixel data");
      img.red[static_cast<size_t>(i)] = static_cast<double>(r) / maxval;
      img.green[static_cast<size_t>(i)] = static_cast<double>(g) / maxval;
      img.blue[static_cast<size_t>(i)] = static_cast<double>(b) / maxval;
    }
  } else {
    in.get();  // single whitespace after maxval
    if (maxval > 255) fail(path, "16-bit P6 not supported");
    std::vector<unsigned char> buf(static_cast<size_t>(n) * 3);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      fail(path, "truncated P6 pixel data");
    for (int i = 0; i < n; ++i) {
      img.red[static_cast<size_t>(i)] = buf[static_cast<size_t>(3 * i)] / static_cast<double>(maxval);
      img.green[static_cast<size_t>(i)] = buf[static_cast<size_t>(3 * i + 1)] / static_cast<double>(maxval);
      img.blue[static_cast<size_t>(i)] = buf[static_cast<size_t>(3 * i + 2)] / static_cast<double>(maxval);
    }
  }
  return img;
}

void write_ppm(const fs::path& path, const RgbImage& image) {
  auto out = open_out(path, std::ios::binary);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  const int n = image.width * image.height;
  std::vector<unsigned char> buf(static_cast<size_t>(n) * 3);
  auto clamp8 = [](double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  for (int i = 0; i < n; ++i) {
    buf[static_cast<size_t>(3 * i)] = clamp8(image.red[static_cast<size_t>(i)]);
    buf[static_cast<size_t>(3 * i + 1)] = clamp8(image.green[static_cast<size_t>(i)]);
    buf[static_cast<size_t>(3 * i + 2)] = clamp8(image.blue[static_cast<size_t>(i)]);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void write_bundle(const fs::path& dir, const InstanceBundle& bundle) {
  fs::create_directories(dir);
  write_graph(dir / "graph.txt", *bundle.graph, static_cast<int>(bundle.attributes.features.rows()));
  write_attributes(dir / "attributes.csv", bundle.attributes);
  write_training_set(dir / "training.txt", bundle.training_set);
  if (bundle.truth.size() > 0) write_weights(dir / "truth.csv", bundle.truth);
  if (bundle.partition) write_partition(dir / "partition.txt", *bundle.partition);
  json meta;
  meta["model"] = bundle.model_kind;
  auto out = open_out(dir / "bundle.json");
  out << meta.dump(2) << '\n';
}

InstanceBundle read_bundle(const fs::path& dir) {
  InstanceBundle bundle;
  GraphFile gf = read_graph(dir / "graph.txt");
  bundle.graph = gf.graph;
  bundle.attributes = read_attributes(dir / "attributes.csv");
  if (bundle.attributes.features.cols() != bundle.graph->node_count())
    fail(dir / "attributes.csv", "attribute rows do not match node count");
  bundle.training_set = read_training_set(dir / "training.txt", bundle.graph->node_count());
  const fs::path meta_path = dir / "bundle.json";
  if (fs::exists(meta_path)) {
    auto in = open_in(meta_path);
    json meta = json::parse(in, nullptr, true, true);
    bundle.model_kind = meta.value("model", "gaussian");
  } else {
    bundle.model_kind = "gaussian";
  }
  if (fs::exists(dir / "truth.csv")) bundle.truth = read_weights(dir / "truth.csv");
  if (fs::exists(dir / "partition.txt"))
    bundle.partition = std::make_shared<Partition>(read_partition(dir / "partition.txt", *bundle.graph));
  return bundle;
}

std::shared_ptr<ExpFamilyModel> make_model(const InstanceBundle& bundle) {
  const auto& a = bundle.attributes;
  if (bundle.model_kind == "logistic") {
    Eigen::VectorXd labels = a.labels;
    for (int i = 0; i < labels.size(); ++i) {
      if (labels[i] == 0.0) labels[i] = -1.0;  // {0,1} input convention
    }
    return std::make_shared<LogisticModel>(a.features, std::move(labels));
  }
  if (bundle.model_kind == "gaussian" || bundle.model_kind == "scalar") {
    return std::make_shared<GaussianLinearModel>(a.features, a.labels, a.sigma2);
  }
  throw std::runtime_error("unknown model kind '" + bundle.model_kind + "'");
}

}  // namespace nlasso
