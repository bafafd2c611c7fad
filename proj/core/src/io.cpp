#include "granusense/io.hpp"

#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "granusense/errors.hpp"

namespace granusense::io {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hexf(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

// Line source that keeps the position for error messages.
class Lines {
 public:
  explicit Lines(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw IoError("cannot open " + path);
  }

  bool next(std::string* line) {
    if (!std::getline(in_, *line)) return false;
    ++num_;
    return true;
  }

  std::string require(const char* what) {
    std::string line;
    if (!next(&line)) fail(std::string("missing ") + what);
    return line;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw IoError(path_ + ":" + std::to_string(num_) + ": " + message);
  }

 private:
  std::ifstream in_;
  std::string path_;
  int num_ = 0;
};

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream iss(line);
  std::vector<std::string> out;
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const Lines& src) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (tok.empty() || end != begin + tok.size())
    src.fail("bad number: '" + tok + "'");
  return v;
}

long long parse_ll(const std::string& tok, const Lines& src) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (tok.empty() || end != begin + tok.size() || errno == ERANGE)
    src.fail("bad integer: '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, const Lines& src) {
  const long long v = parse_ll(tok, src);
  if (v < INT_MIN || v > INT_MAX) src.fail("integer out of range: " + tok);
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& tok, const Lines& src) {
  if (tok.empty() || tok[0] == '-') src.fail("bad seed: '" + tok + "'");
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end != begin + tok.size() || errno == ERANGE)
    src.fail("bad seed: '" + tok + "'");
  return v;
}

// --- dataset ----------------------------------------------------------------

constexpr char kDatasetMagic[] = "# dataset-v1";
constexpr int kFixedColumns = 17;

const std::string& dataset_header() {
  static const std::string header = [] {
    std::string h =
        "particle diameter_mm sphericity density_g_mm3 packing_fraction "
        "humidity_ml shape_class fill_height_mm mass_g cell_seed delta_fz_n "
        "tilt_30pre_nm tilt_30post_nm tilt_45pre_nm tilt_45post_nm "
        "tilt_60pre_nm tilt_60post_nm";
    for (int i = 0; i < features::kFeatureDim; ++i) {
      char buf[8];
      std::snprintf(buf, sizeof buf, " F%03d", i);
      h += buf;
    }
    return h;
  }();
  return header;
}

}  // namespace

void write_dataset(const std::string& path, const harness::Dataset& dataset) {
  std::ofstream out = open_out(path);
  out << kDatasetMagic << '\n';
  for (const harness::SpillNote& note : dataset.spills)
    out << "# spill name=" << note.particle_name
        << " requested_mm=" << g17(note.requested_mm)
        << " used_mm=" << g17(note.used_mm) << '\n';
  out << dataset_header() << '\n';
  for (const harness::DatasetRecord& rec : dataset.records) {
    out << rec.particle_name << ' ' << g17(rec.particle.diameter_dp_mm) << ' '
        << g17(rec.particle.sphericity_psi) << ' '
        << g17(rec.particle.material_density_g_mm3) << ' '
        << g17(rec.particle.packing_fraction) << ' '
        << g17(rec.particle.humidity_ml) << ' '
        << static_cast<int>(rec.shape) << ' ' << g17(rec.fill_height_mm)
        << ' ' << g17(rec.mass_g) << ' ' << rec.cell_seed << ' '
        << g17(rec.delta_fz_n);
    for (double t : rec.tilt.torque_nm) out << ' ' << g17(t);
    for (double f : rec.fv.values) out << ' ' << g17(f);
    out << '\n';
  }
  finish_out(out, path);
}

harness::Dataset read_dataset(const std::string& path) {
  Lines src(path);
  if (src.require("format line") != kDatasetMagic)
    src.fail(std::string("expected ") + kDatasetMagic);

  harness::Dataset dataset;
  std::string line;
  bool saw_header = false;
  while (src.next(&line)) {
    if (!line.empty() && line[0] == '#') {
      const std::vector<std::string> tok = split_ws(line);
      if (tok.size() == 5 && tok[1] == "spill") {
        harness::SpillNote note;
        for (std::size_t i = 2; i < tok.size(); ++i) {
          const std::size_t eq = tok[i].find('=');
          if (eq == std::string::npos) src.fail("bad spill note field");
          const std::string key = tok[i].substr(0, eq);
          const std::string val = tok[i].substr(eq + 1);
          if (key == "name")
            note.particle_name = val;
          else if (key == "requested_mm")
            note.requested_mm = parse_double(val, src);
          else if (key == "used_mm")
            note.used_mm = parse_double(val, src);
          else
            src.fail("unknown spill note field: " + key);
        }
        dataset.spills.push_back(std::move(note));
      }
      continue;  // other comments are free-form
    }
    if (!saw_header) {
      if (line != dataset_header()) src.fail("unexpected dataset header");
      saw_header = true;
      continue;
    }

    const std::vector<std::string> tok = split_ws(line);
    if (tok.size() != kFixedColumns + features::kFeatureDim)
      src.fail("expected " +
               std::to_string(kFixedColumns + features::kFeatureDim) +
               " columns, got " + std::to_string(tok.size()));
    harness::DatasetRecord rec;
    rec.particle_name = tok[0];
    rec.particle.name = tok[0];
    rec.particle.diameter_dp_mm = parse_double(tok[1], src);
    rec.particle.sphericity_psi = parse_double(tok[2], src);
    rec.particle.material_density_g_mm3 = parse_double(tok[3], src);
    rec.particle.packing_fraction = parse_double(tok[4], src);
    rec.particle.humidity_ml = parse_double(tok[5], src);
    rec.diameter_mm = rec.particle.diameter_dp_mm;
    rec.sphericity = rec.particle.sphericity_psi;
    rec.humidity_ml = rec.particle.humidity_ml;
    try {
      rec.particle.validate();
      rec.shape = domain::shape_class_from_int(parse_int(tok[6], src));
    } catch (const DomainError& e) {
      src.fail(e.what());
    }
    rec.fill_height_mm = parse_double(tok[7], src);
    rec.mass_g = parse_double(tok[8], src);
    rec.cell_seed = parse_u64(tok[9], src);
    rec.delta_fz_n = parse_double(tok[10], src);
    for (int j = 0; j < 6; ++j)
      rec.tilt.torque_nm[static_cast<std::size_t>(j)] =
          parse_double(tok[static_cast<std::size_t>(11 + j)], src);
    for (int j = 0; j < features::kFeatureDim; ++j)
      rec.fv.values[static_cast<std::size_t>(j)] =
          parse_double(tok[static_cast<std::size_t>(kFixedColumns + j)], src);
    dataset.records.push_back(std::move(rec));
  }
  if (!saw_header) throw IoError(path + ": no dataset header row");
  return dataset;
}

// --- mlp model ---------------------------------------------------------------

void write_mlp(const std::string& path, const mlp::Model& model) {
  if (model.layers.empty() || model.arch.size() != model.layers.size() + 1)
    throw DomainError("refusing to write an untrained network");
  std::ofstream out = open_out(path);
  out << "# mlp-v1\n";
  out << "arch";
  for (int w : model.arch) out << ' ' << w;
  out << '\n';
  out << "final_loss " << hexf(model.final_loss) << '\n';
  out << "input_mean";
  for (long i = 0; i < model.input_mean.size(); ++i)
    out << ' ' << hexf(model.input_mean(i));
  out << '\n';
  out << "input_scale";
  for (long i = 0; i < model.input_scale.size(); ++i)
    out << ' ' << hexf(model.input_scale(i));
  out << '\n';
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const mlp::Layer& layer = model.layers[l];
    out << "layer " << l << ' ' << layer.w.rows() << ' ' << layer.w.cols()
        << '\n';
    for (long r = 0; r < layer.w.rows(); ++r) {
      out << 'w';
      for (long c = 0; c < layer.w.cols(); ++c)
        out << ' ' << hexf(layer.w(r, c));
      out << '\n';
    }
    out << 'b';
    for (long r = 0; r < layer.b.size(); ++r) out << ' ' << hexf(layer.b(r));
    out << '\n';
  }
  finish_out(out, path);
}

mlp::Model read_mlp(const std::string& path) {
  Lines src(path);
  if (src.require("format line") != "# mlp-v1")
    src.fail("expected # mlp-v1");

  mlp::Model model;
  std::vector<std::string> tok = split_ws(src.require("arch line"));
  if (tok.size() < 3 || tok[0] != "arch") src.fail("expected arch line");
  for (std::size_t i = 1; i < tok.size(); ++i) {
    const int w = parse_int(tok[i], src);
    if (w <= 0) src.fail("layer width must be positive");
    model.arch.push_back(w);
  }

  tok = split_ws(src.require("final_loss line"));
  if (tok.size() != 2 || tok[0] != "final_loss")
    src.fail("expected final_loss line");
  model.final_loss = parse_double(tok[1], src);

  const int inputs = model.arch.front();
  auto read_stats = [&](const char* name, Eigen::VectorXd* v) {
    const std::vector<std::string> parts = split_ws(src.require(name));
    if (parts.size() != static_cast<std::size_t>(inputs) + 1 ||
        parts[0] != name)
      src.fail(std::string("expected ") + name + " with " +
               std::to_string(inputs) + " values");
    v->resize(inputs);
    for (int i = 0; i < inputs; ++i)
      (*v)(i) = parse_double(parts[static_cast<std::size_t>(i) + 1], src);
  };
  read_stats("input_mean", &model.input_mean);
  read_stats("input_scale", &model.input_scale);

  for (std::size_t l = 0; l + 1 < model.arch.size(); ++l) {
    tok = split_ws(src.require("layer line"));
    if (tok.size() != 4 || tok[0] != "layer" ||
        parse_int(tok[1], src) != static_cast<int>(l))
      src.fail("expected layer " + std::to_string(l));
    const int rows = parse_int(tok[2], src);
    const int cols = parse_int(tok[3], src);
    if (rows != model.arch[l + 1] || cols != model.arch[l])
      src.fail("layer shape disagrees with arch");
    mlp::Layer layer;
    layer.w.resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
      tok = split_ws(src.require("weight row"));
      if (tok.size() != static_cast<std::size_t>(cols) + 1 || tok[0] != "w")
        src.fail("expected weight row of " + std::to_string(cols));
      for (int c = 0; c < cols; ++c)
        layer.w(r, c) = parse_double(tok[static_cast<std::size_t>(c) + 1], src);
    }
    tok = split_ws(src.require("bias row"));
    if (tok.size() != static_cast<std::size_t>(rows) + 1 || tok[0] != "b")
      src.fail("expected bias row of " + std::to_string(rows));
    layer.b.resize(rows);
    for (int r = 0; r < rows; ++r)
      layer.b(r) = parse_double(tok[static_cast<std::size_t>(r) + 1], src);
    model.layers.push_back(std::move(layer));
  }
  std::string trailing;
  if (src.next(&trailing) && !split_ws(trailing).empty())
    src.fail("unexpected content after last layer");
  return model;
}

// --- forest model ------------------------------------------------------------

void write_forest(const std::string& path, const forest::Model& model) {
  if (model.trees.empty())
    throw DomainError("refusing to write an untrained forest");
  std::ofstream out = open_out(path);
  out << "# forest-v1\n";
  out << "feature_count " << model.feature_count << '\n';
  out << "class_count " << model.class_count << '\n';
  out << "tree_count " << model.trees.size() << '\n';
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const forest::Tree& tree = model.trees[t];
    out << "tree " << t << " nodes " << tree.nodes.size() << '\n';
    for (const forest::Node& node : tree.nodes) {
      out << "n " << node.feature << ' ' << hexf(node.threshold) << ' '
          << node.left << ' ' << node.right;
      for (int c : node.counts) out << ' ' << c;
      out << '\n';
    }
  }
  finish_out(out, path);
}

forest::Model read_forest(const std::string& path) {
  Lines src(path);
  if (src.require("format line") != "# forest-v1")
    src.fail("expected # forest-v1");

  forest::Model model;
  auto read_kv = [&](const char* key) {
    const std::vector<std::string> tok = split_ws(src.require(key));
    if (tok.size() != 2 || tok[0] != key)
      src.fail(std::string("expected ") + key);
    return parse_int(tok[1], src);
  };
  model.feature_count = read_kv("feature_count");
  model.class_count = read_kv("class_count");
  const int tree_count = read_kv("tree_count");
  if (model.feature_count <= 0 || model.class_count <= 0 || tree_count <= 0)
    src.fail("model sizes must be positive");

  model.trees.resize(static_cast<std::size_t>(tree_count));
  for (int t = 0; t < tree_count; ++t) {
    std::vector<std::string> tok = split_ws(src.require("tree line"));
    if (tok.size() != 4 || tok[0] != "tree" || tok[2] != "nodes" ||
        parse_int(tok[1], src) != t)
      src.fail("expected tree " + std::to_string(t));
    const int node_count = parse_int(tok[3], src);
    if (node_count <= 0) src.fail("tree must have nodes");
    forest::Tree& tree = model.trees[static_cast<std::size_t>(t)];
    tree.nodes.resize(static_cast<std::size_t>(node_count));
    for (int n = 0; n < node_count; ++n) {
      tok = split_ws(src.require("node line"));
      if (tok.size() != static_cast<std::size_t>(5 + model.class_count) ||
          tok[0] != "n")
        src.fail("expected node with " + std::to_string(model.class_count) +
                 " class counts");
      forest::Node& node = tree.nodes[static_cast<std::size_t>(n)];
      node.feature = parse_int(tok[1], src);
      node.threshold = parse_double(tok[2], src);
      node.left = parse_int(tok[3], src);
      node.right = parse_int(tok[4], src);
      node.counts.resize(static_cast<std::size_t>(model.class_count));
      for (int c = 0; c < model.class_count; ++c)
        node.counts[static_cast<std::size_t>(c)] =
            parse_int(tok[static_cast<std::size_t>(5 + c)], src);
    }
  }
  std::string trailing;
  if (src.next(&trailing) && !split_ws(trailing).empty())
    src.fail("unexpected content after last tree");
  return model;
}

// --- traces ------------------------------------------------------------------

void write_signal_trace(const std::string& path,
                        const sim::SignalTrace& trace) {
  std::ofstream out = open_out(path);
  out << "# trace-v1 slow " << g17(trace.sample_rate_hz) << '\n';
  for (const sim::TraceSample& s : trace.samples)
    out << g17(s.theta_deg) << ',' << g17(s.value) << '\n';
  finish_out(out, path);
}

void write_marker_trace(const std::string& path,
                        const sim::MarkerField& field) {
  std::ofstream out = open_out(path);
  out << "# trace-v1 vibration " << g17(field.sample_rate_hz) << '\n';
  const std::size_t frames = field.frame_count();
  for (std::size_t f = 0; f < frames; ++f) {
    for (int m = 0; m < field.marker_count; ++m) {
      const std::size_t i =
          f * static_cast<std::size_t>(field.marker_count) +
          static_cast<std::size_t>(m);
      if (m) out << ',';
      out << g17(std::hypot(field.dx_mm[i], field.dz_mm[i]));
    }
    out << '\n';
  }
  finish_out(out, path);
}

// --- report ------------------------------------------------------------------

void write_report(const std::string& path, const harness::EvalReport& report,
                  const std::vector<std::string>& notes) {
  std::ofstream out = open_out(path);
  out << "# report-v1\n";
  for (const std::string& note : notes) out << "# " << note << '\n';
  out << "record_count = " << report.record_count << '\n';
  for (const harness::QuantityMetrics& q : report.quantities) {
    out << "quantity." << q.name << ".mae = " << g17(q.mae) << '\n';
    out << "quantity." << q.name << ".mape_pct = " << g17(q.mape_pct) << '\n';
    out << "quantity." << q.name << ".mape_excluded = " << q.mape_excluded
        << '\n';
  }
  if (report.has_shape) {
    out << "shape_accuracy = " << g17(report.shape_accuracy) << '\n';
    for (int t = 0; t < domain::kShapeClassCount; ++t) {
      out << "confusion." << t << " =";
      for (int p = 0; p < domain::kShapeClassCount; ++p)
        out << ' '
            << report.confusion[static_cast<std::size_t>(t)]
                               [static_cast<std::size_t>(p)];
      out << '\n';
    }
  }
  for (const harness::ParticleRow& row : report.per_particle) {
    out << "particle." << row.name << ".count = " << row.count << '\n';
    for (std::size_t q = 0; q < report.quantities.size(); ++q)
      out << "particle." << row.name << ".mae."
          << report.quantities[q].name << " = " << g17(row.mae[q]) << '\n';
    if (report.has_shape)
      out << "particle." << row.name
          << ".shape_accuracy = " << g17(row.shape_accuracy) << '\n';
  }
  finish_out(out, path);
}

}  // namespace granusense::io
