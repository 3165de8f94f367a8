#include "tensorcit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace tct {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path.string() + "' for reading");
  return in;
}

struct HeaderReader {
  std::map<std::string, std::string> keys;
  std::string path;

  static HeaderReader parse(std::istream& in, const std::string& path) {
    HeaderReader h;
    h.path = path;
    std::string line;
    while (in.peek() != EOF && !std::isdigit(in.peek()) && in.peek() != '-' && in.peek() != '+') {
      if (!std::getline(in, line)) break;
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw io_error(path + ": malformed header line '" + line + "'");
      h.keys[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return h;
  }

  const std::string& get(const std::string& key) const {
    auto it = keys.find(key);
    if (it == keys.end()) throw io_error(path + ": missing header key '" + key + "'");
    return it->second;
  }
  int get_int(const std::string& key) const { return std::stoi(get(key)); }
  double get_double(const std::string& key) const { return std::stod(get(key)); }

  void expect(const std::string& key, const std::string& value) const {
    if (get(key) != value)
      throw io_error(path + ": expected " + key + "=" + value + ", found " + get(key));
  }
};

std::string layout_name(TensorLayout layout) {
  return layout == TensorLayout::dg1 ? "dg1" : "const";
}

TensorLayout parse_layout(const std::string& name, const std::string& path) {
  if (name == "dg1") return TensorLayout::dg1;
  if (name == "const") return TensorLayout::constant;
  throw io_error(path + ": unknown tensor layout '" + name + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_tensor_field(const std::filesystem::path& path, const SymTensorField& field) {
  std::ofstream out = open_out(path);
  out << "format=tensorcit/1\n";
  out << "kind=tensor\n";
  out << "N=" << field.mesh->config.subdivisions << "\n";
  out << "degree=" << (field.layout == TensorLayout::dg1 ? 1 : 0) << "\n";
  out << "layout=" << layout_name(field.layout) << "\n";
  for (int t = 0; t < field.mesh->triangle_count(); ++t) {
    for (int k = 0; k < field.nodes_per_triangle(); ++k) {
      const SymTensor2& v = field.at(t, k);
      if (k > 0) out << ' ';
      out << format_double(v.a11) << ' ' << format_double(v.a12) << ' ' << format_double(v.a22);
    }
    out << '\n';
  }
  if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

SymTensorField read_tensor_field(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const HeaderReader h = HeaderReader::parse(in, path.string());
  h.expect("format", "tensorcit/1");
  h.expect("kind", "tensor");
  const int n = h.get_int("N");
  const TensorLayout layout = parse_layout(h.get("layout"), path.string());

  auto mesh = std::make_shared<const Mesh>(build_uniform_mesh(MeshConfig{n, Domain{}}));
  SymTensorField field(mesh, layout);
  for (int t = 0; t < mesh->triangle_count(); ++t)
    for (int k = 0; k < field.nodes_per_triangle(); ++k) {
      SymTensor2& v = field.at(t, k);
      if (!(in >> v.a11 >> v.a12 >> v.a22))
        throw io_error(path.string() + ": truncated tensor data at triangle " + std::to_string(t));
    }
  return field;
}

void write_scalar_field(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream out = open_out(path);
  out << "format=tensorcit/1\n";
  out << "kind=scalar\n";
  out << "N=" << field.space->mesh().config.subdivisions << "\n";
  out << "degree=" << field.space->degree() << "\n";
  out << "layout=lagrange\n";
  for (int i = 0; i < field.coeffs.size(); ++i) out << format_double(field.coeffs[i]) << '\n';
  if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

ScalarField read_scalar_field(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const HeaderReader h = HeaderReader::parse(in, path.string());
  h.expect("format", "tensorcit/1");
  h.expect("kind", "scalar");
  const int n = h.get_int("N");
  const int degree = h.get_int("degree");

  auto mesh = std::make_shared<const Mesh>(build_uniform_mesh(MeshConfig{n, Domain{}}));
  auto space = std::make_shared<const FeSpace>(mesh, degree);
  ScalarField field(space);
  for (int i = 0; i < field.coeffs.size(); ++i)
    if (!(in >> field.coeffs[i]))
      throw io_error(path.string() + ": truncated scalar data at dof " + std::to_string(i));
  return field;
}

void write_measurements(const std::filesystem::path& path, const MeasurementSet& set,
                        bool noisy, const FeSpace& space) {
  const auto& fields = noisy ? set.noisy : set.exact;
  std::ofstream out = open_out(path);
  out << "format=tensorcit/1\n";
  out << "kind=measurement\n";
  out << "N=" << space.mesh().config.subdivisions << "\n";
  out << "degree=" << space.quadrature_degree() << "\n";
  out << "layout=quadrature\n";
  out << "loads=" << set.load_count() << "\n";
  out << "points_per_triangle=" << space.rule().size() << "\n";
  for (int l = 0; l < set.load_count(); ++l) {
    out << "load=" << set.load_labels[l] << "\n";
    for (const Vec2& v : fields[l].values)
      out << format_double(v.x()) << ' ' << format_double(v.y()) << '\n';
  }
  if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

void write_manifest(const std::filesystem::path& path, const MeasurementSet& set,
                    const FeSpace& space, TensorLayout layout) {
  std::ofstream out = open_out(path);
  out << "format=tensorcit/1\n";
  out << "kind=manifest\n";
  out << "case=" << (set.test_case ? to_string(*set.test_case) : "external") << "\n";
  out << "seed=" << set.seed << "\n";
  out << "delta_rel=" << format_double(set.delta_rel) << "\n";
  out << "loads=" << set.load_count() << "\n";
  out << "N=" << space.mesh().config.subdivisions << "\n";
  out << "state_degree=" << space.degree() << "\n";
  out << "quad_degree=" << space.quadrature_degree() << "\n";
  out << "layout=" << layout_name(layout) << "\n";
  for (int l = 0; l < set.load_count(); ++l) {
    out << "load_label_" << l << "=" << set.load_labels[l] << "\n";
    out << "noise_norm_sq_" << l << "=" << format_double(set.noise_norm_sq[l]) << "\n";
  }
  if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

namespace {

std::vector<CurrentDensity> read_measurement_blocks(const std::filesystem::path& path,
                                                    const FeSpace& space,
                                                    std::vector<std::string>& labels) {
  std::ifstream in = open_in(path);
  const HeaderReader h = HeaderReader::parse(in, path.string());
  h.expect("format", "tensorcit/1");
  h.expect("kind", "measurement");
  if (h.get_int("N") != space.mesh().config.subdivisions)
    throw io_error(path.string() + ": mesh subdivision mismatch");
  if (h.get_int("degree") != space.quadrature_degree())
    throw io_error(path.string() + ": quadrature degree mismatch");
  const int loads = h.get_int("loads");
  const int ppt = h.get_int("points_per_triangle");
  if (ppt != space.rule().size())
    throw io_error(path.string() + ": quadrature point count mismatch");

  std::vector<CurrentDensity> out;
  labels.clear();
  std::string line;
  for (int l = 0; l < loads; ++l) {
    if (!std::getline(in, line) || line.rfind("load=", 0) != 0)
      throw io_error(path.string() + ": expected load header for block " + std::to_string(l));
    labels.push_back(line.substr(5));
    CurrentDensity d;
    d.layout = space.quad_layout();
    d.values.resize(d.layout.total_points());
    for (auto& v : d.values)
      if (!(in >> v.x() >> v.y()))
        throw io_error(path.string() + ": truncated measurement block " + std::to_string(l));
    std::getline(in, line);  // consume end of the last data line
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

Dataset read_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.txt";
  std::ifstream in = open_in(manifest_path);
  const HeaderReader h = HeaderReader::parse(in, manifest_path.string());
  h.expect("format", "tensorcit/1");
  h.expect("kind", "manifest");

  Dataset ds;
  ds.mesh_n = h.get_int("N");
  ds.state_degree = h.get_int("state_degree");
  ds.layout = parse_layout(h.get("layout"), manifest_path.string());

  auto mesh = std::make_shared<const Mesh>(build_uniform_mesh(MeshConfig{ds.mesh_n, Domain{}}));
  auto space = std::make_shared<const FeSpace>(mesh, ds.state_degree);

  MeasurementSet& set = ds.measurements;
  const std::string case_name = h.get("case");
  if (case_name != "external") set.test_case = parse_test_case(case_name);
  set.seed = static_cast<std::uint64_t>(std::stoull(h.get("seed")));
  set.delta_rel = h.get_double("delta_rel");
  const int loads = h.get_int("loads");
  for (int l = 0; l < loads; ++l) {
    set.load_labels.push_back(h.get("load_label_" + std::to_string(l)));
    set.noise_norm_sq.push_back(h.get_double("noise_norm_sq_" + std::to_string(l)));
  }

  std::vector<std::string> labels;
  set.exact = read_measurement_blocks(dir / "measurements_exact.txt", *space, labels);
  set.noisy = read_measurement_blocks(dir / "measurements_noisy.txt", *space, labels);
  if (static_cast<int>(set.exact.size()) != loads || static_cast<int>(set.noisy.size()) != loads)
    throw io_error(dir.string() + ": measurement block count does not match the manifest");
  return ds;
}

void write_history(const std::filesystem::path& path, const ReconstructionResult& result) {
  std::ofstream out = open_out(path);
  out << "# n gamma inner J_total J_fidelity J_penalty residual rel_change error eig_min eig_max\n";
  for (const IterationRecord& r : result.history) {
    out << r.outer << ' ' << format_double(r.gamma) << ' ' << r.inner_iterations << ' '
        << format_double(r.objective.total) << ' ' << format_double(r.objective.fidelity) << ' '
        << format_double(r.objective.penalty) << ' ' << format_double(r.residual) << ' '
        << format_double(r.relative_change) << ' '
        << (r.error ? format_double(*r.error) : std::string("nan")) << ' '
        << format_double(r.eigen_range.min) << ' ' << format_double(r.eigen_range.max) << '\n';
  }
  out << "# stop_reason=" << to_string(result.stop_reason) << "\n";
  if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

void write_cross_section_csv(const std::filesystem::path& path, const SymTensorField& field,
                             int fixed_axis, double offset, int samples,
                             const TensorFunction& truth) {
  if (samples < 1) throw argument_error("cross-section: sample count must be >= 1");
  if (fixed_axis != 0 && fixed_axis != 1)
    throw argument_error("cross-section: axis must be x1 or x2");
  const Domain& dom = field.mesh->config.domain;
  const double lo = fixed_axis == 0 ? dom.y0 : dom.x0;
  const double hi = fixed_axis == 0 ? dom.y1 : dom.x1;
  const double fixed_lo = fixed_axis == 0 ? dom.x0 : dom.y0;
  const double fixed_hi = fixed_axis == 0 ? dom.x1 : dom.y1;
  if (offset < fixed_lo || offset > fixed_hi)
    throw domain_error("cross-section: line lies outside the domain");

  std::ofstream out = open_out(path);
  out << "coordinate,A11,A12,A22";
  if (truth) out << ",true_A11,true_A12,true_A22";
  out << "\n";
  for (int i = 0; i < samples; ++i) {
    const double c = samples == 1 ? 0.5 * (lo + hi)
                                  : lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
    const Vec2 p = fixed_axis == 0 ? Vec2(offset, c) : Vec2(c, offset);
    const SymTensor2 v = field.eval_at_point(p);
    out << format_double(c) << ',' << format_double(v.a11) << ',' << format_double(v.a12) << ','
        << format_double(v.a22);
    if (truth) {
      const SymTensor2 tv = truth(p);
      out << ',' << format_double(tv.a11) << ',' << format_double(tv.a12) << ','
          << format_double(tv.a22);
    }
    out << '\n';
  }
  if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

void write_vtk(const std::filesystem::path& path, const SymTensorField& field) {
  const Mesh& mesh = *field.mesh;
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "tensorcit tensor field\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.node_count() << " double\n";
  for (const Vec2& p : mesh.nodes)
    out << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
  out << "CELLS " << mesh.triangle_count() << ' ' << 4 * mesh.triangle_count() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
  out << "CELL_TYPES " << mesh.triangle_count() << "\n";
  for (int t = 0; t < mesh.triangle_count(); ++t) out << "5\n";
  out << "CELL_DATA " << mesh.triangle_count() << "\n";
  const std::array<double, 3> center = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  const char* names[3] = {"A11", "A12", "A22"};
  for (int c = 0; c < 3; ++c) {
    out << "SCALARS " << names[c] << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int t = 0; t < mesh.triangle_count(); ++t)
      out << format_double(field.eval(t, center).component(c)) << "\n";
  }
  if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

}  // namespace tct
