#include "tensorcit/cli.hpp"

#include <fstream>
#include <map>

#include "tensorcit/optimizer.hpp"

namespace tct::cli {

namespace fs = std::filesystem;

namespace {

std::shared_ptr<const FeSpace> make_space(int n, int degree) {
  auto mesh = std::make_shared<const Mesh>(build_uniform_mesh(MeshConfig{n, Domain{}}));
  return std::make_shared<const FeSpace>(mesh, degree);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory '" + dir.string() + "'");
}

/// The Dirichlet data behind a measurement label; datasets reference loads by
/// label, and all supported labels come from the standard boundary set.
LoadCase load_for_label(const std::string& label) {
  static const std::vector<LoadCase> all = boundary_data_set(9);
  for (const LoadCase& l : all)
    if (l.label == label) return l;
  throw config_error("dataset references unknown load label '" + label + "'");
}

MeasurementSet synthesize_measurements(const RunConfig& config, const FeSpace& space) {
  if (!config.test_case) throw config_error("synthesize: config must name a test case");
  const std::vector<LoadCase> loads = boundary_data_set(config.loads);
  MeasurementSet exact = generate_exact_data(*config.test_case, loads, config.fine_factor, space,
                                             config.degree, config.solver, config.threads);
  return add_noise(exact, config.noise_options(), space);
}

ReconstructionResult reconstruct_from(const RunConfig& config, const MeasurementSet& set,
                                      std::shared_ptr<const FeSpace> space,
                                      const fs::path& out_dir, bool vtk) {
  std::vector<LoadCase> loads;
  for (const std::string& label : set.load_labels) loads.push_back(load_for_label(label));

  const SymTensorField initial =
      SymTensorField::constant_field(space->mesh_ptr(), config.layout, config.initial_guess);

  PathConfig path;
  path.gamma0 = config.gamma0;
  path.rho = config.rho;
  path.noise_norm_sq = set.noise_norm_sq;
  path.max_outer_iterations = config.max_outer;
  path.stagnation_tol = config.stagnation_tol;

  const TensorFunction truth =
      set.test_case ? exact_tensor_function(*set.test_case) : TensorFunction(nullptr);

  ensure_dir(out_dir);
  std::vector<IterationRecord> partial;
  try {
    ReconstructionResult result =
        path_following(initial, loads, set.noisy, space, config.bounds, path,
                       config.newton_config(), truth, config.solver, config.threads,
                       [&partial](const IterationRecord& r) { partial.push_back(r); });
    write_tensor_field(out_dir / "tensor.txt", result.tensor);
    write_history(out_dir / "history.txt", result);
    if (vtk) write_vtk(out_dir / "result.vtk", result.tensor);
    return result;
  } catch (const Error&) {
    ReconstructionResult failed;
    failed.history = std::move(partial);
    failed.stop_reason = StopReason::max_outer;
    write_history(out_dir / "history.txt", failed);
    throw;
  }
}

}  // namespace

void run_synthesize(const RunConfig& config) {
  config.validate();
  auto space = make_space(config.mesh_n, config.degree);
  const MeasurementSet set = synthesize_measurements(config, *space);

  const fs::path dir(config.output_dir);
  ensure_dir(dir);
  write_measurements(dir / "measurements_exact.txt", set, /*noisy=*/false, *space);
  write_measurements(dir / "measurements_noisy.txt", set, /*noisy=*/true, *space);
  write_manifest(dir / "manifest.txt", set, *space, config.layout);
}

ReconstructionResult run_reconstruct(const RunConfig& config, const fs::path& data_dir,
                                     bool vtk) {
  config.validate();
  const Dataset ds = read_dataset(data_dir);
  if (ds.mesh_n != config.mesh_n)
    throw config_error("reconstruct: dataset mesh N=" + std::to_string(ds.mesh_n) +
                       " does not match config mesh_n=" + std::to_string(config.mesh_n));
  if (ds.state_degree != config.degree)
    throw config_error("reconstruct: dataset state degree " + std::to_string(ds.state_degree) +
                       " does not match config degree " + std::to_string(config.degree));
  auto space = make_space(config.mesh_n, config.degree);
  return reconstruct_from(config, ds.measurements, space, fs::path(config.output_dir), vtk);
}

EvaluationResult run_evaluate(const fs::path& field_path, TestCase test_case,
                              const std::optional<fs::path>& out_path) {
  const SymTensorField field = read_tensor_field(field_path);
  const TensorFunction truth = exact_tensor_function(test_case);

  EvaluationResult r{};
  r.relative_error = relative_error(field, truth);
  r.component_errors = component_l2_errors(field, truth);
  r.reference_norm =
      std::sqrt(tensor_l2_norm_sq(SymTensorField::from_function(field.mesh, field.layout, truth)));

  if (out_path) {
    std::ofstream out(*out_path);
    if (!out) throw io_error("cannot open '" + out_path->string() + "' for writing");
    out << "case=" << to_string(test_case) << "\n";
    out << "e=" << format_double(r.relative_error) << "\n";
    out << "err_a11=" << format_double(r.component_errors[0]) << "\n";
    out << "err_a12=" << format_double(r.component_errors[1]) << "\n";
    out << "err_a22=" << format_double(r.component_errors[2]) << "\n";
  }
  return r;
}

void run_cross_section(const fs::path& field_path, const std::string& axis, double offset,
                       int samples, const std::optional<TestCase>& test_case,
                       const fs::path& out_path) {
  const SymTensorField field = read_tensor_field(field_path);
  int fixed_axis;
  if (axis == "x1" || axis == "x") fixed_axis = 0;
  else if (axis == "x2" || axis == "y") fixed_axis = 1;
  else throw argument_error("cross-section: axis must be x1 or x2");
  const TensorFunction truth =
      test_case ? exact_tensor_function(*test_case) : TensorFunction(nullptr);
  write_cross_section_csv(out_path, field, fixed_axis, offset, samples, truth);
}

std::vector<SweepRow> run_sweep(const RunConfig& config) {
  config.validate();
  if (!config.test_case) throw config_error("sweep: config must name a test case");

  auto space = make_space(config.mesh_n, config.degree);
  const std::vector<LoadCase> loads = boundary_data_set(config.loads);
  const MeasurementSet exact = generate_exact_data(*config.test_case, loads, config.fine_factor,
                                                   *space, config.degree, config.solver,
                                                   config.threads);

  const fs::path root(config.output_dir);
  ensure_dir(root);

  const std::vector<std::pair<double, std::string>> grid = {
      {0.0, "delta_0"}, {0.01, "delta_1pc"}, {0.05, "delta_5pc"}, {0.10, "delta_10pc"}};

  std::vector<SweepRow> rows;
  for (const auto& [delta, name] : grid) {
    NoiseOptions noise = config.noise_options();
    noise.delta_rel = delta;
    const MeasurementSet set = add_noise(exact, noise, *space);

    const fs::path dir = root / name;
    ensure_dir(dir);
    write_measurements(dir / "measurements_exact.txt", set, false, *space);
    write_measurements(dir / "measurements_noisy.txt", set, true, *space);
    write_manifest(dir / "manifest.txt", set, *space, config.layout);

    const ReconstructionResult result = reconstruct_from(config, set, space, dir, false);
    SweepRow row;
    row.delta = delta;
    row.error = result.history.empty() || !result.history.back().error
                    ? std::nan("")
                    : *result.history.back().error;
    row.residual = result.history.empty() ? std::nan("") : result.history.back().residual;
    row.outer_steps = static_cast<int>(result.history.size());
    row.stop_reason = result.stop_reason;
    rows.push_back(row);
  }

  std::ofstream out(root / "sweep.txt");
  if (!out) throw io_error("cannot open sweep summary for writing");
  out << "# case=" << to_string(*config.test_case) << " loads=" << config.loads
      << " N=" << config.mesh_n << " degree=" << config.degree << " seed=" << config.seed << "\n";
  out << "# delta e residual outer_steps stop_reason\n";
  for (const SweepRow& r : rows)
    out << format_double(r.delta) << ' ' << format_double(r.error) << ' '
        << format_double(r.residual) << ' ' << r.outer_steps << ' ' << to_string(r.stop_reason)
        << "\n";
  return rows;
}

}  // namespace tct::cli
