// Command-line front end: dataset synthesis, reconstruction, evaluation and
// export subcommands over the tensorcit library.

#include <iostream>

#include <CLI11.hpp>

#include "tensorcit/cli.hpp"

namespace {

int exit_code_for(tct::ErrorKind kind) {
  switch (kind) {
    case tct::ErrorKind::solver: return 3;
    case tct::ErrorKind::io: return 4;
    default: return 2;  // config, argument, domain, layout
  }
}

tct::RunConfig load_config(const std::string& path, const std::string& out_override,
                           int threads_override) {
  tct::RunConfig cfg = tct::parse_config_file(path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (threads_override > 0) cfg.threads = threads_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensorcit: anisotropic conductivity reconstruction from internal current densities"};
  app.require_subcommand(1);

  std::string config_path, out_dir, data_dir, field_path, axis = "x2", case_name;
  int threads = 0, samples = 201;
  double offset = 0.0;
  bool vtk = false;
  std::string metrics_path, csv_path;

  app.add_option("--threads", threads, "cap worker concurrency (overrides config)");

  auto* synth = app.add_subcommand("synthesize", "generate exact and noisy measurement files");
  synth->add_option("--config", config_path, "run configuration file")->required();
  synth->add_option("--out", out_dir, "output directory (overrides config)");

  auto* rec = app.add_subcommand("reconstruct", "run the path-following reconstruction");
  rec->add_option("--config", config_path, "run configuration file")->required();
  rec->add_option("--data", data_dir, "dataset directory from synthesize")->required();
  rec->add_option("--out", out_dir, "output directory (overrides config)");
  rec->add_flag("--vtk", vtk, "also export the reconstruction as legacy VTK");

  auto* eval = app.add_subcommand("evaluate", "compare a tensor field file against a test case");
  eval->add_option("--field", field_path, "tensor field file")->required();
  eval->add_option("--case", case_name, "test case (example1..example7)")->required();
  eval->add_option("--out", metrics_path, "also write metrics to this file");

  auto* cross = app.add_subcommand("cross-section", "sample a tensor field along a line");
  cross->add_option("--field", field_path, "tensor field file")->required();
  cross->add_option("--axis", axis, "fixed coordinate: x1 or x2 (default x2)");
  cross->add_option("--offset", offset, "fixed coordinate value")->required();
  cross->add_option("--samples", samples, "number of sample points (default 201)");
  cross->add_option("--case", case_name, "test case for truth columns");
  cross->add_option("--out", csv_path, "output CSV path")->required();

  auto* sweep = app.add_subcommand("sweep", "run the noise grid {0,1%,5%,10%} for one example");
  sweep->add_option("--config", config_path, "run configuration file")->required();
  sweep->add_option("--out", out_dir, "output directory (overrides config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      tct::cli::run_synthesize(load_config(config_path, out_dir, threads));
      std::cout << "dataset written\n";
    } else if (rec->parsed()) {
      const tct::RunConfig cfg = load_config(config_path, out_dir, threads);
      const tct::ReconstructionResult result = tct::cli::run_reconstruct(cfg, data_dir, vtk);
      std::cout << "stop_reason=" << tct::to_string(result.stop_reason)
                << " outer_steps=" << result.history.size();
      if (!result.history.empty() && result.history.back().error)
        std::cout << " e=" << tct::format_double(*result.history.back().error);
      std::cout << "\n";
    } else if (eval->parsed()) {
      const tct::TestCase c = tct::parse_test_case(case_name);
      std::optional<std::filesystem::path> out;
      if (!metrics_path.empty()) out = metrics_path;
      const tct::cli::EvaluationResult r = tct::cli::run_evaluate(field_path, c, out);
      std::cout << "e=" << tct::format_double(r.relative_error) << "\n"
                << "err_a11=" << tct::format_double(r.component_errors[0]) << "\n"
                << "err_a12=" << tct::format_double(r.component_errors[1]) << "\n"
                << "err_a22=" << tct::format_double(r.component_errors[2]) << "\n";
    } else if (cross->parsed()) {
      std::optional<tct::TestCase> c;
      if (!case_name.empty()) c = tct::parse_test_case(case_name);
      tct::cli::run_cross_section(field_path, axis, offset, samples, c, csv_path);
      std::cout << "cross section written\n";
    } else if (sweep->parsed()) {
      const auto rows = tct::cli::run_sweep(load_config(config_path, out_dir, threads));
      std::cout << "# delta e residual outer_steps stop_reason\n";
      for (const auto& r : rows)
        std::cout << tct::format_double(r.delta) << ' ' << tct::format_double(r.error) << ' '
                  << tct::format_double(r.residual) << ' ' << r.outer_steps << ' '
                  << tct::to_string(r.stop_reason) << "\n";
    }
  } catch (const tct::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
