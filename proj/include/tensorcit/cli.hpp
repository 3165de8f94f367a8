#ifndef TENSORCIT_CLI_HPP
#define TENSORCIT_CLI_HPP

#include <filesystem>
#include <optional>

#include "tensorcit/config.hpp"
#include "tensorcit/io.hpp"

namespace tct::cli {

/// Subcommand bodies shared by the command-line binary and the tests.
/// All outputs are deterministic functions of (config, inputs).

/// Write exact + noisy measurement files and the manifest into output_dir.
void run_synthesize(const RunConfig& config);

/// Reconstruct from a dataset directory; writes tensor.txt, history.txt (and
/// result.vtk when requested) into output_dir. History rows accumulated so
/// far are written even if a solver error interrupts the run.
ReconstructionResult run_reconstruct(const RunConfig& config,
                                     const std::filesystem::path& data_dir, bool vtk = false);

struct EvaluationResult {
  double relative_error;
  std::array<double, 3> component_errors;  // a11, a12, a22 in L2
  double reference_norm;
};

/// Compare a tensor field file against a test case; optionally write metrics.txt.
EvaluationResult run_evaluate(const std::filesystem::path& field_path, TestCase test_case,
                              const std::optional<std::filesystem::path>& out_path);

/// Sample a tensor field file along an axis-aligned line into a CSV.
void run_cross_section(const std::filesystem::path& field_path, const std::string& axis,
                       double offset, int samples, const std::optional<TestCase>& test_case,
                       const std::filesystem::path& out_path);

struct SweepRow {
  double delta;
  double error;
  double residual;
  int outer_steps;
  StopReason stop_reason;
};

/// Run the noise-level grid {0, 1%, 5%, 10%} for one example: synthesize and
/// reconstruct per level under output_dir, and write the summary table sweep.txt.
std::vector<SweepRow> run_sweep(const RunConfig& config);

}  // namespace tct::cli

#endif
