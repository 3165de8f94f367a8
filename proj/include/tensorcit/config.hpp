#ifndef TENSORCIT_CONFIG_HPP
#define TENSORCIT_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "tensorcit/assembly.hpp"
#include "tensorcit/optimizer.hpp"
#include "tensorcit/synthesis.hpp"

namespace tct {

/// Run configuration, read from flat `key = value` text with `#` comments.
/// Unknown keys are rejected with file:line diagnostics. Defaults mirror the
/// reference experimental setup (N=20, L=5, gamma0=10, rho=0.7,
/// A0=[[2,-1],[-1,2]]).
struct RunConfig {
  int mesh_n = 20;
  int degree = 2;
  TensorLayout layout = TensorLayout::dg1;
  Bounds bounds{};
  std::optional<TestCase> test_case;
  int loads = 5;
  double delta_rel = 0.0;
  std::uint64_t seed = 1;
  double gamma0 = 10.0;
  double rho = 0.7;
  double tau = 1e-3;
  int max_inner = 5;
  int max_outer = 60;
  double stagnation_tol = 1e-6;
  bool resolve_after_projection = false;
  int fine_factor = 4;
  bool noise_scalar_per_point = false;
  bool noise_shared_realization = false;
  SymTensor2 initial_guess{2.0, -1.0, 2.0};
  LinearSolver solver = LinearSolver::ldlt;
  std::string output_dir = ".";
  int threads = 1;

  void validate() const;

  NewtonConfig newton_config() const {
    return {tau, max_inner, resolve_after_projection};
  }
  NoiseOptions noise_options() const {
    return {delta_rel, seed, noise_scalar_per_point, noise_shared_realization};
  }
};

RunConfig parse_config_text(const std::string& text, const std::string& source_name);
RunConfig parse_config_file(const std::filesystem::path& path);

}  // namespace tct

#endif
