#ifndef TENSORCIT_SYNTHESIS_HPP
#define TENSORCIT_SYNTHESIS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tensorcit/forward_adjoint.hpp"

namespace tct {

enum class TestCase {
  example1,  // identity, constant
  example2,  // isotropic smooth
  example3,  // diagonal, oscillatory
  example4,  // nondiagonal smooth
  example5,  // diagonal, nonsmooth
  example6,  // nondiagonal, nonsmooth
  example7,  // discontinuous (piecewise scaling of example 3)
};

TestCase parse_test_case(const std::string& name);
std::string to_string(TestCase c);

/// Exact conductivity tensor of a test case at a point of closure(Omega).
/// The discontinuous case resolves region membership with closed subregions
/// taking precedence in index order.
SymTensor2 exact_tensor(TestCase c, const Vec2& x);

/// The exact tensor as a function, for error metrics and field interpolation.
TensorFunction exact_tensor_function(TestCase c);

/// The Dirichlet boundary data sets (3, 5 or 9 loads, all with f = 0).
std::vector<LoadCase> boundary_data_set(int count);

struct NoiseOptions {
  double delta_rel = 0.0;
  std::uint64_t seed = 0;
  bool scalar_per_point = false;     // one draw per point instead of per component
  bool shared_realization = false;   // reuse the same draw sequence for every load
};

/// Exact and noisy per-load data with everything the discrepancy principle needs.
struct MeasurementSet {
  std::vector<std::string> load_labels;
  std::vector<CurrentDensity> exact;
  std::vector<CurrentDensity> noisy;
  double delta_rel = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> noise_norm_sq;  // per-load |h_noisy - h_exact|^2 in L2
  std::optional<TestCase> test_case;

  int load_count() const { return static_cast<int>(exact.size()); }
};

/// Simulate exact data on a fine mesh (subdivisions scaled by fine_factor) and
/// transfer the current density A(x) grad u(x) to the target quadrature points,
/// with the exact tensor evaluated analytically at both fine and target points.
MeasurementSet generate_exact_data(TestCase c, const std::vector<LoadCase>& loads,
                                   int fine_factor, const FeSpace& target, int degree,
                                   LinearSolver solver = LinearSolver::ldlt, int threads = 1);

/// Multiplicative noise h(1 + delta xi), xi drawn per point (and per component
/// unless scalar_per_point) from the counter generator; records per-load
/// absolute noise norms for the discrepancy principle.
MeasurementSet add_noise(const MeasurementSet& data, const NoiseOptions& options,
                         const FeSpace& target);

}  // namespace tct

#endif
