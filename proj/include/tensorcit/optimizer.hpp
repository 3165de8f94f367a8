#ifndef TENSORCIT_OPTIMIZER_HPP
#define TENSORCIT_OPTIMIZER_HPP

#include <optional>
#include <vector>

#include <Eigen/SparseLU>

#include "tensorcit/objective.hpp"
#include "tensorcit/spd_projection.hpp"

namespace tct {

struct NewtonConfig {
  double tolerance = 1e-3;  // tau: relative-change stopping criterion
  int max_inner_iterations = 5;
  bool resolve_after_projection = false;

  void validate() const {
    if (!(tolerance > 0.0)) throw config_error("newton: tolerance must be positive");
    if (max_inner_iterations < 1) throw config_error("newton: max_inner_iterations must be >= 1");
  }
};

struct PathConfig {
  double gamma0 = 10.0;
  double rho = 0.7;
  std::vector<double> noise_norm_sq;  // per-load discrepancy bound; empty means 0
  int max_outer_iterations = 60;
  double stagnation_tol = 1e-6;  // outer relative tensor change

  double noise_total() const {
    double s = 0.0;
    for (double v : noise_norm_sq) s += v;
    return s;
  }
  void validate() const {
    if (!(gamma0 > 0.0)) throw config_error("path: gamma0 must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw config_error("path: rho must lie in (0,1)");
    if (max_outer_iterations < 1) throw config_error("path: max_outer_iterations must be >= 1");
    for (double v : noise_norm_sq)
      if (v < 0.0) throw config_error("path: noise norms must be nonnegative");
  }
};

/// Current iterate of the optimality system.
struct NewtonState {
  SymTensorField tensor;
  std::vector<ScalarField> states;
  std::vector<ScalarField> adjoints;
};

struct StoppingMetric {
  double value = 0.0;
  bool degenerate = false;  // some denominator vanished and its term was skipped
};

/// Max of the tensor relative L2 change and all state/adjoint relative L2
/// changes; terms with vanishing denominators are skipped and flagged.
StoppingMetric stopping_metric(const NewtonState& prev, const NewtonState& next);

struct NewtonIncrement {
  SymTensorField tensor;
  std::vector<Eigen::VectorXd> states;    // full dof vectors, zero on the boundary
  std::vector<Eigen::VectorXd> adjoints;  // full dof vectors, zero on the boundary
};

/// Assembles and solves the coupled Newton system on the first-order
/// optimality residual, with unknowns ordered as all state increments, all
/// adjoint increments, then the tensor increment. The sparsity pattern and the
/// LU symbolic analysis are computed once and reused across iterations.
class NewtonAssembler {
public:
  NewtonAssembler(std::shared_ptr<const FeSpace> space, TensorLayout layout, int load_count);

  int state_block_size() const { return space_->interior_count(); }
  int tensor_block_offset() const { return 2 * load_count_ * state_block_size(); }
  int total_size() const { return tensor_block_offset() + 3 * tensor_node_count_; }
  int tensor_dof(int tri, int node, int comp) const {
    return tensor_block_offset() + (tri * tensor_nodes_per_tri_ + node) * 3 + comp;
  }

  /// Build the Jacobian and residual at the given iterate.
  void assemble(const NewtonState& state, const std::vector<LoadCase>& loads,
                const std::vector<CurrentDensity>& data, double gamma);

  const SparseMatrix& matrix() const { return matrix_; }
  const Eigen::VectorXd& residual() const { return residual_; }

  /// Solve for the Newton increment. A residual below round-off scale yields
  /// the zero increment (the exact solution); a singular factorization raises
  /// a solver error suggesting that gamma is too small for the linearization.
  NewtonIncrement solve();

private:
  template <typename Emit>
  void walk_entries(const NewtonState& state, const std::vector<CurrentDensity>& data,
                    double gamma, Emit&& emit);

  std::shared_ptr<const FeSpace> space_;
  TensorLayout layout_;
  int load_count_;
  int tensor_nodes_per_tri_;
  int tensor_node_count_;

  SparseMatrix matrix_;
  Eigen::VectorXd residual_;
  std::vector<int> slots_;  // triplet emission order -> compressed storage slot
  bool pattern_ready_ = false;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
};

/// Convenience wrapper: one Newton step at the given iterate.
NewtonIncrement newton_step(NewtonAssembler& assembler, const NewtonState& state,
                            const std::vector<LoadCase>& loads,
                            const std::vector<CurrentDensity>& data, double gamma);

struct InnerReport {
  int iterations = 0;
  double last_metric = 0.0;
  bool metric_degenerate = false;
  EigenRange eigen_range{0.0, 0.0};  // over all post-projection iterates
};

/// Fresh forward/adjoint solves at the given tensor.
NewtonState initialize_state(const SymTensorField& tensor, const std::vector<LoadCase>& loads,
                             const std::vector<CurrentDensity>& data,
                             std::shared_ptr<const FeSpace> space,
                             LinearSolver solver = LinearSolver::ldlt, int threads = 1);

/// Inner loop: Newton steps followed by the pointwise projection of the
/// tensor iterate, stopping when the relative change falls below the
/// tolerance or the iteration budget is exhausted.
NewtonState projected_newton(NewtonAssembler& assembler, NewtonState state,
                             const std::vector<LoadCase>& loads,
                             const std::vector<CurrentDensity>& data, const Bounds& bounds,
                             double gamma, const NewtonConfig& config,
                             InnerReport* report = nullptr);

enum class StopReason { discrepancy_met, max_outer, stagnation };

std::string to_string(StopReason reason);

struct IterationRecord {
  int outer = 0;
  double gamma = 0.0;
  int inner_iterations = 0;
  ObjectiveValue objective{};
  double residual = 0.0;         // E = sum_l |A grad u_l - h_l|^2
  double relative_change = 0.0;  // last inner stopping metric
  std::optional<double> error;   // e, when the exact tensor is known
  EigenRange eigen_range{0.0, 0.0};
};

struct ReconstructionResult {
  SymTensorField tensor;
  std::vector<ScalarField> states;
  std::vector<ScalarField> adjoints;
  std::vector<IterationRecord> history;
  StopReason stop_reason = StopReason::max_outer;
};

/// Path-following outer loop: solve the gamma_n = gamma0 rho^n problems with
/// warm starts, stopping at the discrepancy bound sum_l noise_norm_sq_l, on
/// stagnation of the outer tensor iterates, or at the iteration cap.
/// on_record, when given, observes each outer record as it is produced (so
/// callers can keep a partial history across solver failures).
ReconstructionResult path_following(const SymTensorField& initial_guess,
                                    const std::vector<LoadCase>& loads,
                                    const std::vector<CurrentDensity>& data,
                                    std::shared_ptr<const FeSpace> space, const Bounds& bounds,
                                    const PathConfig& path_config,
                                    const NewtonConfig& newton_config,
                                    const TensorFunction& reference = nullptr,
                                    LinearSolver solver = LinearSolver::ldlt, int threads = 1,
                                    const std::function<void(const IterationRecord&)>& on_record =
                                        nullptr);

struct GradientDescentConfig {
  double tolerance = 1e-3;
  int max_iterations = 200;
  double initial_step = 1.0;
  double armijo_slope = 1e-4;
  int max_backtracks = 40;
};

struct GradientDescentResult {
  NewtonState state;
  int iterations = 0;
  std::vector<double> objectives;  // monotone nonincreasing
  EigenRange eigen_range{0.0, 0.0};
};

/// Projected steepest descent with Armijo backtracking on the regularized
/// objective; the baseline the Newton method is measured against.
GradientDescentResult projected_gradient_descent(const SymTensorField& initial_guess,
                                                 const std::vector<LoadCase>& loads,
                                                 const std::vector<CurrentDensity>& data,
                                                 std::shared_ptr<const FeSpace> space,
                                                 const Bounds& bounds, double gamma,
                                                 const GradientDescentConfig& config,
                                                 LinearSolver solver = LinearSolver::ldlt);

}  // namespace tct

#endif
