#ifndef TENSORCIT_OBJECTIVE_HPP
#define TENSORCIT_OBJECTIVE_HPP

#include <vector>

#include "tensorcit/forward_adjoint.hpp"

namespace tct {

struct ObjectiveValue {
  double fidelity = 0.0;  // 1/2 sum_l |A grad u_l - h_l|^2
  double penalty = 0.0;   // gamma/2 |||A|||_2^2
  double total = 0.0;
  double gamma = 0.0;
};

/// Squared L2(Omega)^{2,2} norm: int (a11^2 + 2 a12^2 + a22^2) dx, exact
/// quadrature (off-diagonal counted twice, the sum running over all i,j).
double tensor_l2_norm_sq(const SymTensorField& tensor);

/// L2 norm of the difference of two fields with a shared layout.
double tensor_l2_distance(const SymTensorField& a, const SymTensorField& b);

ObjectiveValue eval_objective(const SymTensorField& tensor,
                              const std::vector<ScalarField>& states,
                              const std::vector<CurrentDensity>& data, double gamma);

/// Sum over loads of |A grad u_l - h_l|^2 in L2 (twice the fidelity).
double data_residual(const SymTensorField& tensor, const std::vector<ScalarField>& states,
                     const std::vector<CurrentDensity>& data);

/// Riesz representer of the objective derivative in the tensor space: the
/// weighted least-squares fit (per triangle) of
///   sum_l grad(u_l) (x) (A grad u_l - h_l) + sum_l grad(u_l) (x) grad(p_l)
/// over the quadrature points, plus gamma A. Pairing the result with any
/// member of the tensor space under the L2 tensor inner product reproduces the
/// directional derivative exactly.
SymTensorField eval_gradient(const SymTensorField& tensor,
                             const std::vector<ScalarField>& states,
                             const std::vector<ScalarField>& adjoints,
                             const std::vector<CurrentDensity>& data, double gamma);

/// int_Omega G . H dx with the Frobenius pairing, exact quadrature.
double directional_derivative(const SymTensorField& gradient, const SymTensorField& direction);

/// Relative error |||A - ref|||_2 / |||ref|||_2 against an analytic reference
/// evaluated at quadrature points.
double relative_error(const SymTensorField& tensor, const TensorFunction& reference);
/// Same against a reference field with identical layout.
double relative_error(const SymTensorField& tensor, const SymTensorField& reference);

/// Per-component L2 errors (a11, a12, a22) against an analytic reference.
std::array<double, 3> component_l2_errors(const SymTensorField& tensor,
                                          const TensorFunction& reference);

}  // namespace tct

#endif
