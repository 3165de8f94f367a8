#ifndef TENSORCIT_SPD_PROJECTION_HPP
#define TENSORCIT_SPD_PROJECTION_HPP

#include "tensorcit/tensor_field.hpp"

namespace tct {

struct EigenDecomposition2 {
  double lambda_max;
  double lambda_min;
  double theta;  // R(theta) diag(lambda_max, lambda_min) R(theta)^T reproduces the input
};

/// Closed-form eigendecomposition of a symmetric 2x2 tensor. For a12 = 0 the
/// angle is 0 (or pi/2 when the diagonal is out of order); near-degenerate
/// spectra (gap below 1e-14) report theta = 0.
EigenDecomposition2 eig_sym2(const SymTensor2& t);

/// Tolerance for membership in K: eigenvalue bound checks allow a slack of
/// 64*eps*max(1, beta) so that projected tensors test as members of K and the
/// projection is bitwise idempotent.
double bounds_slack(const Bounds& bounds);

/// True when both eigenvalues lie in [alpha, beta] up to bounds_slack.
bool in_bounds(const SymTensor2& t, const Bounds& bounds);

/// Orthogonal (Frobenius) projection onto K: clamp each eigenvalue to
/// [alpha, beta], keep the eigenvectors. Members of K are returned unchanged.
SymTensor2 project_K(const SymTensor2& t, const Bounds& bounds);

/// project_K applied at every local tensor dof; by convexity of K the result
/// lies in K at every point of every triangle.
SymTensorField project_field(const SymTensorField& field, const Bounds& bounds);

/// Extremal eigenvalues over all local tensor dofs of a field.
struct EigenRange {
  double min;
  double max;
};
EigenRange eigenvalue_range(const SymTensorField& field);

}  // namespace tct

#endif
