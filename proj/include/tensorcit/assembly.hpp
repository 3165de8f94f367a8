#ifndef TENSORCIT_ASSEMBLY_HPP
#define TENSORCIT_ASSEMBLY_HPP

#include <Eigen/Sparse>

#include "tensorcit/fe_space.hpp"
#include "tensorcit/tensor_field.hpp"

namespace tct {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Stiffness matrix over all dofs: entry (i,j) = int_Omega A grad(phi_j) . grad(phi_i) dx,
/// quadrature exact for the integrand. Symmetric; row sums vanish before
/// boundary elimination.
SparseMatrix assemble_stiffness(const FeSpace& space, const SymTensorField& tensor);

/// Same with the coefficient evaluated analytically at quadrature points.
SparseMatrix assemble_stiffness(const FeSpace& space, const TensorFunction& tensor);

/// Weak divergence load: entry i = -int_Omega V . grad(phi_i) dx for V sampled
/// on the space's quadrature points.
Eigen::VectorXd assemble_div_load(const FeSpace& space, const QuadVectorField& field);

/// Source load: entry i = int_Omega f phi_i dx.
Eigen::VectorXd assemble_source_load(const FeSpace& space, const ScalarFunction& f);

enum class LinearSolver { ldlt, cg };

/// Interior system after Dirichlet elimination by lifting.
struct SparseSystem {
  const FeSpace* space;
  SparseMatrix matrix;      // interior x interior
  Eigen::VectorXd rhs;      // lifted right side
  Eigen::VectorXd lifting;  // boundary dof values over all dofs
};

SparseSystem reduce_dirichlet(const FeSpace& space, const SparseMatrix& stiffness,
                              const Eigen::VectorXd& load, const ScalarField& boundary_values);

/// Interior operator with a reusable factorization: factor once, then solve
/// for many (load, boundary data) pairs against the same stiffness matrix.
/// Construction throws a solver error when the matrix is not positive definite
/// on the interior dofs; each solve enforces the interior residual bound
/// 1e-10 * (|load| + |K| * |lift|).
class DirichletOperator {
public:
  DirichletOperator(std::shared_ptr<const FeSpace> space, SparseMatrix stiffness,
                    LinearSolver solver = LinearSolver::ldlt);
  ~DirichletOperator();
  DirichletOperator(DirichletOperator&&) noexcept;

  ScalarField solve(const Eigen::VectorXd& load, const ScalarField& boundary_values) const;
  const SparseMatrix& stiffness() const { return stiffness_; }

private:
  struct Impl;
  std::shared_ptr<const FeSpace> space_;
  SparseMatrix stiffness_;
  SparseMatrix interior_;
  double matrix_scale_ = 0.0;
  std::unique_ptr<Impl> impl_;
};

/// Solve the Dirichlet problem: eliminate boundary dofs against the boundary
/// values of `boundary_values`, solve the interior system, and return the full
/// field. Throws a solver error when the factorization signals loss of
/// positive definiteness or the interior residual exceeds
/// 1e-10 * (|load| + |K| * |lift|).
ScalarField solve_dirichlet_system(const SparseMatrix& stiffness, const Eigen::VectorXd& load,
                                   const ScalarField& boundary_values,
                                   LinearSolver solver = LinearSolver::ldlt);

}  // namespace tct

#endif
