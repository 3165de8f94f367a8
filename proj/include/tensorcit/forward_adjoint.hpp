#ifndef TENSORCIT_FORWARD_ADJOINT_HPP
#define TENSORCIT_FORWARD_ADJOINT_HPP

#include <string>
#include <vector>

#include "tensorcit/assembly.hpp"
#include "tensorcit/fe_space.hpp"
#include "tensorcit/tensor_field.hpp"

namespace tct {

/// One excitation: volume source f (empty means f = 0) and Dirichlet data g.
struct LoadCase {
  ScalarFunction source;     // may be null
  ScalarFunction dirichlet;  // required
  std::string label;
};

/// Per-quadrature-point current density samples for a single load.
using CurrentDensity = QuadVectorField;

/// Solve the forward problem: interior weak form with the given conductivity,
/// boundary values interpolated from the load's Dirichlet data.
ScalarField solve_forward(const SymTensorField& tensor, const LoadCase& load,
                          std::shared_ptr<const FeSpace> space,
                          LinearSolver solver = LinearSolver::ldlt);

/// Model-predicted data A(x) grad(u)(x) at the space's quadrature points.
CurrentDensity current_density(const SymTensorField& tensor, const ScalarField& state);

/// Adjoint solve: p in the zero-boundary space with
/// (A grad p, grad v) = -(A (A grad u - h), grad v) for all interior v.
ScalarField solve_adjoint(const SymTensorField& tensor, const ScalarField& state,
                          const CurrentDensity& data, std::shared_ptr<const FeSpace> space,
                          LinearSolver solver = LinearSolver::ldlt);

/// Same against a prebuilt operator (factorization shared across loads).
ScalarField solve_adjoint_with(const DirichletOperator& op, const SymTensorField& tensor,
                               const ScalarField& state, const CurrentDensity& data,
                               std::shared_ptr<const FeSpace> space);

/// Linearized (directional state derivative) solve: w in the zero-boundary
/// space with (A grad w, grad v) = -(H grad u, grad v).
ScalarField solve_linearized(const SymTensorField& tensor, const ScalarField& state,
                             const SymTensorField& direction, std::shared_ptr<const FeSpace> space,
                             LinearSolver solver = LinearSolver::ldlt);

}  // namespace tct

#endif
