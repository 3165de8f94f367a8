#include "tensorcit/forward_adjoint.hpp"

namespace tct {

ScalarField solve_forward(const SymTensorField& tensor, const LoadCase& load,
                          std::shared_ptr<const FeSpace> space, LinearSolver solver) {
  const SparseMatrix stiffness = assemble_stiffness(*space, tensor);
  Eigen::VectorXd rhs = load.source ? assemble_source_load(*space, load.source)
                                    : Eigen::VectorXd::Zero(space->dof_count());
  ScalarField bc = set_dirichlet(ScalarField(space), load.dirichlet);
  return solve_dirichlet_system(stiffness, rhs, bc, solver);
}

CurrentDensity current_density(const SymTensorField& tensor, const ScalarField& state) {
  const FeSpace& sp = *state.space;
  if (tensor.mesh.get() != &sp.mesh())
    throw layout_error("current_density: tensor and state live on different meshes");
  CurrentDensity out = gradient_at_quadrature(state);
  const TriangleRule& rule = sp.rule();
  for (int t = 0; t < out.layout.triangle_count; ++t)
    for (int q = 0; q < out.layout.points_per_triangle; ++q)
      out.at(t, q) = tensor.eval(t, rule.points[q]).apply(out.at(t, q));
  return out;
}

namespace {

Eigen::VectorXd adjoint_load(const SymTensorField& tensor, const ScalarField& state,
                             const CurrentDensity& data, const FeSpace& space) {
  if (!(data.layout == space.quad_layout()))
    throw layout_error("solve_adjoint: data layout does not match the space quadrature");
  const TriangleRule& rule = space.rule();
  QuadVectorField residual_flux = gradient_at_quadrature(state);
  for (int t = 0; t < residual_flux.layout.triangle_count; ++t)
    for (int q = 0; q < residual_flux.layout.points_per_triangle; ++q) {
      const SymTensor2 a = tensor.eval(t, rule.points[q]);
      residual_flux.at(t, q) = a.apply(a.apply(residual_flux.at(t, q)) - data.at(t, q));
    }
  return assemble_div_load(space, residual_flux);
}

}  // namespace

ScalarField solve_adjoint_with(const DirichletOperator& op, const SymTensorField& tensor,
                               const ScalarField& state, const CurrentDensity& data,
                               std::shared_ptr<const FeSpace> space) {
  return op.solve(adjoint_load(tensor, state, data, *space), ScalarField(std::move(space)));
}

ScalarField solve_adjoint(const SymTensorField& tensor, const ScalarField& state,
                          const CurrentDensity& data, std::shared_ptr<const FeSpace> space,
                          LinearSolver solver) {
  const Eigen::VectorXd rhs = adjoint_load(tensor, state, data, *space);
  const SparseMatrix stiffness = assemble_stiffness(*space, tensor);
  return solve_dirichlet_system(stiffness, rhs, ScalarField(std::move(space)), solver);
}

ScalarField solve_linearized(const SymTensorField& tensor, const ScalarField& state,
                             const SymTensorField& direction, std::shared_ptr<const FeSpace> space,
                             LinearSolver solver) {
  const TriangleRule& rule = space->rule();
  QuadVectorField flux = gradient_at_quadrature(state);
  for (int t = 0; t < flux.layout.triangle_count; ++t)
    for (int q = 0; q < flux.layout.points_per_triangle; ++q)
      flux.at(t, q) = direction.eval(t, rule.points[q]).apply(flux.at(t, q));
  const Eigen::VectorXd rhs = assemble_div_load(*space, flux);
  const SparseMatrix stiffness = assemble_stiffness(*space, tensor);
  return solve_dirichlet_system(stiffness, rhs, ScalarField(space), solver);
}

}  // namespace tct
