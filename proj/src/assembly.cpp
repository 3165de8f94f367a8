#include "tensorcit/assembly.hpp"

#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace tct {

namespace {

template <typename TensorAt>
SparseMatrix assemble_stiffness_impl(const FeSpace& space, TensorAt&& tensor_at) {
  const Mesh& mesh = space.mesh();
  const int nloc = space.local_dof_count();
  const TriangleRule& rule = space.rule();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.triangle_count()) * nloc * nloc);
  Vec2 grads[6];
  double local[36];

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    std::fill(local, local + nloc * nloc, 0.0);
    const auto& qps = space.quad_points(t);
    for (int q = 0; q < rule.size(); ++q) {
      space.basis_gradients_at_quad(t, q, grads);
      const SymTensor2 a = tensor_at(t, q);
      const double w = qps[q].weight;
      Vec2 flux[6];
      for (int k = 0; k < nloc; ++k) flux[k] = a.apply(grads[k]);
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j) local[i * nloc + j] += w * flux[j].dot(grads[i]);
    }
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j)
        triplets.emplace_back(space.global_dof(t, i), space.global_dof(t, j), local[i * nloc + j]);
  }

  SparseMatrix out(space.dof_count(), space.dof_count());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

SparseMatrix assemble_stiffness(const FeSpace& space, const SymTensorField& tensor) {
  if (tensor.mesh.get() != &space.mesh())
    throw layout_error("assemble_stiffness: tensor field lives on a different mesh");
  const TriangleRule& rule = space.rule();
  return assemble_stiffness_impl(
      space, [&](int t, int q) { return tensor.eval(t, rule.points[q]); });
}

SparseMatrix assemble_stiffness(const FeSpace& space, const TensorFunction& tensor) {
  return assemble_stiffness_impl(
      space, [&](int t, int q) { return tensor(space.quad_points(t)[q].point); });
}

Eigen::VectorXd assemble_div_load(const FeSpace& space, const QuadVectorField& field) {
  if (!(field.layout == space.quad_layout()))
    throw layout_error("assemble_div_load: sample layout does not match the space quadrature");
  const Mesh& mesh = space.mesh();
  const int nloc = space.local_dof_count();
  const TriangleRule& rule = space.rule();

  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.dof_count());
  Vec2 grads[6];
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& qps = space.quad_points(t);
    for (int q = 0; q < rule.size(); ++q) {
      space.basis_gradients_at_quad(t, q, grads);
      const Vec2 v = field.at(t, q);
      const double w = qps[q].weight;
      for (int k = 0; k < nloc; ++k)
        out[space.global_dof(t, k)] -= w * v.dot(grads[k]);
    }
  }
  return out;
}

Eigen::VectorXd assemble_source_load(const FeSpace& space, const ScalarFunction& f) {
  const Mesh& mesh = space.mesh();
  const int nloc = space.local_dof_count();
  const TriangleRule& rule = space.rule();

  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.dof_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& qps = space.quad_points(t);
    for (int q = 0; q < rule.size(); ++q) {
      const double fw = f(qps[q].point) * qps[q].weight;
      const double* phi = space.basis_at_quad(q);
      for (int k = 0; k < nloc; ++k) out[space.global_dof(t, k)] += fw * phi[k];
    }
  }
  return out;
}

SparseSystem reduce_dirichlet(const FeSpace& space, const SparseMatrix& stiffness,
                              const Eigen::VectorXd& load, const ScalarField& boundary_values) {
  const int n_int = space.interior_count();
  SparseSystem sys;
  sys.space = &space;
  sys.lifting = Eigen::VectorXd::Zero(space.dof_count());
  for (int dof : space.boundary_dofs()) sys.lifting[dof] = boundary_values.coeffs[dof];

  Eigen::VectorXd rhs(n_int);
  for (int k = 0; k < n_int; ++k) rhs[k] = load[space.interior_to_dof(k)];

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(stiffness.nonZeros());
  for (int col = 0; col < stiffness.outerSize(); ++col) {
    const int jc = space.interior_index(col);
    for (SparseMatrix::InnerIterator it(stiffness, col); it; ++it) {
      const int ir = space.interior_index(static_cast<int>(it.row()));
      if (ir < 0) continue;
      if (jc >= 0)
        triplets.emplace_back(ir, jc, it.value());
      else
        rhs[ir] -= it.value() * sys.lifting[col];
    }
  }
  sys.matrix.resize(n_int, n_int);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.rhs = std::move(rhs);
  return sys;
}

struct DirichletOperator::Impl {
  LinearSolver kind;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>> cg;
};

DirichletOperator::DirichletOperator(std::shared_ptr<const FeSpace> space, SparseMatrix stiffness,
                                     LinearSolver solver)
    : space_(std::move(space)), stiffness_(std::move(stiffness)), impl_(new Impl) {
  const FeSpace& sp = *space_;
  matrix_scale_ = stiffness_.nonZeros() > 0 ? stiffness_.coeffs().abs().maxCoeff() : 0.0;

  // Interior block; boundary columns stay in stiffness_ for lifting.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(stiffness_.nonZeros());
  for (int col = 0; col < stiffness_.outerSize(); ++col) {
    const int jc = sp.interior_index(col);
    if (jc < 0) continue;
    for (SparseMatrix::InnerIterator it(stiffness_, col); it; ++it) {
      const int ir = sp.interior_index(static_cast<int>(it.row()));
      if (ir >= 0) triplets.emplace_back(ir, jc, it.value());
    }
  }
  interior_.resize(sp.interior_count(), sp.interior_count());
  interior_.setFromTriplets(triplets.begin(), triplets.end());

  impl_->kind = solver;
  if (solver == LinearSolver::ldlt) {
    impl_->ldlt.compute(interior_);
    if (impl_->ldlt.info() != Eigen::Success)
      throw solver_error("dirichlet solve: LDLT factorization failed");
    if ((impl_->ldlt.vectorD().array() <= 0.0).any())
      throw solver_error("dirichlet solve: stiffness matrix is not positive definite "
                         "(coefficient escaped the admissible set?)");
  } else {
    impl_->cg.setTolerance(1e-14);
    impl_->cg.setMaxIterations(40 * interior_.rows());
    impl_->cg.compute(interior_);
  }
}

DirichletOperator::~DirichletOperator() = default;
DirichletOperator::DirichletOperator(DirichletOperator&&) noexcept = default;

ScalarField DirichletOperator::solve(const Eigen::VectorXd& load,
                                     const ScalarField& boundary_values) const {
  const FeSpace& sp = *space_;
  const int n_int = sp.interior_count();

  Eigen::VectorXd lifting = Eigen::VectorXd::Zero(sp.dof_count());
  for (int dof : sp.boundary_dofs()) lifting[dof] = boundary_values.coeffs[dof];

  Eigen::VectorXd rhs(n_int);
  for (int k = 0; k < n_int; ++k) rhs[k] = load[sp.interior_to_dof(k)];
  for (int dof : sp.boundary_dofs()) {
    const double g = lifting[dof];
    if (g == 0.0) continue;
    for (SparseMatrix::InnerIterator it(stiffness_, dof); it; ++it) {
      const int ir = sp.interior_index(static_cast<int>(it.row()));
      if (ir >= 0) rhs[ir] -= it.value() * g;
    }
  }

  Eigen::VectorXd x;
  if (impl_->kind == LinearSolver::ldlt) {
    x = impl_->ldlt.solve(rhs);
  } else {
    x = impl_->cg.solve(rhs);
    if (impl_->cg.info() != Eigen::Success)
      throw solver_error("dirichlet solve: CG did not converge");
  }

  const double scale = load.norm() + matrix_scale_ * lifting.norm();
  const double residual = (interior_ * x - rhs).norm();
  if (!(residual <= 1e-10 * std::max(scale, 1e-30)))
    throw solver_error("dirichlet solve: interior residual " + std::to_string(residual) +
                       " exceeds tolerance (ill-conditioned or indefinite system)");

  ScalarField out(boundary_values.space, std::move(lifting));
  for (int k = 0; k < n_int; ++k) out.coeffs[sp.interior_to_dof(k)] = x[k];
  return out;
}

ScalarField solve_dirichlet_system(const SparseMatrix& stiffness, const Eigen::VectorXd& load,
                                   const ScalarField& boundary_values, LinearSolver solver) {
  DirichletOperator op(boundary_values.space, stiffness, solver);
  return op.solve(load, boundary_values);
}

}  // namespace tct
