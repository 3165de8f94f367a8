#ifndef TENSORCIT_FE_SPACE_HPP
#define TENSORCIT_FE_SPACE_HPP

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "tensorcit/mesh.hpp"
#include "tensorcit/util.hpp"

namespace tct {

using ScalarFunction = std::function<double(const Vec2&)>;

/// Identifies the quadrature point set a sampled field lives on.
struct QuadLayout {
  int triangle_count = 0;
  int points_per_triangle = 0;
  int rule_degree = 0;

  int total_points() const { return triangle_count * points_per_triangle; }
  bool operator==(const QuadLayout&) const = default;
};

/// Continuous Lagrange space of degree 1 or 2 on a uniform mesh. Degrees of
/// freedom sit on the refined grid with spacing h/degree, so dofs on shared
/// edges and vertices coincide between adjacent triangles by construction.
class FeSpace {
public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int dof_count() const { return static_cast<int>(dof_coords_.size()); }
  int interior_count() const { return interior_count_; }
  int local_dof_count() const { return degree_ == 1 ? 3 : 6; }

  const Vec2& dof_coord(int dof) const { return dof_coords_[dof]; }
  int global_dof(int tri, int local) const { return dof_map_[tri * local_dof_count() + local]; }
  bool is_boundary_dof(int dof) const { return interior_index_[dof] < 0; }
  /// Index among interior dofs, or -1 for boundary dofs.
  int interior_index(int dof) const { return interior_index_[dof]; }
  int interior_to_dof(int k) const { return interior_dofs_[k]; }
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }

  /// Basis values at a barycentric point, local dof order.
  void basis_values(const std::array<double, 3>& bary, double* values) const;
  /// Physical-space basis gradients on a triangle at a barycentric point.
  void basis_gradients(int tri, const std::array<double, 3>& bary, Vec2* grads) const;

  /// Quadrature rule exact for every form assembled on this space
  /// (degree max(2, 2*degree)); measurement data live on these points.
  int quadrature_degree() const { return quad_degree_; }
  QuadLayout quad_layout() const;
  const TriangleRule& rule() const { return triangle_rule(quad_degree_); }
  /// Physical quadrature points of triangle tri (weights sum to its area).
  const std::vector<QuadraturePoint>& quad_points(int tri) const { return quad_points_[tri]; }
  /// Basis values at reference quadrature point q (size local_dof_count()).
  const double* basis_at_quad(int q) const { return basis_at_quad_.data() + q * local_dof_count(); }
  /// Physical basis gradients at quadrature point q of triangle tri.
  void basis_gradients_at_quad(int tri, int q, Vec2* grads) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  int quad_degree_;
  std::vector<Vec2> dof_coords_;
  std::vector<int> dof_map_;
  std::vector<int> interior_index_;
  std::vector<int> interior_dofs_;
  std::vector<int> boundary_dofs_;
  int interior_count_ = 0;
  std::vector<std::vector<QuadraturePoint>> quad_points_;
  std::vector<double> basis_at_quad_;       // [q][local]
  std::vector<double> dbasis_at_quad_;      // [q][local][3], derivative wrt barycentric
  std::vector<Vec2> barycentric_gradients_; // [tri][3]
};

/// Coefficient vector over a space's dofs.
struct ScalarField {
  std::shared_ptr<const FeSpace> space;
  Eigen::VectorXd coeffs;

  explicit ScalarField(std::shared_ptr<const FeSpace> s)
      : space(std::move(s)), coeffs(Eigen::VectorXd::Zero(space->dof_count())) {}
  ScalarField(std::shared_ptr<const FeSpace> s, Eigen::VectorXd c)
      : space(std::move(s)), coeffs(std::move(c)) {}

  double value_at(int tri, const std::array<double, 3>& bary) const;
  Vec2 gradient_at(int tri, const std::array<double, 3>& bary) const;
  double value_at_point(const Vec2& p) const;
  Vec2 gradient_at_point(const Vec2& p) const;
};

/// Nodal interpolant of an analytic function.
ScalarField interpolate(std::shared_ptr<const FeSpace> space, const ScalarFunction& f);

/// Set boundary dof coefficients to the nodal interpolation of g; interior
/// coefficients are untouched.
ScalarField set_dirichlet(const ScalarField& field, const ScalarFunction& g);

/// Vector samples on a space's quadrature points, indexed (triangle, point).
struct QuadVectorField {
  QuadLayout layout;
  std::vector<Vec2> values;

  Vec2& at(int tri, int q) { return values[tri * layout.points_per_triangle + q]; }
  const Vec2& at(int tri, int q) const { return values[tri * layout.points_per_triangle + q]; }
};

/// Exact per-point gradient of the piecewise polynomial at quadrature points.
QuadVectorField gradient_at_quadrature(const ScalarField& field);

/// Quadrature-weighted L2(Omega) norm of a finite element field.
double scalar_l2_norm(const ScalarField& field);

/// Quadrature-weighted H1(Omega) distance to an analytic reference
/// (value and gradient supplied separately); used by convergence studies.
double h1_error(const ScalarField& field, const ScalarFunction& value,
                const std::function<Vec2(const Vec2&)>& gradient);

}  // namespace tct

#endif
