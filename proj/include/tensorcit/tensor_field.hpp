#ifndef TENSORCIT_TENSOR_FIELD_HPP
#define TENSORCIT_TENSOR_FIELD_HPP

#include <functional>
#include <memory>
#include <vector>

#include "tensorcit/mesh.hpp"
#include "tensorcit/util.hpp"

namespace tct {

/// Symmetric 2x2 tensor [[a11, a12], [a12, a22]].
struct SymTensor2 {
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;

  static SymTensor2 identity() { return {1.0, 0.0, 1.0}; }
  static SymTensor2 diag(double d1, double d2) { return {d1, 0.0, d2}; }

  Vec2 apply(const Vec2& v) const {
    return {a11 * v.x() + a12 * v.y(), a12 * v.x() + a22 * v.y()};
  }
  /// Matrix square A*A (symmetric).
  SymTensor2 squared() const {
    return {a11 * a11 + a12 * a12, a12 * (a11 + a22), a12 * a12 + a22 * a22};
  }
  /// Frobenius inner product; the off-diagonal entry counts twice.
  double dot(const SymTensor2& o) const { return a11 * o.a11 + 2.0 * a12 * o.a12 + a22 * o.a22; }
  double frobenius_norm_sq() const { return dot(*this); }

  SymTensor2 operator+(const SymTensor2& o) const { return {a11 + o.a11, a12 + o.a12, a22 + o.a22}; }
  SymTensor2 operator-(const SymTensor2& o) const { return {a11 - o.a11, a12 - o.a12, a22 - o.a22}; }
  SymTensor2 operator*(double s) const { return {s * a11, s * a12, s * a22}; }
  double component(int c) const { return c == 0 ? a11 : (c == 1 ? a12 : a22); }
};

inline SymTensor2 operator*(double s, const SymTensor2& t) { return t * s; }

/// Symmetrized outer product, (a (x) b)_ij = (a_i b_j + a_j b_i) / 2.
inline SymTensor2 sym_outer(const Vec2& a, const Vec2& b) {
  return {a.x() * b.x(), 0.5 * (a.x() * b.y() + a.y() * b.x()), a.y() * b.y()};
}

/// Eigenvalue bounds of the admissible set K = {A symmetric : alpha I <= A <= beta I}.
struct Bounds {
  double alpha = 0.05;
  double beta = 10.0;

  void validate() const {
    if (!(alpha > 0.0) || !(beta > alpha))
      throw config_error("bounds: need 0 < alpha < beta");
  }
};

using TensorFunction = std::function<SymTensor2(const Vec2&)>;

enum class TensorLayout {
  dg1,       // discontinuous piecewise linear: 3 vertex values per triangle
  constant,  // piecewise constant: 1 value per triangle
};

/// Piecewise-polynomial symmetric tensor field (the unknown conductivity and
/// every direction/gradient in its space).
struct SymTensorField {
  std::shared_ptr<const Mesh> mesh;
  TensorLayout layout = TensorLayout::dg1;
  std::vector<SymTensor2> values;  // [triangle][local node]

  SymTensorField() = default;
  SymTensorField(std::shared_ptr<const Mesh> m, TensorLayout l)
      : mesh(std::move(m)), layout(l),
        values(static_cast<std::size_t>(mesh->triangle_count()) * (l == TensorLayout::dg1 ? 3 : 1)) {}

  int nodes_per_triangle() const { return layout == TensorLayout::dg1 ? 3 : 1; }
  int node_count() const { return static_cast<int>(values.size()); }

  SymTensor2& at(int tri, int node) { return values[tri * nodes_per_triangle() + node]; }
  const SymTensor2& at(int tri, int node) const { return values[tri * nodes_per_triangle() + node]; }

  /// Location of a local tensor dof: triangle vertex (dg1) or centroid (constant).
  Vec2 node_location(int tri, int node) const {
    return layout == TensorLayout::dg1 ? mesh->vertex(tri, node) : mesh->centroid(tri);
  }

  /// Value at a barycentric point of a triangle.
  SymTensor2 eval(int tri, const std::array<double, 3>& bary) const {
    if (layout == TensorLayout::constant) return at(tri, 0);
    return at(tri, 0) * bary[0] + at(tri, 1) * bary[1] + at(tri, 2) * bary[2];
  }
  SymTensor2 eval_at_point(const Vec2& p) const {
    const PointLocation loc = locate_point(*mesh, p);
    return eval(loc.triangle, loc.weights);
  }

  static SymTensorField constant_field(std::shared_ptr<const Mesh> m, TensorLayout l,
                                       const SymTensor2& value);
  /// Nodal interpolant of an analytic tensor function.
  static SymTensorField from_function(std::shared_ptr<const Mesh> m, TensorLayout l,
                                      const TensorFunction& f);
};

}  // namespace tct

#endif
