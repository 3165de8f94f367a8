#include "tensorcit/fe_space.hpp"

#include <cmath>

namespace tct {

namespace {

// Local node barycentric coordinates: vertices first, then edge midpoints
// (0-1, 1-2, 2-0) for degree 2.
const std::array<std::array<double, 3>, 3> kNodesP1 = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
const std::array<std::array<double, 3>, 6> kNodesP2 = {
    {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}}};

void eval_basis(int degree, const std::array<double, 3>& L, double* v) {
  if (degree == 1) {
    v[0] = L[0];
    v[1] = L[1];
    v[2] = L[2];
  } else {
    v[0] = L[0] * (2 * L[0] - 1);
    v[1] = L[1] * (2 * L[1] - 1);
    v[2] = L[2] * (2 * L[2] - 1);
    v[3] = 4 * L[0] * L[1];
    v[4] = 4 * L[1] * L[2];
    v[5] = 4 * L[2] * L[0];
  }
}

// Derivatives with respect to the three barycentric coordinates; d has
// local_dof_count() rows of 3.
void eval_dbasis(int degree, const std::array<double, 3>& L, double* d) {
  if (degree == 1) {
    const double id3[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    std::copy(id3, id3 + 9, d);
  } else {
    auto row = [d](int i) { return d + 3 * i; };
    for (int i = 0; i < 18; ++i) d[i] = 0.0;
    for (int i = 0; i < 3; ++i) row(i)[i] = 4 * L[i] - 1;
    row(3)[0] = 4 * L[1]; row(3)[1] = 4 * L[0];
    row(4)[1] = 4 * L[2]; row(4)[2] = 4 * L[1];
    row(5)[2] = 4 * L[0]; row(5)[0] = 4 * L[2];
  }
}

}  // namespace

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  if (degree_ != 1 && degree_ != 2)
    throw config_error("fe_space: state degree must be 1 or 2, got " + std::to_string(degree_));
  quad_degree_ = std::max(2, 2 * degree_);

  const int n = mesh_->config.subdivisions;
  const Domain& dom = mesh_->config.domain;
  const int refined = degree_ * n;
  const double hx = dom.width() / refined;
  const double hy = dom.height() / refined;

  dof_coords_.reserve((refined + 1) * (refined + 1));
  for (int j = 0; j <= refined; ++j)
    for (int i = 0; i <= refined; ++i)
      dof_coords_.emplace_back(dom.x0 + i * hx, dom.y0 + j * hy);

  const int nloc = local_dof_count();
  dof_map_.resize(mesh_->triangle_count() * nloc);
  for (int t = 0; t < mesh_->triangle_count(); ++t) {
    for (int k = 0; k < nloc; ++k) {
      const auto& L = degree_ == 1 ? kNodesP1[k] : kNodesP2[k];
      const Vec2 p = mesh_->from_barycentric(t, L);
      const int i = static_cast<int>(std::lround((p.x() - dom.x0) / hx));
      const int j = static_cast<int>(std::lround((p.y() - dom.y0) / hy));
      dof_map_[t * nloc + k] = j * (refined + 1) + i;
    }
  }

  interior_index_.assign(dof_count(), -1);
  for (int j = 0; j <= refined; ++j)
    for (int i = 0; i <= refined; ++i) {
      const int dof = j * (refined + 1) + i;
      if (i == 0 || i == refined || j == 0 || j == refined) {
        boundary_dofs_.push_back(dof);
      } else {
        interior_index_[dof] = interior_count_++;
        interior_dofs_.push_back(dof);
      }
    }

  quad_points_ = quadrature_points(*mesh_, quad_degree_);
  const TriangleRule& r = triangle_rule(quad_degree_);
  basis_at_quad_.resize(r.size() * nloc);
  dbasis_at_quad_.resize(r.size() * nloc * 3);
  for (int q = 0; q < r.size(); ++q) {
    eval_basis(degree_, r.points[q], basis_at_quad_.data() + q * nloc);
    eval_dbasis(degree_, r.points[q], dbasis_at_quad_.data() + q * nloc * 3);
  }

  barycentric_gradients_.resize(mesh_->triangle_count() * 3);
  for (int t = 0; t < mesh_->triangle_count(); ++t) {
    const Vec2 a = mesh_->vertex(t, 0), b = mesh_->vertex(t, 1), c = mesh_->vertex(t, 2);
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    const Vec2 g1((c.y() - a.y()) / det, (a.x() - c.x()) / det);
    const Vec2 g2((a.y() - b.y()) / det, (b.x() - a.x()) / det);
    barycentric_gradients_[t * 3 + 0] = -g1 - g2;
    barycentric_gradients_[t * 3 + 1] = g1;
    barycentric_gradients_[t * 3 + 2] = g2;
  }
}

QuadLayout FeSpace::quad_layout() const {
  return {mesh_->triangle_count(), rule().size(), quad_degree_};
}

void FeSpace::basis_values(const std::array<double, 3>& bary, double* values) const {
  eval_basis(degree_, bary, values);
}

void FeSpace::basis_gradients(int tri, const std::array<double, 3>& bary, Vec2* grads) const {
  const int nloc = local_dof_count();
  double d[18];
  eval_dbasis(degree_, bary, d);
  const Vec2* gl = barycentric_gradients_.data() + tri * 3;
  for (int k = 0; k < nloc; ++k)
    grads[k] = d[3 * k] * gl[0] + d[3 * k + 1] * gl[1] + d[3 * k + 2] * gl[2];
}

void FeSpace::basis_gradients_at_quad(int tri, int q, Vec2* grads) const {
  const int nloc = local_dof_count();
  const double* d = dbasis_at_quad_.data() + q * nloc * 3;
  const Vec2* gl = barycentric_gradients_.data() + tri * 3;
  for (int k = 0; k < nloc; ++k)
    grads[k] = d[3 * k] * gl[0] + d[3 * k + 1] * gl[1] + d[3 * k + 2] * gl[2];
}

double ScalarField::value_at(int tri, const std::array<double, 3>& bary) const {
  const int nloc = space->local_dof_count();
  double v[6];
  space->basis_values(bary, v);
  double out = 0.0;
  for (int k = 0; k < nloc; ++k) out += v[k] * coeffs[space->global_dof(tri, k)];
  return out;
}

Vec2 ScalarField::gradient_at(int tri, const std::array<double, 3>& bary) const {
  const int nloc = space->local_dof_count();
  Vec2 g[6];
  space->basis_gradients(tri, bary, g);
  Vec2 out = Vec2::Zero();
  for (int k = 0; k < nloc; ++k) out += g[k] * coeffs[space->global_dof(tri, k)];
  return out;
}

double ScalarField::value_at_point(const Vec2& p) const {
  const PointLocation loc = locate_point(space->mesh(), p);
  return value_at(loc.triangle, loc.weights);
}

Vec2 ScalarField::gradient_at_point(const Vec2& p) const {
  const PointLocation loc = locate_point(space->mesh(), p);
  return gradient_at(loc.triangle, loc.weights);
}

ScalarField interpolate(std::shared_ptr<const FeSpace> space, const ScalarFunction& f) {
  ScalarField field(space);
  for (int i = 0; i < space->dof_count(); ++i) field.coeffs[i] = f(space->dof_coord(i));
  return field;
}

ScalarField set_dirichlet(const ScalarField& field, const ScalarFunction& g) {
  ScalarField out = field;
  for (int dof : field.space->boundary_dofs()) out.coeffs[dof] = g(field.space->dof_coord(dof));
  return out;
}

QuadVectorField gradient_at_quadrature(const ScalarField& field) {
  const FeSpace& sp = *field.space;
  QuadVectorField out;
  out.layout = sp.quad_layout();
  out.values.resize(out.layout.total_points());
  const int nloc = sp.local_dof_count();
  Vec2 grads[6];
  for (int t = 0; t < out.layout.triangle_count; ++t) {
    for (int q = 0; q < out.layout.points_per_triangle; ++q) {
      sp.basis_gradients_at_quad(t, q, grads);
      Vec2 g = Vec2::Zero();
      for (int k = 0; k < nloc; ++k) g += grads[k] * field.coeffs[sp.global_dof(t, k)];
      out.at(t, q) = g;
    }
  }
  return out;
}

double scalar_l2_norm(const ScalarField& field) {
  const FeSpace& sp = *field.space;
  const TriangleRule& rule = sp.rule();
  double acc = 0.0;
  for (int t = 0; t < sp.mesh().triangle_count(); ++t) {
    const auto& qps = sp.quad_points(t);
    for (int q = 0; q < rule.size(); ++q) {
      const double v = field.value_at(t, rule.points[q]);
      acc += qps[q].weight * v * v;
    }
  }
  return std::sqrt(acc);
}

double h1_error(const ScalarField& field, const ScalarFunction& value,
                const std::function<Vec2(const Vec2&)>& gradient) {
  const FeSpace& sp = *field.space;
  const TriangleRule& rule = triangle_rule(4);
  const auto qps = quadrature_points(sp.mesh(), 4);
  double acc = 0.0;
  for (int t = 0; t < sp.mesh().triangle_count(); ++t) {
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = qps[t][q].point;
      const double dv = field.value_at(t, rule.points[q]) - value(x);
      const Vec2 dg = field.gradient_at(t, rule.points[q]) - gradient(x);
      acc += qps[t][q].weight * (dv * dv + dg.squaredNorm());
    }
  }
  return std::sqrt(acc);
}

}  // namespace tct
