#include "tensorcit/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace tct {

void MeshConfig::validate() const {
  if (subdivisions < 1) throw config_error("mesh: subdivisions must be >= 1");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw config_error("mesh: domain must have positive width and height");
}

double Mesh::signed_area(int tri) const {
  const Vec2 a = vertex(tri, 0), b = vertex(tri, 1), c = vertex(tri, 2);
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

Vec2 Mesh::centroid(int tri) const {
  return (vertex(tri, 0) + vertex(tri, 1) + vertex(tri, 2)) / 3.0;
}

std::array<double, 3> Mesh::barycentric(int tri, const Vec2& p) const {
  const Vec2 a = vertex(tri, 0), b = vertex(tri, 1), c = vertex(tri, 2);
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  const double w1 = ((p.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (p.y() - a.y())) / det;
  const double w2 = ((b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y())) / det;
  return {1.0 - w1 - w2, w1, w2};
}

Vec2 Mesh::from_barycentric(int tri, const std::array<double, 3>& w) const {
  return w[0] * vertex(tri, 0) + w[1] * vertex(tri, 1) + w[2] * vertex(tri, 2);
}

Mesh build_uniform_mesh(const MeshConfig& config) {
  config.validate();
  const int n = config.subdivisions;
  const Domain& d = config.domain;
  const double hx = d.width() / n;
  const double hy = d.height() / n;

  Mesh mesh;
  mesh.config = config;
  mesh.nodes.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.nodes.emplace_back(d.x0 + i * hx, d.y0 + j * hy);

  auto node_id = [n](int i, int j) { return j * (n + 1) + i; };

  mesh.triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = node_id(i, j);
      const int b = node_id(i + 1, j);
      const int c = node_id(i + 1, j + 1);
      const int e = node_id(i, j + 1);
      mesh.triangles.push_back({a, b, c});  // below the diagonal a-c
      mesh.triangles.push_back({a, c, e});  // above the diagonal a-c
    }
  }

  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      if (i == 0 || i == n || j == 0 || j == n) mesh.boundary_nodes.push_back(node_id(i, j));

  auto cell_tri = [n](int i, int j, int which) { return 2 * (j * n + i) + which; };
  for (int i = 0; i < n; ++i) {  // bottom, top
    mesh.boundary_edges.push_back({node_id(i, 0), node_id(i + 1, 0), cell_tri(i, 0, 0)});
    mesh.boundary_edges.push_back({node_id(i + 1, n), node_id(i, n), cell_tri(i, n - 1, 1)});
  }
  for (int j = 0; j < n; ++j) {  // right, left
    mesh.boundary_edges.push_back({node_id(n, j), node_id(n, j + 1), cell_tri(n - 1, j, 0)});
    mesh.boundary_edges.push_back({node_id(0, j + 1), node_id(0, j), cell_tri(0, j, 1)});
  }
  return mesh;
}

PointLocation locate_point(const Mesh& mesh, const Vec2& p) {
  const Domain& d = mesh.config.domain;
  if (!d.contains(p))
    throw domain_error("locate_point: point (" + std::to_string(p.x()) + ", " +
                       std::to_string(p.y()) + ") lies outside the domain closure");

  const int n = mesh.config.subdivisions;
  const double hx = d.width() / n;
  const double hy = d.height() / n;
  const int ci = std::clamp(static_cast<int>(std::floor((p.x() - d.x0) / hx)), 0, n - 1);
  const int cj = std::clamp(static_cast<int>(std::floor((p.y() - d.y0) / hy)), 0, n - 1);

  // Collect candidate triangles from the cell and its lower-index neighbours so
  // that points on shared edges resolve to the lowest triangle index.
  std::vector<int> candidates;
  for (int j = std::max(0, cj - 1); j <= std::min(n - 1, cj + 1); ++j)
    for (int i = std::max(0, ci - 1); i <= std::min(n - 1, ci + 1); ++i) {
      candidates.push_back(2 * (j * n + i));
      candidates.push_back(2 * (j * n + i) + 1);
    }
  std::sort(candidates.begin(), candidates.end());

  const double tol = 1e-13;
  for (int tri : candidates) {
    auto w = mesh.barycentric(tri, p);
    if (w[0] >= -tol && w[1] >= -tol && w[2] >= -tol) {
      for (double& x : w) x = std::clamp(x, 0.0, 1.0);
      const double s = w[0] + w[1] + w[2];
      for (double& x : w) x /= s;
      return {tri, w};
    }
  }
  throw domain_error("locate_point: no containing triangle found (degenerate query)");
}

const TriangleRule& triangle_rule(int degree) {
  // Midpoint rule.
  static const TriangleRule rule1{
      1, {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {0.5}};
  // Symmetric interior three-point rule.
  static const TriangleRule rule2{
      2,
      {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
       {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
       {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}},
      {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0}};
  // Six-point rule (Cowper), exact to degree 4; used for degree 3 requests as
  // well since the classical four-point degree-3 rule has a negative weight.
  static const TriangleRule rule4 = [] {
    const double a1 = 0.816847572980459, b1 = 0.091576213509771, w1 = 0.109951743655322 / 2.0;
    const double a2 = 0.108103018168070, b2 = 0.445948490915965, w2 = 0.223381589678011 / 2.0;
    TriangleRule r;
    r.exact_degree = 4;
    r.points = {{a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
    r.weights = {w1, w1, w1, w2, w2, w2};
    return r;
  }();

  switch (degree) {
    case 1: return rule1;
    case 2: return rule2;
    case 3:
    case 4: return rule4;
    default:
      throw argument_error("triangle_rule: unsupported quadrature degree " +
                           std::to_string(degree) + " (supported: 1..4)");
  }
}

std::vector<std::vector<QuadraturePoint>> quadrature_points(const Mesh& mesh, int degree) {
  const TriangleRule& rule = triangle_rule(degree);
  std::vector<std::vector<QuadraturePoint>> out(mesh.triangle_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const double area = mesh.area(t);
    out[t].reserve(rule.size());
    for (int q = 0; q < rule.size(); ++q) {
      const auto& w = rule.points[q];
      out[t].push_back({mesh.from_barycentric(t, w), rule.weights[q] * 2.0 * area});
    }
  }
  return out;
}

}  // namespace tct
