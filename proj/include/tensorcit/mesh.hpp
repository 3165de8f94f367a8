#ifndef TENSORCIT_MESH_HPP
#define TENSORCIT_MESH_HPP

#include <array>
#include <memory>
#include <vector>

#include "tensorcit/util.hpp"

namespace tct {

/// Axis-aligned rectangular domain.
struct Domain {
  double x0 = -1.0, y0 = -1.0;
  double x1 = 1.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Vec2& p) const {
    return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1;
  }
};

struct MeshConfig {
  int subdivisions = 20;  // N; mesh size h = width/N
  Domain domain{};

  void validate() const;
};

struct BoundaryEdge {
  int node_a;
  int node_b;
  int triangle;  // owning triangle index
};

/// Uniform conforming triangulation of a rectangle. Each grid cell is split
/// along its lower-left to upper-right diagonal; triangles are counterclockwise.
/// Immutable after construction and safe to share across threads.
struct Mesh {
  MeshConfig config;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary_nodes;
  std::vector<BoundaryEdge> boundary_edges;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }

  Vec2 vertex(int tri, int local) const { return nodes[triangles[tri][local]]; }
  double signed_area(int tri) const;
  double area(int tri) const { return signed_area(tri); }
  Vec2 centroid(int tri) const;

  /// Barycentric coordinates of p with respect to triangle tri.
  std::array<double, 3> barycentric(int tri, const Vec2& p) const;
  Vec2 from_barycentric(int tri, const std::array<double, 3>& w) const;
};

Mesh build_uniform_mesh(const MeshConfig& config);

struct PointLocation {
  int triangle;
  std::array<double, 3> weights;  // barycentric, in [0,1], summing to 1
};

/// Find a triangle whose closure contains p. Points on shared edges resolve to
/// the lowest triangle index. Throws a domain error for p outside closure(domain).
PointLocation locate_point(const Mesh& mesh, const Vec2& p);

/// Quadrature rule on the reference triangle {(0,0),(1,0),(0,1)}.
/// Reference weights sum to 1/2 (the reference area).
struct TriangleRule {
  int exact_degree;
  std::vector<std::array<double, 3>> points;  // barycentric
  std::vector<double> weights;                // reference weights

  int size() const { return static_cast<int>(points.size()); }
};

/// Rule that integrates polynomials of the given total degree exactly.
/// Supported degrees: 1..4 (all rules have positive weights).
const TriangleRule& triangle_rule(int degree);

struct QuadraturePoint {
  Vec2 point;
  double weight;
};

/// Per-triangle physical quadrature points; weights sum to the triangle area.
std::vector<std::vector<QuadraturePoint>> quadrature_points(const Mesh& mesh, int degree);

}  // namespace tct

#endif
