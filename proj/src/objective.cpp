#include "tensorcit/objective.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace tct {

namespace {

constexpr int kNormRuleDegree = 4;

void check_layouts(const SymTensorField& tensor, const std::vector<ScalarField>& states,
                   const std::vector<CurrentDensity>& data) {
  if (states.size() != data.size())
    throw layout_error("objective: state and data counts differ");
  for (const auto& s : states)
    if (&s.space->mesh() != tensor.mesh.get())
      throw layout_error("objective: state mesh does not match the tensor mesh");
  for (std::size_t l = 0; l < data.size(); ++l)
    if (!(data[l].layout == states[l].space->quad_layout()))
      throw layout_error("objective: data layout does not match the state quadrature");
}

}  // namespace

double tensor_l2_norm_sq(const SymTensorField& tensor) {
  const TriangleRule& rule = triangle_rule(kNormRuleDegree);
  double acc = 0.0;
  for (int t = 0; t < tensor.mesh->triangle_count(); ++t) {
    const double area2 = 2.0 * tensor.mesh->area(t);
    for (int q = 0; q < rule.size(); ++q) {
      const SymTensor2 a = tensor.eval(t, rule.points[q]);
      acc += rule.weights[q] * area2 * a.frobenius_norm_sq();
    }
  }
  return acc;
}

double tensor_l2_distance(const SymTensorField& a, const SymTensorField& b) {
  if (a.layout != b.layout || a.mesh.get() != b.mesh.get())
    throw layout_error("tensor_l2_distance: fields have different layouts");
  SymTensorField diff = a;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] = a.values[i] - b.values[i];
  return std::sqrt(tensor_l2_norm_sq(diff));
}

double data_residual(const SymTensorField& tensor, const std::vector<ScalarField>& states,
                     const std::vector<CurrentDensity>& data) {
  check_layouts(tensor, states, data);
  double acc = 0.0;
  for (std::size_t l = 0; l < states.size(); ++l) {
    const FeSpace& sp = *states[l].space;
    const TriangleRule& rule = sp.rule();
    const QuadVectorField grad = gradient_at_quadrature(states[l]);
    for (int t = 0; t < sp.mesh().triangle_count(); ++t) {
      const auto& qps = sp.quad_points(t);
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 r = tensor.eval(t, rule.points[q]).apply(grad.at(t, q)) - data[l].at(t, q);
        acc += qps[q].weight * r.squaredNorm();
      }
    }
  }
  return acc;
}

ObjectiveValue eval_objective(const SymTensorField& tensor,
                              const std::vector<ScalarField>& states,
                              const std::vector<CurrentDensity>& data, double gamma) {
  ObjectiveValue v;
  v.gamma = gamma;
  v.fidelity = 0.5 * data_residual(tensor, states, data);
  v.penalty = 0.5 * gamma * tensor_l2_norm_sq(tensor);
  v.total = v.fidelity + v.penalty;
  return v;
}

SymTensorField eval_gradient(const SymTensorField& tensor,
                             const std::vector<ScalarField>& states,
                             const std::vector<ScalarField>& adjoints,
                             const std::vector<CurrentDensity>& data, double gamma) {
  check_layouts(tensor, states, data);
  if (adjoints.size() != states.size())
    throw layout_error("eval_gradient: adjoint and state counts differ");

  const FeSpace& sp = *states[0].space;
  const TriangleRule& rule = sp.rule();
  const int nq = rule.size();
  const int nodes = tensor.nodes_per_triangle();

  // Per-triangle least-squares fit of the quadrature-point integrand onto the
  // local tensor polynomial space. For dg1 the local basis is the barycentric
  // coordinate triple, so the normal matrix is shared by all triangles after
  // scaling by the area.
  Eigen::MatrixXd basis(nq, nodes);
  for (int q = 0; q < nq; ++q) {
    if (nodes == 1)
      basis(q, 0) = 1.0;
    else
      for (int k = 0; k < 3; ++k) basis(q, k) = rule.points[q][k];
  }
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int q = 0; q < nq; ++q)
    normal += 2.0 * rule.weights[q] * basis.row(q).transpose() * basis.row(q);
  const Eigen::MatrixXd normal_inv = normal.inverse();

  std::vector<QuadVectorField> grads_u, grads_p;
  grads_u.reserve(states.size());
  grads_p.reserve(states.size());
  for (std::size_t l = 0; l < states.size(); ++l) {
    grads_u.push_back(gradient_at_quadrature(states[l]));
    grads_p.push_back(gradient_at_quadrature(adjoints[l]));
  }

  SymTensorField out(tensor.mesh, tensor.layout);
  Eigen::MatrixXd rhs(nodes, 3);
  for (int t = 0; t < tensor.mesh->triangle_count(); ++t) {
    rhs.setZero();
    for (int q = 0; q < nq; ++q) {
      SymTensor2 bracket{};
      for (std::size_t l = 0; l < states.size(); ++l) {
        const Vec2 gu = grads_u[l].at(t, q);
        const Vec2 residual = tensor.eval(t, rule.points[q]).apply(gu) - data[l].at(t, q);
        bracket = bracket + sym_outer(gu, residual) + sym_outer(gu, grads_p[l].at(t, q));
      }
      const double w = 2.0 * rule.weights[q];
      for (int k = 0; k < nodes; ++k) {
        rhs(k, 0) += w * basis(q, k) * bracket.a11;
        rhs(k, 1) += w * basis(q, k) * bracket.a12;
        rhs(k, 2) += w * basis(q, k) * bracket.a22;
      }
    }
    const Eigen::MatrixXd coeff = normal_inv * rhs;
    for (int k = 0; k < nodes; ++k)
      out.at(t, k) = SymTensor2{coeff(k, 0), coeff(k, 1), coeff(k, 2)} + gamma * tensor.at(t, k);
  }
  return out;
}

double directional_derivative(const SymTensorField& gradient, const SymTensorField& direction) {
  if (gradient.layout != direction.layout || gradient.mesh.get() != direction.mesh.get())
    throw layout_error("directional_derivative: layout mismatch");
  const TriangleRule& rule = triangle_rule(kNormRuleDegree);
  double acc = 0.0;
  for (int t = 0; t < gradient.mesh->triangle_count(); ++t) {
    const double area2 = 2.0 * gradient.mesh->area(t);
    for (int q = 0; q < rule.size(); ++q)
      acc += rule.weights[q] * area2 *
             gradient.eval(t, rule.points[q]).dot(direction.eval(t, rule.points[q]));
  }
  return acc;
}

double relative_error(const SymTensorField& tensor, const TensorFunction& reference) {
  const TriangleRule& rule = triangle_rule(kNormRuleDegree);
  const auto qps = quadrature_points(*tensor.mesh, kNormRuleDegree);
  double num = 0.0, den = 0.0;
  for (int t = 0; t < tensor.mesh->triangle_count(); ++t) {
    for (int q = 0; q < rule.size(); ++q) {
      const SymTensor2 ref = reference(qps[t][q].point);
      const SymTensor2 diff = tensor.eval(t, rule.points[q]) - ref;
      num += qps[t][q].weight * diff.frobenius_norm_sq();
      den += qps[t][q].weight * ref.frobenius_norm_sq();
    }
  }
  if (!(den > 0.0)) throw argument_error("relative_error: reference tensor is identically zero");
  return std::sqrt(num / den);
}

double relative_error(const SymTensorField& tensor, const SymTensorField& reference) {
  const double den = std::sqrt(tensor_l2_norm_sq(reference));
  if (!(den > 0.0)) throw argument_error("relative_error: reference tensor is identically zero");
  return tensor_l2_distance(tensor, reference) / den;
}

std::array<double, 3> component_l2_errors(const SymTensorField& tensor,
                                          const TensorFunction& reference) {
  const TriangleRule& rule = triangle_rule(kNormRuleDegree);
  const auto qps = quadrature_points(*tensor.mesh, kNormRuleDegree);
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  for (int t = 0; t < tensor.mesh->triangle_count(); ++t) {
    for (int q = 0; q < rule.size(); ++q) {
      const SymTensor2 diff = tensor.eval(t, rule.points[q]) - reference(qps[t][q].point);
      acc[0] += qps[t][q].weight * diff.a11 * diff.a11;
      acc[1] += qps[t][q].weight * diff.a12 * diff.a12;
      acc[2] += qps[t][q].weight * diff.a22 * diff.a22;
    }
  }
  return {std::sqrt(acc[0]), std::sqrt(acc[1]), std::sqrt(acc[2])};
}

}  // namespace tct
