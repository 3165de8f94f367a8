#include "tensorcit/spd_projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tct {

EigenDecomposition2 eig_sym2(const SymTensor2& t) {
  const double mean = 0.5 * (t.a11 + t.a22);
  const double half_diff = 0.5 * (t.a11 - t.a22);
  const double radius = std::hypot(half_diff, t.a12);
  EigenDecomposition2 e;
  e.lambda_max = mean + radius;
  e.lambda_min = mean - radius;
  e.theta = 2.0 * radius < 1e-14 ? 0.0 : 0.5 * std::atan2(2.0 * t.a12, t.a11 - t.a22);
  return e;
}

double bounds_slack(const Bounds& bounds) {
  return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, bounds.beta);
}

bool in_bounds(const SymTensor2& t, const Bounds& bounds) {
  const EigenDecomposition2 e = eig_sym2(t);
  const double slack = bounds_slack(bounds);
  return e.lambda_min >= bounds.alpha - slack && e.lambda_max <= bounds.beta + slack;
}

SymTensor2 project_K(const SymTensor2& t, const Bounds& bounds) {
  if (in_bounds(t, bounds)) return t;
  const EigenDecomposition2 e = eig_sym2(t);
  const double l1 = std::clamp(e.lambda_max, bounds.alpha, bounds.beta);
  const double l2 = std::clamp(e.lambda_min, bounds.alpha, bounds.beta);
  const double c = std::cos(e.theta), s = std::sin(e.theta);
  return {c * c * l1 + s * s * l2, c * s * (l1 - l2), s * s * l1 + c * c * l2};
}

SymTensorField project_field(const SymTensorField& field, const Bounds& bounds) {
  SymTensorField out = field;
  for (auto& v : out.values) v = project_K(v, bounds);
  return out;
}

EigenRange eigenvalue_range(const SymTensorField& field) {
  EigenRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& v : field.values) {
    const EigenDecomposition2 e = eig_sym2(v);
    r.min = std::min(r.min, e.lambda_min);
    r.max = std::max(r.max, e.lambda_max);
  }
  return r;
}

}  // namespace tct
