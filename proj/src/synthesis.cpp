#include "tensorcit/synthesis.hpp"

#include <cmath>

#include "tensorcit/assembly.hpp"
#include "tensorcit/util.hpp"

namespace tct {

namespace {

constexpr double kPi = 3.14159265358979323846;

double xi(const Vec2& x) { return 2.0 + std::sin(kPi * x.x()) * std::sin(kPi * x.y()); }
double zeta(const Vec2& x) { return 0.5 * std::sin(2.0 * kPi * x.x()); }

// Piecewise scaling of the discontinuous case; closed regions, first match wins.
double region_scale(const Vec2& x) {
  auto inside = [&x](double x0, double x1, double y0, double y1) {
    return x.x() >= x0 && x.x() <= x1 && x.y() >= y0 && x.y() <= y1;
  };
  if (inside(-0.4, 0.6, -0.4, 0.6)) return 1.5;
  if (inside(-1.0, -0.7, -0.4, 0.1)) return 0.5;
  if (inside(0.7, 1.0, -0.8, -0.3)) return 2.0;
  return 1.0;
}

}  // namespace

TestCase parse_test_case(const std::string& name) {
  for (int i = 1; i <= 7; ++i)
    if (name == "example" + std::to_string(i)) return static_cast<TestCase>(i - 1);
  throw config_error("unknown test case '" + name + "' (expected example1..example7)");
}

std::string to_string(TestCase c) { return "example" + std::to_string(static_cast<int>(c) + 1); }

SymTensor2 exact_tensor(TestCase c, const Vec2& x) {
  if (x.x() < -1.0 || x.x() > 1.0 || x.y() < -1.0 || x.y() > 1.0)
    throw domain_error("exact_tensor: point outside closure of (-1,1)^2");
  const double r2 = 1.0 + x.x() * x.x() + x.y() * x.y();
  switch (c) {
    case TestCase::example1:
      return SymTensor2::identity();
    case TestCase::example2:
      return SymTensor2::diag(r2, r2);
    case TestCase::example3:
      return SymTensor2::diag(xi(x), 1.0 + zeta(x) * zeta(x));
    case TestCase::example4:
      return {xi(x), zeta(x), r2};
    case TestCase::example5:
      return SymTensor2::diag(1.0 + std::abs(x.x()) + std::abs(x.y()),
                              2.0 + std::abs(std::sin(kPi * x.x()) * std::sin(kPi * x.y())));
    case TestCase::example6:
      return {1.0 + std::abs(x.x()) + std::abs(x.y()), std::abs(x.x() * x.y()),
              2.0 + std::abs(std::sin(kPi * x.x()) * std::sin(kPi * x.y()))};
    case TestCase::example7: {
      const double l = region_scale(x);
      return SymTensor2::diag(l * xi(x), l * (1.0 + zeta(x) * zeta(x)));
    }
  }
  throw argument_error("exact_tensor: invalid case");
}

TensorFunction exact_tensor_function(TestCase c) {
  return [c](const Vec2& x) { return exact_tensor(c, x); };
}

std::vector<LoadCase> boundary_data_set(int count) {
  if (count != 3 && count != 5 && count != 9)
    throw config_error("boundary_data_set: load count must be 3, 5 or 9, got " +
                       std::to_string(count));
  std::vector<LoadCase> all = {
      {nullptr, [](const Vec2& x) { return x.x() + x.y(); }, "g1"},
      {nullptr, [](const Vec2& x) { return x.y() + 0.5 * x.x() * x.x(); }, "g2"},
      {nullptr, [](const Vec2& x) { return x.x() - 0.1 * x.y() * x.y(); }, "g3"},
      {nullptr, [](const Vec2& x) { return 0.1 * (std::cos(10.0 * x.y()) - std::cos(10.0 * x.x())); }, "g4"},
      {nullptr, [](const Vec2& x) { return x.x() * x.y(); }, "g5"},
      {nullptr, [](const Vec2& x) { return 0.1 * std::sin(10.0 * x.x()); }, "g6"},
      {nullptr, [](const Vec2& x) { return x.x() * x.x() + x.y() * x.y(); }, "g7"},
      {nullptr, [](const Vec2& x) { return x.x() - 0.5 * x.x() * x.x(); }, "g8"},
      {nullptr, [](const Vec2& x) { return 0.1 * std::exp(x.x()); }, "g9"},
  };
  all.resize(count);
  return all;
}

MeasurementSet generate_exact_data(TestCase c, const std::vector<LoadCase>& loads,
                                   int fine_factor, const FeSpace& target, int degree,
                                   LinearSolver solver, int threads) {
  if (fine_factor < 2)
    throw config_error("generate_exact_data: fine_factor must be >= 2");
  (void)threads;

  MeshConfig fine_config = target.mesh().config;
  fine_config.subdivisions *= fine_factor;
  auto fine_mesh = std::make_shared<const Mesh>(build_uniform_mesh(fine_config));
  auto fine_space = std::make_shared<const FeSpace>(fine_mesh, degree);

  const TensorFunction truth = exact_tensor_function(c);
  const DirichletOperator op(fine_space, assemble_stiffness(*fine_space, truth), solver);

  // Locations of every target quadrature point on the fine mesh, shared by loads.
  const QuadLayout layout = target.quad_layout();
  std::vector<PointLocation> where(layout.total_points());
  std::vector<Vec2> points(layout.total_points());
  for (int t = 0; t < layout.triangle_count; ++t)
    for (int q = 0; q < layout.points_per_triangle; ++q) {
      const Vec2 x = target.quad_points(t)[q].point;
      points[t * layout.points_per_triangle + q] = x;
      where[t * layout.points_per_triangle + q] = locate_point(*fine_mesh, x);
    }

  MeasurementSet set;
  set.test_case = c;
  for (const LoadCase& load : loads) {
    const Eigen::VectorXd f = load.source ? assemble_source_load(*fine_space, load.source)
                                          : Eigen::VectorXd::Zero(fine_space->dof_count());
    const ScalarField u = op.solve(f, set_dirichlet(ScalarField(fine_space), load.dirichlet));

    CurrentDensity h;
    h.layout = layout;
    h.values.resize(layout.total_points());
    for (std::size_t i = 0; i < h.values.size(); ++i)
      h.values[i] = truth(points[i]).apply(u.gradient_at(where[i].triangle, where[i].weights));
    set.load_labels.push_back(load.label);
    set.exact.push_back(h);
    set.noisy.push_back(std::move(h));
    set.noise_norm_sq.push_back(0.0);
  }
  return set;
}

MeasurementSet add_noise(const MeasurementSet& data, const NoiseOptions& options,
                         const FeSpace& target) {
  if (options.delta_rel < 0.0) throw config_error("add_noise: delta_rel must be >= 0");

  MeasurementSet out = data;
  out.delta_rel = options.delta_rel;
  out.seed = options.seed;

  CounterRng rng(options.seed);
  for (int l = 0; l < data.load_count(); ++l) {
    if (options.shared_realization) rng.set_counter(0);
    const CurrentDensity& exact = data.exact[l];
    CurrentDensity noisy = exact;
    for (auto& v : noisy.values) {
      if (options.scalar_per_point) {
        const double factor = 1.0 + options.delta_rel * rng.next_symmetric();
        v *= factor;
      } else {
        v.x() *= 1.0 + options.delta_rel * rng.next_symmetric();
        v.y() *= 1.0 + options.delta_rel * rng.next_symmetric();
      }
    }

    double norm_sq = 0.0;
    for (int t = 0; t < exact.layout.triangle_count; ++t) {
      const auto& qps = target.quad_points(t);
      for (int q = 0; q < exact.layout.points_per_triangle; ++q)
        norm_sq += qps[q].weight * (noisy.at(t, q) - exact.at(t, q)).squaredNorm();
    }
    out.noisy[l] = std::move(noisy);
    out.noise_norm_sq[l] = norm_sq;
  }
  return out;
}

}  // namespace tct
