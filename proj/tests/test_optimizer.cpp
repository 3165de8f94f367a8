#include <doctest.h>

#include <cmath>

#include "tensorcit/optimizer.hpp"
#include "tensorcit/synthesis.hpp"
#include "tensorcit/util.hpp"

using namespace tct;

namespace {

std::shared_ptr<const FeSpace> space_on(int n, int degree) {
  auto mesh = std::make_shared<const Mesh>(build_uniform_mesh(MeshConfig{n, Domain{}}));
  return std::make_shared<const FeSpace>(mesh, degree);
}

SymTensorField random_admissible(std::shared_ptr<const Mesh> mesh, CounterRng& rng,
                                 double lo = 0.8, double hi = 2.5) {
  SymTensorField f(std::move(mesh), TensorLayout::dg1);
  for (auto& v : f.values) {
    const double theta = rng.next_in(0.0, 3.14159);
    const double l1 = rng.next_in(lo, hi), l2 = rng.next_in(lo, hi);
    const double c = std::cos(theta), s = std::sin(theta);
    v = {c * c * l1 + s * s * l2, c * s * (l1 - l2), s * s * l1 + c * c * l2};
  }
  return f;
}

// Inverse-crime data: current densities of the forward solve on the same mesh.
std::vector<CurrentDensity> same_mesh_data(const SymTensorField& a,
                                           const std::vector<LoadCase>& loads,
                                           std::shared_ptr<const FeSpace> sp,
                                           std::vector<ScalarField>* states_out = nullptr) {
  std::vector<CurrentDensity> data;
  for (const auto& load : loads) {
    ScalarField u = solve_forward(a, load, sp);
    data.push_back(current_density(a, u));
    if (states_out) states_out->push_back(std::move(u));
  }
  return data;
}

// Pack/unpack helpers for the dense finite-difference Jacobian.
struct Packed {
  NewtonState state;
  const FeSpace* sp;

  int state_size() const { return sp->interior_count(); }
  int total() const {
    return 2 * static_cast<int>(state.states.size()) * state_size() +
           3 * static_cast<int>(state.tensor.values.size());
  }

  void set(int index, double value) {
    const int L = static_cast<int>(state.states.size());
    const int n0 = state_size();
    if (index < L * n0) {
      state.states[index / n0].coeffs[sp->interior_to_dof(index % n0)] = value;
    } else if (index < 2 * L * n0) {
      const int k = index - L * n0;
      state.adjoints[k / n0].coeffs[sp->interior_to_dof(k % n0)] = value;
    } else {
      const int k = index - 2 * L * n0;
      SymTensor2& t = state.tensor.values[k / 3];
      if (k % 3 == 0) t.a11 = value;
      else if (k % 3 == 1) t.a12 = value;
      else t.a22 = value;
    }
  }

  double get(int index) const {
    const int L = static_cast<int>(state.states.size());
    const int n0 = state_size();
    if (index < L * n0) return state.states[index / n0].coeffs[sp->interior_to_dof(index % n0)];
    if (index < 2 * L * n0) {
      const int k = index - L * n0;
      return state.adjoints[k / n0].coeffs[sp->interior_to_dof(k % n0)];
    }
    const int k = index - 2 * L * n0;
    const SymTensor2& t = state.tensor.values[k / 3];
    return k % 3 == 0 ? t.a11 : (k % 3 == 1 ? t.a12 : t.a22);
  }
};

}  // namespace

TEST_CASE("stopping metric") {
  auto sp = space_on(3, 1);
  const auto eye =
      SymTensorField::constant_field(sp->mesh_ptr(), TensorLayout::dg1, SymTensor2::identity());

  NewtonState prev{eye, {interpolate(sp, [](const Vec2& x) { return x.x(); })},
                   {interpolate(sp, [](const Vec2& x) { return x.y(); })}};

  SUBCASE("identical states give zero") {
    const StoppingMetric m = stopping_metric(prev, prev);
    CHECK(m.value == 0.0);
    CHECK(!m.degenerate);
  }

  SUBCASE("doubling the tensor gives one half") {
    NewtonState next = prev;
    next.tensor = SymTensorField::constant_field(sp->mesh_ptr(), TensorLayout::dg1,
                                                 SymTensor2::diag(2.0, 2.0));
    const StoppingMetric m = stopping_metric(prev, next);
    CHECK(m.value == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("vanishing adjoint denominator is skipped and flagged") {
    NewtonState next = prev;
    next.adjoints[0].coeffs.setZero();
    const StoppingMetric m = stopping_metric(prev, next);
    CHECK(m.degenerate);
    CHECK(m.value == 0.0);  // tensor and state unchanged, adjoint term skipped
  }
}

TEST_CASE("newton system at the exact solution with exact data") {
  CounterRng rng(61);
  auto sp = space_on(2, 1);
  const SymTensorField truth = random_admissible(sp->mesh_ptr(), rng);
  const std::vector<LoadCase> loads = boundary_data_set(3);
  std::vector<ScalarField> states;
  const std::vector<CurrentDensity> data = same_mesh_data(truth, loads, sp, &states);

  NewtonState state{truth, states, {}};
  for (std::size_t l = 0; l < loads.size(); ++l)
    state.adjoints.push_back(solve_adjoint(truth, states[l], data[l], sp));

  NewtonAssembler assembler(sp, TensorLayout::dg1, static_cast<int>(loads.size()));
  const NewtonIncrement inc = newton_step(assembler, state, loads, data, 0.0);

  double max_abs = 0.0;
  for (const auto& v : inc.tensor.values)
    max_abs = std::max({max_abs, std::abs(v.a11), std::abs(v.a12), std::abs(v.a22)});
  for (const auto& du : inc.states) max_abs = std::max(max_abs, du.lpNorm<Eigen::Infinity>());
  for (const auto& dp : inc.adjoints) max_abs = std::max(max_abs, dp.lpNorm<Eigen::Infinity>());
  CHECK(max_abs <= 1e-10);
}

TEST_CASE("newton matrix matches a dense finite-difference jacobian") {
  CounterRng rng(67);
  auto sp = space_on(2, 1);
  const std::vector<LoadCase> loads = boundary_data_set(3);
  const SymTensorField truth = random_admissible(sp->mesh_ptr(), rng);
  std::vector<CurrentDensity> data = same_mesh_data(truth, loads, sp);
  for (auto& block : data)
    for (auto& v : block.values)
      v += Vec2(0.05 * rng.next_symmetric(), 0.05 * rng.next_symmetric());

  // evaluation point: a different random iterate with nonzero adjoints
  NewtonState state{random_admissible(sp->mesh_ptr(), rng), {}, {}};
  for (const auto& load : loads) state.states.push_back(solve_forward(state.tensor, load, sp));
  for (std::size_t l = 0; l < loads.size(); ++l)
    state.adjoints.push_back(solve_adjoint(state.tensor, state.states[l], data[l], sp));

  const double gamma = 0.3;
  NewtonAssembler assembler(sp, TensorLayout::dg1, static_cast<int>(loads.size()));
  assembler.assemble(state, loads, data, gamma);
  const Eigen::MatrixXd jac = Eigen::MatrixXd(assembler.matrix());

  Packed packed{state, sp.get()};
  NewtonAssembler res_assembler(sp, TensorLayout::dg1, static_cast<int>(loads.size()));
  auto residual_at = [&](const Packed& p) {
    res_assembler.assemble(p.state, loads, data, gamma);
    return Eigen::VectorXd(res_assembler.residual());
  };

  const int n = packed.total();
  REQUIRE(n == assembler.total_size());
  Eigen::MatrixXd fd(n, n);
  const double eps = 1e-6;
  for (int j = 0; j < n; ++j) {
    Packed plus = packed, minus = packed;
    plus.set(j, packed.get(j) + eps);
    minus.set(j, packed.get(j) - eps);
    fd.col(j) = (residual_at(plus) - residual_at(minus)) / (2.0 * eps);
  }
  const double scale = jac.cwiseAbs().maxCoeff();
  CHECK((jac - fd).cwiseAbs().maxCoeff() <= 1e-5 * scale);
}

TEST_CASE("newton right side is affine in the data") {
  CounterRng rng(71);
  auto sp = space_on(2, 1);
  const std::vector<LoadCase> loads = boundary_data_set(3);
  const SymTensorField a = random_admissible(sp->mesh_ptr(), rng);
  std::vector<ScalarField> states;
  const std::vector<CurrentDensity> exact = same_mesh_data(a, loads, sp, &states);

  std::vector<CurrentDensity> data = exact;
  for (auto& block : data)
    for (auto& v : block.values)
      v += Vec2(0.1 * rng.next_symmetric(), 0.1 * rng.next_symmetric());

  // doubled residual: h' = 2h - A grad u
  std::vector<CurrentDensity> doubled = data;
  for (std::size_t l = 0; l < data.size(); ++l)
    for (std::size_t i = 0; i < data[l].values.size(); ++i)
      doubled[l].values[i] = 2.0 * data[l].values[i] - exact[l].values[i];

  NewtonState state{a, states, {}};
  for (std::size_t l = 0; l < loads.size(); ++l)
    state.adjoints.push_back(solve_adjoint(a, states[l], data[l], sp));

  NewtonAssembler assembler(sp, TensorLayout::dg1, static_cast<int>(loads.size()));
  const double gamma = 0.2;
  assembler.assemble(state, loads, data, gamma);
  const Eigen::VectorXd r_data = assembler.residual();
  assembler.assemble(state, loads, exact, gamma);
  const Eigen::VectorXd r_exact = assembler.residual();
  assembler.assemble(state, loads, doubled, gamma);
  const Eigen::VectorXd r_doubled = assembler.residual();

  // affinity of the residual in h: R(2h - h_exact) = 2 R(h) - R(h_exact)
  const Eigen::VectorXd predicted = 2.0 * r_data - r_exact;
  CHECK((r_doubled - predicted).lpNorm<Eigen::Infinity>() <=
        1e-12 * std::max(1.0, predicted.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("projected newton at the exact tensor stops immediately") {
  CounterRng rng(73);
  auto sp = space_on(4, 1);
  const SymTensorField truth = random_admissible(sp->mesh_ptr(), rng);
  const std::vector<LoadCase> loads = boundary_data_set(3);
  const std::vector<CurrentDensity> data = same_mesh_data(truth, loads, sp);

  const Bounds bounds{0.05, 10.0};
  NewtonAssembler assembler(sp, TensorLayout::dg1, static_cast<int>(loads.size()));
  NewtonState state = initialize_state(truth, loads, data, sp);

  NewtonConfig cfg;
  cfg.tolerance = 1e-3;
  InnerReport report;
  state = projected_newton(assembler, std::move(state), loads, data, bounds, 1e-10, cfg, &report);
  CHECK(report.iterations <= 2);
  TensorFunction truth_fn = [&truth](const Vec2& x) { return truth.eval_at_point(x); };
  CHECK(relative_error(state.tensor, truth) <= 1e-6);
}

TEST_CASE("projected newton output stays admissible") {
  CounterRng rng(79);
  auto sp = space_on(4, 1);
  const SymTensorField truth = random_admissible(sp->mesh_ptr(), rng);
  const std::vector<LoadCase> loads = boundary_data_set(3);
  const std::vector<CurrentDensity> data = same_mesh_data(truth, loads, sp);

  const Bounds bounds{0.5, 4.0};
  const SymTensorField start = SymTensorField::constant_field(sp->mesh_ptr(), TensorLayout::dg1,
                                                              SymTensor2{2.0, -1.0, 2.0});
  NewtonAssembler assembler(sp, TensorLayout::dg1, static_cast<int>(loads.size()));
  NewtonState state = initialize_state(project_field(start, bounds), loads, data, sp);
  NewtonConfig cfg;
  cfg.max_inner_iterations = 4;
  InnerReport report;
  state = projected_newton(assembler, std::move(state), loads, data, bounds, 0.5, cfg, &report);

  const double slack = bounds_slack(bounds);
  CHECK(report.eigen_range.min >= bounds.alpha - slack);
  CHECK(report.eigen_range.max <= bounds.beta + slack);
  const EigenRange out = eigenvalue_range(state.tensor);
  CHECK(out.min >= bounds.alpha - slack);
  CHECK(out.max <= bounds.beta + slack);
}

TEST_CASE("path following") {
  auto sp = space_on(4, 1);
  const SymTensorField truth = SymTensorField::from_function(
      sp->mesh_ptr(), TensorLayout::dg1, exact_tensor_function(TestCase::example2));
  const std::vector<LoadCase> loads = boundary_data_set(3);
  const std::vector<CurrentDensity> data = same_mesh_data(truth, loads, sp);
  const Bounds bounds{0.05, 10.0};
  const SymTensorField start = SymTensorField::constant_field(sp->mesh_ptr(), TensorLayout::dg1,
                                                              SymTensor2{2.0, -1.0, 2.0});

  SUBCASE("gamma schedule follows gamma0 rho^n") {
    PathConfig path;
    path.gamma0 = 10.0;
    path.rho = 0.7;
    path.max_outer_iterations = 4;
    path.noise_norm_sq = {0.0, 0.0, 0.0};
    NewtonConfig newton;
    const ReconstructionResult r = path_following(start, loads, data, sp, bounds, path, newton);
    REQUIRE(r.history.size() == 4);
    for (int n = 0; n < 4; ++n) {
      CHECK(r.history[n].outer == n);
      CHECK(r.history[n].gamma == 10.0 * std::pow(0.7, n));
    }
    CHECK(r.history[1].gamma == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(r.history[2].gamma == doctest::Approx(4.9).epsilon(1e-15));
    CHECK(r.history[3].gamma == doctest::Approx(3.43).epsilon(1e-15));
  }

  SUBCASE("huge noise bound stops after the first outer step") {
    PathConfig path;
    path.noise_norm_sq = {1e30, 1e30, 1e30};
    NewtonConfig newton;
    const ReconstructionResult r = path_following(start, loads, data, sp, bounds, path, newton);
    CHECK(r.stop_reason == StopReason::discrepancy_met);
    CHECK(r.history.size() == 1);
  }

  SUBCASE("histories are deterministic") {
    PathConfig path;
    path.max_outer_iterations = 6;
    NewtonConfig newton;
    const ReconstructionResult r1 = path_following(start, loads, data, sp, bounds, path, newton);
    const ReconstructionResult r2 = path_following(start, loads, data, sp, bounds, path, newton);
    REQUIRE(r1.history.size() == r2.history.size());
    for (std::size_t i = 0; i < r1.history.size(); ++i) {
      CHECK(r1.history[i].gamma == r2.history[i].gamma);
      CHECK(r1.history[i].objective.total == r2.history[i].objective.total);
      CHECK(r1.history[i].residual == r2.history[i].residual);
      CHECK(r1.history[i].relative_change == r2.history[i].relative_change);
    }
    for (std::size_t i = 0; i < r1.tensor.values.size(); ++i) {
      CHECK(r1.tensor.values[i].a11 == r2.tensor.values[i].a11);
      CHECK(r1.tensor.values[i].a12 == r2.tensor.values[i].a12);
      CHECK(r1.tensor.values[i].a22 == r2.tensor.values[i].a22);
    }
  }

  SUBCASE("resolve_after_projection variant also converges") {
    PathConfig path;
    path.max_outer_iterations = 10;
    NewtonConfig newton;
    newton.resolve_after_projection = true;
    const ReconstructionResult r = path_following(start, loads, data, sp, bounds, path, newton,
                                                  exact_tensor_function(TestCase::example2));
    REQUIRE(!r.history.empty());
    REQUIRE(r.history.back().error.has_value());
    CHECK(*r.history.back().error < 0.5);
  }
}

TEST_CASE("projected gradient descent") {
  auto sp = space_on(4, 1);
  const std::vector<LoadCase> loads = boundary_data_set(3);
  const Bounds bounds{0.05, 10.0};

  SUBCASE("stationary start stays put") {
    // Data consistent with the start and gamma = 0 make the gradient vanish.
    const SymTensorField start =
        SymTensorField::constant_field(sp->mesh_ptr(), TensorLayout::dg1, SymTensor2::identity());
    const std::vector<CurrentDensity> data = same_mesh_data(start, loads, sp);
    GradientDescentConfig cfg;
    cfg.max_iterations = 5;
    const GradientDescentResult r =
        projected_gradient_descent(start, loads, data, sp, bounds, 0.0, cfg);
    CHECK(r.iterations == 0);
    for (std::size_t i = 0; i < r.state.tensor.values.size(); ++i)
      CHECK(r.state.tensor.values[i].a11 == start.values[i].a11);
  }

  SUBCASE("objective decreases monotonically") {
    const SymTensorField truth =
        SymTensorField::constant_field(sp->mesh_ptr(), TensorLayout::dg1, SymTensor2::identity());
    const std::vector<CurrentDensity> data = same_mesh_data(truth, loads, sp);
    const SymTensorField start = SymTensorField::constant_field(sp->mesh_ptr(), TensorLayout::dg1,
                                                                SymTensor2{2.0, -1.0, 2.0});
    GradientDescentConfig cfg;
    cfg.max_iterations = 25;
    cfg.tolerance = 1e-9;
    const GradientDescentResult r =
        projected_gradient_descent(start, loads, data, sp, bounds, 1e-4, cfg);
    for (std::size_t i = 1; i < r.objectives.size(); ++i)
      CHECK(r.objectives[i] <= r.objectives[i - 1] + 1e-14);
  }

  SUBCASE("newton needs far fewer iterations than gradient descent") {
    const SymTensorField truth =
        SymTensorField::constant_field(sp->mesh_ptr(), TensorLayout::dg1, SymTensor2::identity());
    const std::vector<CurrentDensity> data = same_mesh_data(truth, loads, sp);
    const SymTensorField start = SymTensorField::constant_field(sp->mesh_ptr(), TensorLayout::dg1,
                                                                SymTensor2{2.0, -1.0, 2.0});
    const TensorFunction truth_fn = [](const Vec2&) { return SymTensor2::identity(); };

    PathConfig path;
    path.max_outer_iterations = 40;
    path.stagnation_tol = 0.0;
    NewtonConfig newton;
    const ReconstructionResult nres =
        path_following(start, loads, data, sp, bounds, path, newton, truth_fn);
    int newton_to_target = 0;
    bool newton_reached = false;
    for (const auto& rec : nres.history) {
      if (!newton_reached) newton_to_target += rec.inner_iterations;
      if (!newton_reached && rec.error && *rec.error <= 5e-2) newton_reached = true;
    }
    REQUIRE(newton_reached);

    GradientDescentConfig cfg;
    cfg.max_iterations = 400;
    cfg.tolerance = 1e-12;
    const GradientDescentResult gres =
        projected_gradient_descent(start, loads, data, sp, bounds, 1e-6, cfg);
    const double gd_error = relative_error(gres.state.tensor, truth_fn);
    CHECK(gd_error <= 5e-2);
    // the gradient baseline needs at least twice the iterations
    CHECK(gres.iterations >= 2 * newton_to_target);
  }
}
