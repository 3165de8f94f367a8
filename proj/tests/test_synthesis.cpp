#include <doctest.h>

#include <cmath>

#include "tensorcit/spd_projection.hpp"
#include "tensorcit/synthesis.hpp"
#include "tensorcit/util.hpp"

using namespace tct;

namespace {

std::shared_ptr<const FeSpace> space_on(int n, int degree) {
  auto mesh = std::make_shared<const Mesh>(build_uniform_mesh(MeshConfig{n, Domain{}}));
  return std::make_shared<const FeSpace>(mesh, degree);
}

}  // namespace

TEST_CASE("exact tensors from the test-case table") {
  SUBCASE("constant case is the identity") {
    CounterRng rng(3);
    for (int i = 0; i < 20; ++i) {
      const Vec2 x(rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0));
      const SymTensor2 a = exact_tensor(TestCase::example1, x);
      CHECK(a.a11 == 1.0);
      CHECK(a.a12 == 0.0);
      CHECK(a.a22 == 1.0);
    }
  }

  SUBCASE("isotropic smooth case at the origin") {
    const SymTensor2 a = exact_tensor(TestCase::example2, Vec2(0.0, 0.0));
    CHECK(a.a11 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.a22 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.a12 == 0.0);
  }

  SUBCASE("oscillatory case hits 2 + sin^2 at a quarter point") {
    CHECK(exact_tensor(TestCase::example3, Vec2(0.25, 0.25)).a11 ==
          doctest::Approx(2.5).epsilon(1e-14));
  }

  SUBCASE("discontinuous case scales by 1.5 inside the first region") {
    const SymTensor2 a = exact_tensor(TestCase::example7, Vec2(0.0, 0.0));
    CHECK(a.a11 == doctest::Approx(3.0).epsilon(1e-14));  // 1.5 * xi(0,0) = 1.5 * 2
    CHECK(a.a12 == 0.0);
  }

  SUBCASE("region lookup honors the precedence order") {
    // region boundaries resolve to the closed regions in index order
    CHECK(exact_tensor(TestCase::example7, Vec2(-0.4, 0.0)).a11 ==
          doctest::Approx(1.5 * (2.0 + std::sin(-0.4 * 3.14159265358979323846) *
                                           std::sin(0.0)))
              .epsilon(1e-12));
    // inside the second region
    const SymTensor2 s2 = exact_tensor(TestCase::example7, Vec2(-0.9, -0.1));
    const double xi = 2.0 + std::sin(-0.9 * 3.14159265358979323846) *
                                std::sin(-0.1 * 3.14159265358979323846);
    CHECK(s2.a11 == doctest::Approx(0.5 * xi).epsilon(1e-12));
    // far corner falls through to the background region
    const SymTensor2 s4 = exact_tensor(TestCase::example7, Vec2(0.9, 0.9));
    const double xi4 = 2.0 + std::sin(0.9 * 3.14159265358979323846) *
                                 std::sin(0.9 * 3.14159265358979323846);
    CHECK(s4.a11 == doctest::Approx(xi4).epsilon(1e-12));
  }

  SUBCASE("out of domain points are rejected") {
    CHECK_THROWS_AS(exact_tensor(TestCase::example1, Vec2(1.5, 0.0)), Error);
  }

  SUBCASE("all cases are symmetric and uniformly elliptic on a sample grid") {
    for (int c = 0; c < 7; ++c) {
      const TestCase tc = static_cast<TestCase>(c);
      double min_eig = 1e300, max_eig = -1e300;
      for (int i = 0; i <= 200; ++i)
        for (int j = 0; j <= 200; ++j) {
          const Vec2 x(-1.0 + i / 100.0, -1.0 + j / 100.0);
          const EigenDecomposition2 e = eig_sym2(exact_tensor(tc, x));
          min_eig = std::min(min_eig, e.lambda_min);
          max_eig = std::max(max_eig, e.lambda_max);
        }
      CHECK(min_eig >= 0.4);
      CHECK(max_eig <= 6.3);
    }
  }

  SUBCASE("diagonal cases have vanishing off-diagonals") {
    CounterRng rng(5);
    for (TestCase tc : {TestCase::example1, TestCase::example2, TestCase::example3,
                        TestCase::example5, TestCase::example7})
      for (int i = 0; i < 50; ++i) {
        const Vec2 x(rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0));
        CHECK(exact_tensor(tc, x).a12 == 0.0);
      }
  }
}

TEST_CASE("boundary data sets") {
  SUBCASE("five inputs, in the published order") {
    const auto loads = boundary_data_set(5);
    REQUIRE(loads.size() == 5);
    CHECK(loads[4].label == "g5");
    CHECK(loads[4].dirichlet(Vec2(0.5, 0.5)) == doctest::Approx(0.25).epsilon(1e-15));
    for (const auto& l : loads) CHECK(!l.source);  // f = 0 throughout
  }

  SUBCASE("three inputs are a prefix of the five") {
    const auto three = boundary_data_set(3);
    const auto five = boundary_data_set(5);
    REQUIRE(three.size() == 3);
    CounterRng rng(9);
    for (int i = 0; i < 3; ++i) {
      CHECK(three[i].label == five[i].label);
      for (int k = 0; k < 10; ++k) {
        const Vec2 x(rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0));
        CHECK(three[i].dirichlet(x) == five[i].dirichlet(x));
      }
    }
  }

  SUBCASE("nine inputs include the exponential load") {
    const auto loads = boundary_data_set(9);
    REQUIRE(loads.size() == 9);
    CHECK(loads[8].label == "g9");
    CHECK(loads[8].dirichlet(Vec2(0.0, 0.7)) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(loads[8].dirichlet(Vec2(0.0, -0.2)) == doctest::Approx(0.1).epsilon(1e-15));
  }

  SUBCASE("unsupported counts are rejected") {
    CHECK_THROWS_AS(boundary_data_set(4), Error);
    CHECK_THROWS_AS(boundary_data_set(0), Error);
  }
}

TEST_CASE("exact data generation") {
  SUBCASE("identity tensor with linear data is factor independent") {
    auto sp = space_on(4, 1);
    const std::vector<LoadCase> loads = {boundary_data_set(3)[0]};  // g = x1 + x2
    for (int factor : {2, 4}) {
      const MeasurementSet set =
          generate_exact_data(TestCase::example1, loads, factor, *sp, 1);
      REQUIRE(set.exact.size() == 1);
      for (const Vec2& v : set.exact[0].values)
        CHECK((v - Vec2(1.0, 1.0)).norm() <= 1e-11);
    }
  }

  SUBCASE("fine factors converge to each other") {
    auto sp = space_on(4, 1);
    const std::vector<LoadCase> loads = {boundary_data_set(5)[4]};  // g = x1 x2
    const MeasurementSet d2 = generate_exact_data(TestCase::example2, loads, 2, *sp, 1);
    const MeasurementSet d4 = generate_exact_data(TestCase::example2, loads, 4, *sp, 1);
    const MeasurementSet d8 = generate_exact_data(TestCase::example2, loads, 8, *sp, 1);
    auto gap = [](const CurrentDensity& a, const CurrentDensity& b) {
      double m = 0.0;
      for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, (a.values[i] - b.values[i]).norm());
      return m;
    };
    const double gap24 = gap(d2.exact[0], d4.exact[0]);
    const double gap48 = gap(d4.exact[0], d8.exact[0]);
    CHECK(gap48 < gap24);
    CHECK(gap24 < 0.2);
  }

  SUBCASE("transfer evaluates the exact tensor against the fine gradient") {
    auto sp = space_on(3, 1);
    const std::vector<LoadCase> loads = {boundary_data_set(5)[4]};
    const int factor = 4;
    const MeasurementSet set = generate_exact_data(TestCase::example2, loads, factor, *sp, 1);

    // independent fine solve for comparison
    auto fine = space_on(3 * factor, 1);
    const SparseMatrix k =
        assemble_stiffness(*fine, exact_tensor_function(TestCase::example2));
    const ScalarField u = solve_dirichlet_system(
        k, Eigen::VectorXd::Zero(fine->dof_count()),
        set_dirichlet(ScalarField(fine), loads[0].dirichlet));

    const QuadLayout layout = sp->quad_layout();
    for (int t = 0; t < layout.triangle_count; ++t)
      for (int q = 0; q < layout.points_per_triangle; ++q) {
        const Vec2 x = sp->quad_points(t)[q].point;
        const Vec2 expected =
            exact_tensor(TestCase::example2, x).apply(u.gradient_at_point(x));
        CHECK((set.exact[0].at(t, q) - expected).norm() <= 1e-10);
      }
  }

  SUBCASE("fine factor below two is rejected") {
    auto sp = space_on(3, 1);
    CHECK_THROWS_AS(generate_exact_data(TestCase::example1, boundary_data_set(3), 1, *sp, 1),
                    Error);
  }
}

TEST_CASE("multiplicative noise") {
  auto sp = space_on(4, 1);
  const std::vector<LoadCase> loads = boundary_data_set(3);
  const MeasurementSet exact = generate_exact_data(TestCase::example3, loads, 2, *sp, 1);

  SUBCASE("zero level is the identity, bitwise") {
    const MeasurementSet noisy = add_noise(exact, NoiseOptions{0.0, 17}, *sp);
    for (int l = 0; l < exact.load_count(); ++l)
      for (std::size_t i = 0; i < exact.exact[l].values.size(); ++i)
        CHECK(noisy.noisy[l].values[i] == exact.exact[l].values[i]);
    for (double n : noisy.noise_norm_sq) CHECK(n == 0.0);
  }

  SUBCASE("per-component relative bound holds pointwise") {
    const double delta = 0.05;
    const MeasurementSet noisy = add_noise(exact, NoiseOptions{delta, 17}, *sp);
    for (int l = 0; l < exact.load_count(); ++l)
      for (std::size_t i = 0; i < exact.exact[l].values.size(); ++i) {
        const Vec2 h = exact.exact[l].values[i];
        const Vec2 hd = noisy.noisy[l].values[i];
        CHECK(std::abs(hd.x() - h.x()) <= delta * std::abs(h.x()) * (1.0 + 1e-12));
        CHECK(std::abs(hd.y() - h.y()) <= delta * std::abs(h.y()) * (1.0 + 1e-12));
      }
  }

  SUBCASE("recorded norms bound the noise by delta times the data norm") {
    const double delta = 0.08;
    const MeasurementSet noisy = add_noise(exact, NoiseOptions{delta, 23}, *sp);
    for (int l = 0; l < exact.load_count(); ++l) {
      double data_norm_sq = 0.0;
      for (int t = 0; t < exact.exact[l].layout.triangle_count; ++t) {
        const auto& qps = sp->quad_points(t);
        for (int q = 0; q < exact.exact[l].layout.points_per_triangle; ++q)
          data_norm_sq += qps[q].weight * exact.exact[l].at(t, q).squaredNorm();
      }
      CHECK(noisy.noise_norm_sq[l] <= delta * delta * data_norm_sq * (1.0 + 1e-12));
      CHECK(noisy.noise_norm_sq[l] > 0.0);
    }
  }

  SUBCASE("seeds are reproducible and distinct") {
    const MeasurementSet a = add_noise(exact, NoiseOptions{0.05, 41}, *sp);
    const MeasurementSet b = add_noise(exact, NoiseOptions{0.05, 41}, *sp);
    const MeasurementSet c = add_noise(exact, NoiseOptions{0.05, 42}, *sp);
    bool differs = false;
    for (int l = 0; l < exact.load_count(); ++l)
      for (std::size_t i = 0; i < exact.exact[l].values.size(); ++i) {
        CHECK(a.noisy[l].values[i] == b.noisy[l].values[i]);
        if (a.noisy[l].values[i] != c.noisy[l].values[i]) differs = true;
      }
    CHECK(differs);
  }

  SUBCASE("scalar-per-point mode scales both components identically") {
    const MeasurementSet noisy =
        add_noise(exact, NoiseOptions{0.05, 19, /*scalar_per_point=*/true}, *sp);
    for (int l = 0; l < exact.load_count(); ++l)
      for (std::size_t i = 0; i < exact.exact[l].values.size(); ++i) {
        const Vec2 h = exact.exact[l].values[i];
        const Vec2 hd = noisy.noisy[l].values[i];
        if (std::abs(h.x()) > 1e-12 && std::abs(h.y()) > 1e-12)
          CHECK(hd.x() / h.x() == doctest::Approx(hd.y() / h.y()).epsilon(1e-12));
      }
  }

  SUBCASE("shared-realization mode reuses the draw sequence across loads") {
    const MeasurementSet noisy = add_noise(
        exact, NoiseOptions{0.05, 19, /*scalar_per_point=*/false, /*shared_realization=*/true},
        *sp);
    for (int l = 1; l < exact.load_count(); ++l)
      for (std::size_t i = 0; i < exact.exact[0].values.size(); ++i) {
        const double h0 = exact.exact[0].values[i].x();
        const double hl = exact.exact[l].values[i].x();
        if (std::abs(h0) > 1e-12 && std::abs(hl) > 1e-12)
          CHECK(noisy.noisy[0].values[i].x() / h0 ==
                doctest::Approx(noisy.noisy[l].values[i].x() / hl).epsilon(1e-12));
      }
  }

  SUBCASE("fresh-per-load default draws differ across loads") {
    const MeasurementSet noisy = add_noise(exact, NoiseOptions{0.05, 19}, *sp);
    bool differs = false;
    for (std::size_t i = 0; i < exact.exact[0].values.size(); ++i) {
      const double h0 = exact.exact[0].values[i].x();
      const double h1 = exact.exact[1].values[i].x();
      if (std::abs(h0) > 1e-12 && std::abs(h1) > 1e-12 &&
          std::abs(noisy.noisy[0].values[i].x() / h0 - noisy.noisy[1].values[i].x() / h1) > 1e-9)
        differs = true;
    }
    CHECK(differs);
  }
}
