#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pshosc/core.hpp"

using namespace pshosc;

TEST_CASE("catalog entries evaluate to their definitions") {
  auto f = catalog_lookup("log_abs", {{"z0", "0"}, {"dim", "1"}});
  Complex two{2.0};
  CHECK(f(std::span<const Complex>(&two, 1)) == doctest::Approx(std::log(2.0)));

  auto cex = catalog_lookup("counterexample");
  std::vector<Complex> e{std::exp(-1.0), std::exp(-1.0)};
  CHECK(cex(e) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));

  auto lm = catalog_lookup("lelong_max", {{"dim", "2"}});
  std::vector<Complex> zero{0.0, 0.0};
  CHECK(lm(zero) == 0.0);
  REQUIRE(lm.meta().lelong_class_constant.has_value());
  CHECK(*lm.meta().lelong_class_constant == 0.0);
}

TEST_CASE("catalog rejects bad input") {
  CHECK_THROWS_AS(catalog_lookup("nope"), std::invalid_argument);
  CHECK_THROWS_AS(catalog_lookup("quadratic", {{"c", "1;2;2;1"}}), std::invalid_argument);
  CHECK_THROWS_AS(catalog_lookup("log_abs", {{"radius", "1"}}), std::invalid_argument);
  CHECK_THROWS_AS(catalog_lookup("log_poly", {{"roots", "1;2"}, {"mult", "1;0"}}), std::invalid_argument);
  auto cex = catalog_lookup("counterexample");
  std::vector<Complex> edge{0.5, 1.0};
  CHECK_THROWS_AS(cex(edge), std::domain_error);
}

TEST_CASE("log_poly degree is the sum of multiplicities") {
  auto f = catalog_lookup("log_poly", {{"roots", "1;-2+i;0.5i"}, {"mult", "2;1;3"}});
  REQUIRE(f.meta().degree.has_value());
  CHECK(*f.meta().degree == 6);
  Complex root{-2.0, 1.0};
  CHECK(std::isinf(f(std::span<const Complex>(&root, 1))));
}

TEST_CASE("quadratic Hessian metadata equals the coefficient matrix everywhere") {
  auto f = catalog_lookup("quadratic", {{"c", "1;1;1;1"}});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    std::vector<Complex> z{{g(rng), g(rng)}, {g(rng), g(rng)}};
    auto h = f.meta().smooth_hessian_at(z);
    CHECK(h(0, 0).real() == 1.0);
    CHECK(h(0, 1).real() == 1.0);
    CHECK(h(1, 1).real() == 1.0);
    CHECK(f(z) == doctest::Approx(std::norm(z[0] + z[1])).epsilon(1e-13));
  }
}

TEST_CASE("counterexample has a positive semidefinite complex Hessian") {
  // For a multicircular u(log|z|, log|w|) the complex Hessian is congruent to
  // the real Hessian of u in the log-moduli, so PSD is checked there with a
  // fourth-order stencil on a 50 x 50 grid of radial arguments.
  auto f = catalog_lookup("counterexample");
  auto u = [&](double s, double t) {
    std::vector<Complex> z{std::polar(std::exp(s), 0.3), std::polar(std::exp(t), 1.1)};
    return f(z);
  };
  const double c2[5] = {-1.0 / 12, 4.0 / 3, -2.5, 4.0 / 3, -1.0 / 12};
  const double c1[5] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
  double worst = 1.0;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double s = std::log(0.05 + 0.9 * i / 49.0), t = std::log(0.05 + 0.9 * j / 49.0);
      const double h = 0.003 * std::min(std::abs(t), std::abs(s + t));
      double fss = 0, ftt = 0, fst = 0;
      for (int a = 0; a < 5; ++a) {
        fss += c2[a] * u(s + (a - 2) * h, t);
        ftt += c2[a] * u(s, t + (a - 2) * h);
        for (int b = 0; b < 5; ++b) fst += c1[a] * c1[b] * u(s + (a - 2) * h, t + (b - 2) * h);
      }
      Eigen::Matrix2d hess;
      hess << fss, fst, fst, ftt;
      hess /= h * h;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
      worst = std::min(worst, es.eigenvalues()(0) / es.eigenvalues().cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst >= -1e-8);
}

TEST_CASE("region membership") {
  Polydisc unit(ComplexVector{0.0, 0.0}, {1.0, 1.0});
  CHECK(region_membership(unit, ComplexVector{0.5, 0.5}));
  CHECK_FALSE(region_membership(unit, ComplexVector{1.5, 0.0}));

  AnisotropicBox box(ComplexVector{0.0, 0.0}, 0.01, {1.0, 2.0});
  CHECK_FALSE(region_membership(box, ComplexVector{0.005, 0.0002}));
  CHECK(region_membership(box, ComplexVector{0.005, 0.00005}));

  Segment seg(Complex{-1.0}, Complex{1.0});
  CHECK(region_membership(seg, ComplexVector{0.0}));
  CHECK_FALSE(region_membership(seg, ComplexVector{Complex(0.0, 1e-9)}));

  ConvexPolytope sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(region_membership(sq, ComplexVector{Complex(0.5, 0.5)}));
  CHECK_FALSE(region_membership(sq, ComplexVector{Complex(1.1, 0.5)}));

  CHECK_THROWS_AS(region_membership(unit, ComplexVector{0.0}), std::invalid_argument);
}

TEST_CASE("polytope hull of random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> v;
  for (int k = 0; k < 9; ++k) v.push_back({u(rng), u(rng), u(rng), u(rng)});
  ConvexPolytope a(v);
  CHECK(a.full_dimensional());
  for (const auto& p : v) CHECK(a.contains(p, 1e-9));
  auto c = a.vertex_centroid();
  CHECK(a.contains(c));
  std::vector<double> far{3, 3, 3, 3};
  CHECK_FALSE(a.contains(far));
  std::vector<double> dir{1, 0, 0, 0};
  const double s = a.ray_exit(c, dir);
  std::vector<double> inside = c, outside = c;
  inside[0] += 0.999 * s;
  outside[0] += 1.001 * s;
  CHECK(a.contains(inside));
  CHECK_FALSE(a.contains(outside));
}

TEST_CASE("finite type") {
  CHECK(finite_type_check(Polydisc(ComplexVector{0.0, 0.0}, {0.1, 0.1}), 1.0));
  CHECK(finite_type_check(Polydisc(ComplexVector{0.0, 0.0}, {0.5, 0.25}), 2.0));
  CHECK_FALSE(finite_type_check(Polydisc(ComplexVector{0.0, 0.0}, {0.9, 0.01}), 2.0));
  CHECK_THROWS(finite_type_check(Polydisc(ComplexVector{0.0}, {0.5}), 0.5));
}

TEST_CASE("complex literal grammar") {
  CHECK(parse_complex("1+2i") == Complex(1, 2));
  CHECK(parse_complex("-i") == Complex(0, -1));
  CHECK(parse_complex("2e-3-1i") == Complex(2e-3, -1));
  CHECK(parse_complex("0.5") == Complex(0.5, 0));
  CHECK_THROWS_AS(parse_complex("1+2j"), std::invalid_argument);
  CHECK(parse_real_list("1;2;3").size() == 3);
}

TEST_CASE("polynomial restriction to a line") {
  Polynomial p(2, 2.0, {{{1.0, 1.0}, 1.0, 2}, {{0.0, 1.0}, Complex(0, 1), 1}});
  std::vector<Complex> base{0.3, -0.2}, dir{Complex(0.5, 0.1), Complex(-0.2, 0.7)};
  Polynomial q = p.restrict_to_line(base, dir);
  for (double s : {-1.0, 0.2, 0.9}) {
    Complex zeta{s, 0.3 * s};
    std::vector<Complex> z{base[0] + zeta * dir[0], base[1] + zeta * dir[1]};
    CHECK(std::abs(q(std::span<const Complex>(&zeta, 1)) - p(z)) < 1e-12);
  }
  auto c = Polynomial::from_roots({1.0, -1.0}).coefficients();
  CHECK(std::abs(c[0] + 1.0) < 1e-15);
  CHECK(std::abs(c[1]) < 1e-15);
  CHECK(std::abs(c[2] - 1.0) < 1e-15);
}
