#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pshosc/quad.hpp"

using namespace pshosc;

namespace {

const QuadratureSpec kSpec{};

void check_honest(const IntegralResult& r, double truth, double tol) {
  CHECK(r.converged);
  CHECK(std::abs(r.value - truth) <= tol);
  CHECK(std::abs(r.value - truth) <= 10.0 * r.abs_error_estimate + 1e-15);
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 4, 16, 33}) {
    const auto& g = gauss_legendre(n);
    for (int k = 0; k < 2 * n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("adaptive integration with a log singularity") {
  auto r = integrate_adaptive([](double t) { return t == 0.3 ? kNegInf : std::log(std::abs(t - 0.3)); }, 0.0, 1.0);
  const double truth = 0.3 * std::log(0.3) + 0.7 * std::log(0.7) - 1.0;
  check_honest(r, truth, 1e-10);
}

TEST_CASE("log-radial measure") {
  auto lin = integrate_log_radial([](double t) { return t; });
  check_honest(lin, -0.5, 1e-12);
  auto sq = integrate_log_radial([](double t) { return t * t; });
  check_honest(sq, 0.5, 1e-12);
  auto div = integrate_log_radial([](double t) { return std::exp(-2.5 * t); });
  CHECK(div.divergent);
}

TEST_CASE("polydisc means of log|z|") {
  auto f = catalog_lookup("log_abs");
  check_honest(mean_over_polydisc(f, make_disc(0.0, 1.0), kSpec), -0.5, 1e-10);
  check_honest(mean_over_polydisc(f, make_disc(3.0, 1.0), kSpec), std::log(3.0), 1e-10);
  // Interior center: log b - (1 - |c|^2/b^2)/2.
  const double c = 0.4, b = 1.3;
  check_honest(mean_over_polydisc(f, make_disc(Complex(0, c), b), kSpec), std::log(b) - 0.5 * (1 - c * c / (b * b)),
               1e-9);
  auto one = catalog_lookup("constant", {{"value", "1"}, {"dim", "2"}});
  auto r = mean_over_polydisc(one, Polydisc(ComplexVector{0.3, Complex(1, 2)}, {0.5, 2.0}), kSpec);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bidisc mean of the Euclidean log norm") {
  // scipy dblquad of (1/2) log(r1^2 + r2^2) * 4 r1 r2 over [0,1]^2.
  auto f = catalog_lookup("log_abs", {{"dim", "2"}});
  check_honest(mean_over_polydisc(f, Polydisc(ComplexVector{0.0, 0.0}, {1.0, 1.0}), kSpec), -0.056852819440054866,
               1e-9);
}

TEST_CASE("Shilov means follow the circle-mean formula") {
  auto f = catalog_lookup("log_abs");
  CHECK(mean_over_shilov(f, make_disc(0.0, 1.0), kSpec).value == doctest::Approx(0.0));
  check_honest(mean_over_shilov(f, make_disc(3.0, 1.0), kSpec), std::log(3.0), 1e-12);
  check_honest(mean_over_shilov(f, make_disc(1.0, 2.0), kSpec), std::log(2.0), 1e-12);
  // Non-multicircular in two variables: log|z1 - 1/2| on a torus of radius 1.
  Polynomial p(2, 1.0, {{{1.0, 0.0}, 0.5, 1}});
  auto g = log_poly_function(p);
  check_honest(mean_over_shilov(g, Polydisc(ComplexVector{0.0, 0.0}, {1.0, 0.7}), kSpec), 0.0, 1e-9);
}

TEST_CASE("segment means") {
  auto f = catalog_lookup("log_abs");
  check_honest(mean_over_segment(f, Segment(Complex(0), Complex(1)), kSpec), -1.0, 1e-9);
  check_honest(mean_over_segment(f, Segment(Complex(-1), Complex(1)), kSpec), -1.0, 1e-9);
  const double a = 0.5;
  check_honest(mean_over_segment(f, Segment(Complex(a), Complex(1)), kSpec), -(a * std::log(a) / (1 - a) + 1), 1e-12);
}

TEST_CASE("polytope means") {
  auto f = catalog_lookup("log_abs");
  ConvexPolytope sq({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  // (1/2) * integral of log(x^2+y^2) over [0,1]^2 = (log 2 - 3 + pi/2) / 2.
  const double truth = 0.5 * (std::log(2.0) - 3.0 + M_PI / 2);
  auto r = mean_over_polytope(f, sq, kSpec);
  CHECK(std::abs(r.value - truth) <= 0.002);
  CHECK(std::abs(r.value - truth) <= r.abs_error_estimate);

  ConvexPolytope unit({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  auto re = catalog_lookup("re_z");
  CHECK(mean_over_polytope(re, unit, kSpec).value == doctest::Approx(0.5).epsilon(2e-3));
  auto one = catalog_lookup("constant");
  CHECK(mean_over_polytope(one, unit, kSpec).value == 1.0);

  CHECK_THROWS_WITH_AS(mean_over_polytope(one, ConvexPolytope({{0, 0}, {1, 1}, {0.5, 0.5}}), kSpec),
                       doctest::Contains("degenerate polytope"), std::invalid_argument);
}

TEST_CASE("Monte Carlo determinism") {
  auto f = catalog_lookup("log_abs");
  ConvexPolytope tri({{-1, 0}, {1, 0.2}, {0.3, 1.5}});
  auto a = mean_over_polytope(f, tri, kSpec), b = mean_over_polytope(f, tri, kSpec);
  CHECK(std::memcmp(&a.value, &b.value, sizeof(double)) == 0);
  CHECK(std::memcmp(&a.abs_error_estimate, &b.abs_error_estimate, sizeof(double)) == 0);
  QuadratureSpec other = kSpec;
  other.seed = 8;
  CHECK(mean_over_polytope(f, tri, other).value != a.value);
}

TEST_CASE("linearity and sub-mean-value") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pr(0.2, 2.0);
  auto f = catalog_lookup("log_abs", {{"z0", "0.3+0.1i;-0.2"}});
  auto g = catalog_lookup("lelong_max", {{"dim", "2"}});
  for (int k = 0; k < 5; ++k) {
    Polydisc p(ComplexVector{Complex(u(rng), u(rng)), Complex(u(rng), u(rng))}, {pr(rng), pr(rng)});
    const double al = u(rng), be = u(rng);
    Integrand comb = [&](std::span<const Complex> z) { return al * f(z) + be * g(z); };
    auto rf = mean_over_polydisc(f, p, kSpec), rg = mean_over_polydisc(g, p, kSpec);
    auto rc = mean_over_polydisc(comb, p, kSpec);
    const double tol = std::abs(al) * rf.abs_error_estimate + std::abs(be) * rg.abs_error_estimate +
                       rc.abs_error_estimate + 1e-12;
    CHECK(std::abs(rc.value - (al * rf.value + be * rg.value)) <= tol);
    for (const auto* h : {&f, &g}) {
      auto solid = mean_over_polydisc(*h, p, kSpec), shilov = mean_over_shilov(*h, p, kSpec);
      CHECK(solid.value <= shilov.value + solid.abs_error_estimate + shilov.abs_error_estimate);
    }
  }
}

TEST_CASE("sub-mean-value inequality for catalog functions") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.3, 0.3), pr(0.05, 0.3);
  std::vector<PshFunction> fs{catalog_lookup("log_abs", {{"z0", "0.1"}}), catalog_lookup("m_log", {{"m", "2"}}),
                              catalog_lookup("quadratic", {{"c", "1"}}), catalog_lookup("lelong_max")};
  for (const auto& f : fs) {
    for (int k = 0; k < 10; ++k) {
      Complex c{u(rng), u(rng)};
      const double v = f(std::span<const Complex>(&c, 1));
      auto r = mean_over_polydisc(f, make_disc(c, pr(rng)), kSpec);
      CHECK(v <= r.value + r.abs_error_estimate + 1e-12);
    }
  }
}

TEST_CASE("spec validation") {
  QuadratureSpec s;
  s.radial_nodes = 3;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.angular_nodes = 24;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.target_rel_error = 1e-15;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
