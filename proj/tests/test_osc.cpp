#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pshosc/osc.hpp"

using namespace pshosc;

namespace {

const QuadratureSpec kSpec{};

// Closed form for UO of log|z| on a disc with |center| / radius = x.
double disc_uo(double x) { return std::log(1 + x) + 0.5 * (1 - x * x); }

}  // namespace

TEST_CASE("sup on regions") {
  auto f = catalog_lookup("log_abs");
  auto s = sup_on_region(f, make_disc(Complex(0.3, -0.4), 2.0), kSpec);
  CHECK(s.closed_form);
  CHECK(s.value == doctest::Approx(std::log(2.5)));
  CHECK(sup_on_region(f, Segment(Complex(0.5), Complex(1.0)), kSpec).value == doctest::Approx(0.0));
  CHECK(sup_on_region(f, Segment(Complex(-0.2, 0.1), Complex(1.0)), kSpec).value == doctest::Approx(0.0).epsilon(1e-12));
  auto lm = catalog_lookup("lelong_max", {{"dim", "2"}});
  CHECK(sup_on_region(lm, Polydisc(ComplexVector{0.0, 0.0}, {1.0, 1.0}), kSpec).value == doctest::Approx(std::log(2.0)));

  // Interior maximum on a segment: log|z^2 - 1| on [-i, i] peaks at 0.
  auto p = log_poly_function(Polynomial::from_roots({1.0, -1.0}));
  auto sp = sup_on_region(p, Segment(Complex(0, -1), Complex(0, 1)), kSpec);
  CHECK(sp.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // Polytope: |z - 2| over the unit square peaks at the corner (0, 0) or (0, 1).
  auto q = log_poly_function(Polynomial::from_roots({2.0}));
  ConvexPolytope sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(sup_on_region(q, sq, kSpec).value == doctest::Approx(0.5 * std::log(5.0)).epsilon(1e-10));
}

TEST_CASE("closed-form sup disagreement is an oracle violation") {
  FunctionMeta meta;
  meta.closed_sup_on_polydisc = [](const Polydisc&) -> std::optional<double> { return 5.0; };
  PshFunction wrong("wrong", 1, [](std::span<const Complex> z) { return std::abs(z[0]); }, meta);
  CHECK_THROWS_AS(sup_on_region(wrong, make_disc(0.0, 1.0), kSpec), OracleViolation);
}

TEST_CASE("non-psh functions are searched over the solid polydisc") {
  PshFunction bump("bump", 1, [](std::span<const Complex> z) { return -std::norm(z[0] - 0.2); }, {}, false);
  auto s = sup_on_region(bump, make_disc(0.0, 1.0), kSpec);
  CHECK(s.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("oscillation of log|z| on discs") {
  auto f = catalog_lookup("log_abs");
  auto r = oscillation(f, make_disc(0.0, 1.0), kSpec);
  CHECK(r.uo == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.mo <= 2 * r.uo + 4 * (r.sup_error + r.mean_error + r.mo_error));
  // The closed form at the golden ratio point.
  const double x = (std::sqrt(5.0) - 1) / 2;
  auto g = oscillation(f, make_disc(x * 1.7, 1.7), kSpec);
  CHECK(g.uo == doctest::Approx(0.790229).epsilon(1e-5));
  CHECK(std::log((std::sqrt(5.0) + 1) / 2) + (std::sqrt(5.0) - 1) / 4 == doctest::Approx(disc_uo(x)));
  auto one = catalog_lookup("constant");
  auto c = oscillation(one, make_disc(0.4, 0.3), kSpec);
  CHECK(c.uo == 0.0);
  CHECK(c.mo == 0.0);
}

TEST_CASE("UO on discs is continuous in the radius") {
  auto f = catalog_lookup("log_abs");
  double prev = oscillation(f, make_disc(0.5, 0.1), kSpec).uo;
  for (double r = 0.12; r < 3.0; r *= 1.2) {
    const double cur = oscillation(f, make_disc(0.5, r), kSpec).uo;
    CHECK(std::abs(cur - prev) <= 1.0 * std::log(1.2));
    CHECK(cur == doctest::Approx(r > 0.5 ? disc_uo(0.5 / r) : std::log(0.5 + r) - std::log(0.5) +
                                                                     0.0 * r)
                     .epsilon(r > 0.5 ? 1e-8 : 1.0));
    prev = cur;
  }
}

TEST_CASE("MO is bounded by twice UO") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1), pr(0.2, 1.5);
  std::vector<PshFunction> fs{catalog_lookup("log_abs"), catalog_lookup("log_poly", {{"roots", "0.5;-0.3i"}}),
                              catalog_lookup("quadratic", {{"c", "1"}})};
  for (const auto& f : fs) {
    for (int k = 0; k < 3; ++k) {
      auto r = oscillation(f, make_disc(Complex(u(rng), u(rng)), pr(rng)), kSpec);
      CHECK(r.converged);
      CHECK(r.uo >= -(r.sup_error + r.mean_error));
      CHECK(r.mo <= 2 * r.uo + 4 * (r.sup_error + r.mean_error + r.mo_error));
    }
  }
  auto seg = oscillation(fs[1], Segment(Complex(-1), Complex(1, 1)), kSpec);
  CHECK(seg.mo <= 2 * seg.uo + 4 * (seg.sup_error + seg.mean_error + seg.mo_error));
}

TEST_CASE("Harnack decomposition closed forms") {
  auto f = catalog_lookup("log_abs");
  auto d = harnack_decomposition(f, make_disc(0.0, 1.0), kSpec);
  CHECK(d.i1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.i2 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d.j1 == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(d.j2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.converged);
  CHECK(d.i1_bound_holds(1e-8));
  CHECK(d.i2_bound_holds(1e-8));

  auto h = harnack_decomposition(f, make_disc(3.0, 1.0), kSpec);
  CHECK(std::abs(h.i2) < 1e-9);
  CHECK(h.i1 + h.i2 == doctest::Approx(std::log(4.0) - std::log(3.0)).epsilon(1e-9));

  auto c = harnack_decomposition(catalog_lookup("constant", {{"dim", "2"}}),
                                 Polydisc(ComplexVector{0.1, 0.2}, {0.5, 0.6}), kSpec);
  CHECK(c.i1 == 0.0);
  CHECK(c.i2 == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(c.j1 == 0.0);
  CHECK(c.j2 == 0.0);
}

TEST_CASE("Harnack bounds on random bidiscs") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 1), pr(0.1, 1.0);
  std::vector<PshFunction> fs{catalog_lookup("log_abs", {{"dim", "2"}}),
                              catalog_lookup("lelong_max", {{"dim", "2"}}),
                              catalog_lookup("max_log", {{"m", "1;2"}})};
  for (const auto& f : fs) {
    for (int k = 0; k < 2; ++k) {
      Polydisc p(ComplexVector{Complex(u(rng), u(rng)), Complex(u(rng), u(rng))}, {pr(rng), pr(rng)});
      auto d = harnack_decomposition(f, p, kSpec);
      CHECK(d.tolerance < 1e-5);
      CHECK(d.i1_bound_holds(1e-8));
      CHECK(d.i2_bound_holds(1e-8));
    }
  }
}

TEST_CASE("Lelong class bound") {
  auto f = catalog_lookup("lelong_max", {{"dim", "2"}});
  std::vector<Polydisc> fam{Polydisc(ComplexVector{Complex(3, 1), Complex(-2, 0)}, {1e6, 1e-6}),
                            Polydisc(ComplexVector{0.0, 0.0}, {1e-6, 1e6})};
  auto rep = lelong_class_check(f, fam, kSpec);
  CHECK(rep.pass);
  CHECK(rep.max_uo < 9.0);
  CHECK(rep.proof_bound == doctest::Approx(9 * std::log(2.0) + 0.5));

  auto g = catalog_lookup("lelong_max");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> e(-4, 4), u(-1, 1);
  std::vector<Polydisc> discs;
  for (int k = 0; k < 50; ++k)
    discs.push_back(make_disc(Complex(u(rng), u(rng)) * std::pow(10.0, e(rng)), std::pow(10.0, e(rng))));
  auto r1 = lelong_class_check(g, discs, kSpec);
  CHECK(r1.pass);
  CHECK(r1.max_uo <= 3 * std::log(2.0) + 0.5);

  auto zero = catalog_lookup("constant", {{"value", "0"}});
  CHECK(lelong_class_check(zero, {make_disc(1.0, 2.0)}, kSpec).max_uo == 0.0);

  // The growth hypothesis is enforced.
  auto big = catalog_lookup("m_log", {{"m", "2"}});
  FunctionMeta meta = big.meta();
  meta.lelong_class_constant = 0.0;
  PshFunction liar("liar", 1, big.evaluator(), meta);
  CHECK_THROWS_AS(lelong_class_check(liar, discs, kSpec), std::invalid_argument);
}

TEST_CASE("convexity gap lemmas") {
  auto mx = convex_max(2);
  auto r = convexity_gap_check(mx, GapKind::FiniteType, 1.0, 64, 3);
  CHECK(r.max_gap == doctest::Approx(1.0));
  CHECK(r.bound == doctest::Approx(2.0));
  CHECK(r.pass);

  auto sp = convex_softplus(1);
  std::vector<double> t{10.0}, tm{9.0};
  CHECK(sp.g(t) - sp.g(tm) == doctest::Approx(std::log((1 + std::exp(10.0)) / (1 + std::exp(9.0)))));
  CHECK(sp.g(t) - sp.g(tm) == doctest::Approx(0.999922).epsilon(1e-6));
  auto rl = convexity_gap_check(sp, GapKind::Lelong, 1.0, 256, 5);
  CHECK(rl.pass);
  CHECK(rl.max_gap <= 1.0);

  auto flat = convex_linear({0.0, 0.0});
  CHECK(convexity_gap_check(flat, GapKind::FiniteType, 3.0, 32, 1).max_gap == 0.0);

  for (double n_type : {1.0, 2.0, 5.0}) {
    CHECK(convexity_gap_check(convex_logsumexp(3), GapKind::FiniteType, n_type, 200, 9).pass);
    CHECK(convexity_gap_check(convex_lelong_max(3), GapKind::Lelong, n_type, 200, 9).pass);
  }
  CHECK_THROWS_AS(convexity_gap_check(convex_linear({2.0}), GapKind::Lelong, 1.0, 10, 1), std::invalid_argument);

  auto f = catalog_lookup("log_abs", {{"z0", "0.2;0.1i"}});
  auto bm = convex_boundary_mean(f, Polydisc(ComplexVector{0.0, 0.0}, {0.5, 0.5}), kSpec);
  CHECK(convexity_gap_check(bm, GapKind::FiniteType, 2.0, 24, 4).pass);
}

TEST_CASE("barycenter inequality for d(e^{2t})") {
  ConvexHandle lin{"t", 1, [](std::span<const double> t) { return t[0]; }};
  auto r = barycenter_inequality_check(lin, 0);
  CHECK(r.integral == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(r.at_barycenter == -0.5);
  ConvexHandle sq{"t^2", 1, [](std::span<const double> t) { return t[0] * t[0]; }};
  auto s = barycenter_inequality_check(sq, 20);
  CHECK(s.integral == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.at_barycenter == 0.25);
  CHECK(s.pass);
  ConvexHandle c{"const", 1, [](std::span<const double>) { return 2.0; }};
  auto k = barycenter_inequality_check(c, 0);
  CHECK(k.integral == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(barycenter_inequality_check(convex_softplus(1), 50).pass);
}

TEST_CASE("counterexample scan") {
  auto rows = counterexample_scan({-1.0, -5.0, -20.0}, kSpec);
  CHECK(rows[0].gap == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(rows[1].gap == doctest::Approx(10.0 / (4.0 + std::sqrt(6.0))).epsilon(1e-14));
  CHECK(rows[1].gap == doctest::Approx(1.550510257).epsilon(1e-9));
  CHECK(rows[2].gap == doctest::Approx(2.199754288).epsilon(1e-9));
  for (const auto& r : rows) {
    CHECK(std::abs(r.gap - r.gap_closed_form) <= 1e-12);
    CHECK(r.uo > 0.0);
    CHECK(r.mo_lower > 0.0);
  }
  CHECK(rows[2].uo > rows[1].uo);
  CHECK_THROWS_AS(counterexample_scan({-0.5}, kSpec), std::invalid_argument);
}

TEST_CASE("directional Lelong numbers") {
  auto r = log_spaced(0.5, 0.5, 6);
  auto f = catalog_lookup("m_log", {{"dim", "2"}});
  auto s1 = directional_lelong(f, {1.0, 1.0}, r, kSpec);
  CHECK(s1.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(s1.non_asymptotic);
  auto g = catalog_lookup("m_log", {{"m", "2"}});
  CHECK(directional_lelong(g, {1.0}, r, kSpec).slope == doctest::Approx(2.0).epsilon(1e-12));
  auto h = catalog_lookup("max_log", {{"m", "1;2"}});
  CHECK(directional_lelong(h, {1.0, 1.0}, r, kSpec).slope == doctest::Approx(1.0).epsilon(1e-12));
  // Anisotropic weights: sup of max(log|z1|, log|z2|) on P_{r^(1,2)} is log r.
  auto mx = catalog_lookup("max_log");
  CHECK(directional_lelong(mx, {2.0, 1.0}, r, kSpec).slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(directional_lelong(f, {1.0, 1.0}, {0.1, 0.05, 0.01}, kSpec), std::invalid_argument);
}

TEST_CASE("reduced disc sweep for log|z|") {
  CHECK(disc_log_uo(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  const double phi = (std::sqrt(5.0) - 1) / 2;
  CHECK(disc_log_uo(phi) == doctest::Approx(std::log((std::sqrt(5.0) + 1) / 2) + phi / 2).epsilon(1e-12));
  CHECK(disc_log_uo(2.0) == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  auto f = catalog_lookup("log_abs");
  for (double x : {0.3, 0.9, 1.0}) CHECK(disc_log_uo(x) == doctest::Approx(oscillation(f, make_disc(x, 1.0), kSpec).uo).epsilon(1e-8));
  CHECK_THROWS_AS(disc_log_uo(-0.1), std::invalid_argument);
}
