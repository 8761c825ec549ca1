#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pshosc/bergman.hpp"

using namespace pshosc;

namespace {

const QuadratureSpec kSpec{};

Polydisc unit(std::size_t n) { return Polydisc(ComplexVector::zeros(n), std::vector<double>(n, 1.0)); }

PshFunction quad_diag(std::vector<double> d) {
  std::string s;
  for (std::size_t j = 0; j < d.size(); ++j) s += (j ? ";" : "") + std::to_string(d[j]);
  return catalog_lookup("quadratic", {{"diag", s}});
}

// Seeded multicircular weights: sum_j c_j |z_j|^2 + b log(1 + |z_1|^2).
PshFunction random_circular(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::vector<double> c(n);
  for (auto& x : c) x = u(rng);
  const double b = u(rng);
  FunctionMeta meta;
  meta.multicircular = true;
  return PshFunction("circ", n,
                     [c, b](std::span<const Complex> z) {
                       double s = b * std::log1p(std::norm(z[0]));
                       for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * std::norm(z[j]);
                       return s;
                     },
                     meta);
}

}  // namespace

TEST_CASE("classical kernels") {
  auto zero = make_weight(catalog_lookup("constant", {{"value", "0"}}), 1.0);
  auto c = bergman_origin(zero, unit(1), kSpec, BergmanMethod::Circular);
  auto g = bergman_origin(zero, unit(1), kSpec, BergmanMethod::Gram);
  CHECK(c.value == doctest::Approx(1 / M_PI).epsilon(1e-12));
  CHECK(g.value == doctest::Approx(1 / M_PI).epsilon(1e-12));
  CHECK(g.truncation_degree == 4);
  CHECK(g.convergence_gap < 1e-12);
  CHECK(std::abs(g.section[0] - 1.0) < 1e-12);
  for (std::size_t b = 1; b < g.section.size(); ++b) CHECK(std::abs(g.section[b]) < 1e-12);

  auto sq = make_weight(quad_diag({1.0}), 1.0);
  const double oracle = 1 / (M_PI * (1 - std::exp(-1.0)));
  CHECK(oracle == doctest::Approx(0.503559).epsilon(1e-6));
  CHECK(bergman_origin(sq, unit(1), kSpec).value == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(bergman_origin(sq, unit(1), kSpec, BergmanMethod::Gram).value == doctest::Approx(oracle).epsilon(1e-10));

  auto two = make_weight(quad_diag({1.0, 1.0}), 1.0);
  CHECK(bergman_origin(two, unit(2), kSpec).value == doctest::Approx(oracle * oracle).epsilon(1e-10));
}

TEST_CASE("Gram moments on the disc at degree 2") {
  // With phi = 0 the Gram matrix is diag(pi, pi/2, pi/3); the section reproduces
  // the constant 1/pi and nothing else.
  auto zero = make_weight(catalog_lookup("constant", {{"value", "0"}}), 0.0);
  QuadratureSpec s = kSpec;
  s.target_rel_error = 1.0;  // stop at the first degree pair
  auto g = bergman_origin(zero, unit(1), s, BergmanMethod::Gram);
  CHECK(g.basis.size() == 5);
  CHECK(g.value == doctest::Approx(1 / M_PI).epsilon(1e-13));
  CHECK(g.condition_estimate == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("multicircular flag is spot-checked") {
  CHECK_FALSE(make_weight(catalog_lookup("re_z"), 1.0).multicircular);
  FunctionMeta meta;
  meta.multicircular = true;
  PshFunction liar("liar", 1, [](std::span<const Complex> z) { return z[0].real(); }, meta);
  CHECK_THROWS_AS(make_weight(liar, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_weight(quad_diag({1.0}), -1.0), std::invalid_argument);
  CHECK_FALSE(make_weight(catalog_lookup("quadratic", {{"c", "1;1;1;1"}}), 1.0).multicircular);
}

TEST_CASE("circular and Gram agree on multicircular weights") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.3, 1.0), e(0.2, 1.5);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 1 + k % 2;
    auto w = make_weight(random_circular(rng, n), e(rng));
    std::vector<double> radii(n);
    for (auto& x : radii) x = r(rng);
    Polydisc p(ComplexVector::zeros(n), radii);
    auto c = bergman_origin(w, p, kSpec, BergmanMethod::Circular);
    auto g = bergman_origin(w, p, kSpec, BergmanMethod::Gram);
    CHECK_FALSE(g.flagged);
    CHECK(std::abs(g.value - c.value) / c.value <= 1e-6);
  }
}

TEST_CASE("reproducing property of the Gram section") {
  auto w = make_weight(catalog_lookup("quadratic", {{"c", "1;1;1;1"}}), 1.0);
  Polydisc p(ComplexVector::zeros(2), {0.7, 0.5});
  auto g = bergman_origin(w, p, kSpec, BergmanMethod::Gram);
  CHECK_FALSE(g.flagged);
  CHECK(g.section[0].real() == doctest::Approx(g.value * M_PI * M_PI * 0.49 * 0.25).epsilon(1e-12));
  auto k = [&](std::span<const Complex> z) {
    Complex s = 0;
    for (std::size_t b = 0; b < g.basis.size(); ++b)
      s += g.section[b] * std::pow(z[0] / 0.7, g.basis[b][0]) * std::pow(z[1] / 0.5, g.basis[b][1]);
    return s;
  };
  for (std::size_t b : {0, 1, 4, 7}) {
    auto part = [&](bool imag) {
      return [&, imag](std::span<const Complex> z) {
        const Complex m = std::pow(z[0] / 0.7, g.basis[b][0]) * std::pow(z[1] / 0.5, g.basis[b][1]) *
                          std::conj(k(z)) * std::exp(-w.phi(z));
        return imag ? m.imag() : m.real();
      };
    };
    const double re = mean_over_polydisc(part(false), p, kSpec).value;
    const double im = mean_over_polydisc(part(true), p, kSpec).value;
    CHECK(re == doctest::Approx(b == 0 ? 1.0 : 0.0).epsilon(1e-8));
    CHECK(std::abs(im) < 1e-8);
  }
}

TEST_CASE("F through the shrunk polydisc") {
  auto zero = make_weight(catalog_lookup("constant", {{"value", "0"}}), 1.0);
  for (double t : {0.01, 0.3, 0.9}) CHECK(F_eval(zero, std::vector<Complex>{t}, kSpec) == doctest::Approx(-std::log(M_PI)));
  auto sq = make_weight(quad_diag({1.0}), 1.0);
  for (Complex t : {Complex(0.1), Complex(0.3, 0.4), Complex(0, -0.95)}) {
    const double s = std::norm(t);
    CHECK(F_eval(sq, std::vector<Complex>{t}, kSpec) ==
          doctest::Approx(std::log(s / -std::expm1(-s)) - std::log(M_PI)).epsilon(1e-12));
  }
  // Close to the boundary F approaches log K on the unit disc.
  const double near = F_eval(sq, std::vector<Complex>{1 - 1e-9}, kSpec);
  CHECK(near == doctest::Approx(std::log(bergman_origin(sq, unit(1), kSpec).value)).epsilon(1e-8));
  CHECK_THROWS_AS(F_eval(sq, std::vector<Complex>{0.0}, kSpec), std::invalid_argument);
  CHECK_THROWS_AS(F_eval(sq, std::vector<Complex>{1.0}, kSpec), std::invalid_argument);
}

TEST_CASE("scaling identity against a direct solve") {
  std::vector<PshFunction> fs{catalog_lookup("quadratic", {{"c", "1;1;1;1"}}), quad_diag({1.0, 4.0})};
  for (const auto& phi : fs) {
    auto w = make_weight(phi, 1.0);
    for (std::vector<Complex> t : {std::vector<Complex>{0.5, Complex(0, 0.3)}, {Complex(0.8, 0.1), 0.6}}) {
      auto direct = bergman_origin(make_weight(dilate(phi, t), 1.0), unit(2), kSpec, BergmanMethod::Gram);
      CHECK(std::log(direct.value) == doctest::Approx(F_eval(w, t, kSpec)).epsilon(1e-6));
    }
  }
}

TEST_CASE("sandwich bounds") {
  auto zero = make_weight(catalog_lookup("constant", {{"value", "0"}}), 1.0);
  auto zero2 = make_weight(catalog_lookup("constant", {{"value", "0"}, {"dim", "2"}}), 1.0);
  auto s0 = sandwich_check(zero2, unit(2), kSpec);
  CHECK(s0.lower == doctest::Approx(1.0));
  CHECK(s0.middle == doctest::Approx(1.0));
  CHECK(s0.pass);

  auto sq = make_weight(quad_diag({1.0}), 1.0);
  auto s1 = sandwich_check(sq, unit(1), kSpec);
  CHECK(s1.middle == doctest::Approx(1 / (std::exp(1.0) - 1)).epsilon(1e-10));
  CHECK(s1.lower == doctest::Approx(s1.middle).epsilon(1e-10));
  CHECK(s1.pass);

  std::mt19937_64 rng(20);
  for (int k = 0; k < 20; ++k) {
    auto w = make_weight(random_circular(rng, 1 + k % 2), 1.0);
    CHECK(sandwich_check(w, unit(w.phi.dim()), kSpec).pass);
  }
  auto g = make_weight(catalog_lookup("quadratic", {{"c", "1;1;1;1"}}), 0.7);
  auto sg = sandwich_check(g, Polydisc(ComplexVector::zeros(2), {0.8, 0.6}), kSpec);
  CHECK(sg.pass);
  CHECK(sg.lower < sg.middle);
}

TEST_CASE("sharp Ohsawa-Takegoshi bound") {
  auto zero = make_weight(catalog_lookup("constant", {{"value", "0"}}), 1.0);
  CHECK(std::abs(ot_check(zero, kSpec).margin) < 1e-12);
  auto sq = make_weight(quad_diag({1.0}), 1.0);
  CHECK(ot_check(sq, kSpec).margin == doctest::Approx(0.185249).epsilon(1e-5));
  auto two = make_weight(quad_diag({1.0, 1.0}), 1.0);
  const double k1 = 1 / (M_PI * (1 - std::exp(-1.0)));
  CHECK(ot_check(two, kSpec).margin == doctest::Approx(k1 * k1 - 1 / (M_PI * M_PI)).epsilon(1e-9));
  auto mixed = make_weight(catalog_lookup("quadratic", {{"c", "1;1;1;1"}}), 1.0);
  CHECK(ot_check(mixed, kSpec).pass);
  auto log_w = make_weight(catalog_lookup("m_log", {{"m", "2"}}), 0.5);
  auto r = ot_check(log_w, kSpec);
  CHECK(r.bound == 0.0);
  CHECK(r.kernel == doctest::Approx(1 / (2 * M_PI)).epsilon(1e-9));
}

TEST_CASE("monotonicity of F in |t|") {
  std::vector<std::vector<double>> path;
  for (int k = 1; k <= 9; ++k) path.push_back({0.1 * k});
  auto zero = make_weight(catalog_lookup("constant", {{"value", "0"}}), 1.0);
  auto r0 = monotonicity_check(zero, path, kSpec);
  for (double f : r0.f_values) CHECK(f == doctest::Approx(-std::log(M_PI)));
  CHECK(r0.pass);
  auto sq = monotonicity_check(make_weight(quad_diag({1.0}), 1.0), path, kSpec);
  CHECK(sq.pass);
  CHECK(sq.f_values.front() > -std::log(M_PI));
  auto lg = monotonicity_check(make_weight(catalog_lookup("m_log", {{"m", "2"}}), 0.5), path, kSpec);
  CHECK(lg.pass);
  for (std::size_t i = 0; i < path.size(); ++i)
    CHECK(lg.f_values[i] == doctest::Approx(std::log(path[i][0] / 2) - std::log(M_PI)).epsilon(1e-9));
  CHECK_THROWS_AS(monotonicity_check(zero, {{0.5}, {0.4}}, kSpec), std::invalid_argument);
}

TEST_CASE("Hessian limit") {
  const std::vector<double> h{0.2, 0.1, 0.05};
  auto one = hessian_limit_check(make_weight(quad_diag({1.0}), 1.0), h, kSpec);
  CHECK(one.extrapolated(0, 0).real() == doctest::Approx(0.5).epsilon(0.02));
  CHECK(one.max_abs_dev < 1e-4);
  CHECK(one.observed_order > 1.8);
  // F = s/2 - s^2/24 + O(s^3) with s = |t|^2, so the stencil gives 1/2 - h^2/24 + O(h^4).
  CHECK(one.levels[0].matrix(0, 0).real() == doctest::Approx(0.5 - 0.04 / 24).epsilon(1e-4));

  auto two = hessian_limit_check(make_weight(quad_diag({1.0, 4.0}), 1.0), h, kSpec);
  CHECK(two.extrapolated(0, 0).real() == doctest::Approx(0.5).epsilon(0.02));
  CHECK(two.extrapolated(1, 1).real() == doctest::Approx(2.0).epsilon(0.02));
  CHECK(std::abs(two.extrapolated(0, 1)) < 1e-8);
  CHECK(two.hermitian_defect < 1e-8);

  auto mixed = hessian_limit_check(make_weight(catalog_lookup("quadratic", {{"c", "1;1;1;1"}}), 1.0), h, kSpec);
  CHECK(std::abs(mixed.extrapolated(0, 1)) < 0.05);
  CHECK(mixed.extrapolated(0, 0).real() == doctest::Approx(0.5).epsilon(0.02));
  CHECK(mixed.hermitian_defect < 1e-8);
  CHECK_THROWS_AS(hessian_limit_check(make_weight(quad_diag({1.0}), 1.0), {1e-4}, kSpec), std::invalid_argument);
  CHECK_THROWS_AS(hessian_limit_check(make_weight(catalog_lookup("m_log"), 1.0), h, kSpec), std::invalid_argument);
}

TEST_CASE("Lelong numbers are preserved") {
  const auto r = log_spaced(0.5, 0.5, 6);
  auto a = lelong_preservation_check(catalog_lookup("m_log", {{"m", "2"}}), {1.0}, {0.9, 0.5, 0.25}, r, kSpec);
  CHECK(a.rhs.slope == doctest::Approx(2.0).epsilon(1e-12));
  for (const auto& f : a.lhs) CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(a.eps_used == 0.9);

  auto b = lelong_preservation_check(catalog_lookup("m_log", {{"dim", "2"}}), {1.0, 1.0}, {0.5}, r, kSpec);
  CHECK(b.lhs[0].slope == doctest::Approx(1.0).epsilon(1e-8));
  auto c = lelong_preservation_check(catalog_lookup("max_log"), {1.0, 1.0}, {0.5}, r, kSpec);
  CHECK(c.lhs[0].slope == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(c.agrees[0]);

  auto d = lelong_preservation_check(catalog_lookup("m_log", {{"m", "2"}}), {1.0}, {1.2, 0.5}, r, kSpec);
  CHECK_FALSE(d.agrees[0]);
  CHECK(d.agrees[1]);
  CHECK(d.eps_used == 0.5);
  auto e = lelong_preservation_check(catalog_lookup("m_log", {{"m", "2"}}), {1.0}, {1.5}, r, kSpec);
  CHECK(e.flagged);
}
