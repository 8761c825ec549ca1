#include "pshosc/gammaremez.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pshosc/osc.hpp"
#include "pshosc/parallel.hpp"

namespace pshosc {

namespace {

double gamma_equation(double g) { return g + std::log(g - 1.0); }

}  // namespace

GammaResult gamma_constant(double tol) {
  if (!(tol >= 1e-14)) throw std::invalid_argument("gamma_constant: tol must be at least 1e-14");
  GammaResult r;
  double lo = 1.0 + 1e-9, hi = 2.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (gamma_equation(mid) < 0.0 ? lo : hi) = mid;
    ++r.iterations;
  }
  double g = 0.5 * (lo + hi);
  for (int k = 0; k < 3; ++k) {
    const double step = gamma_equation(g) / (1.0 + 1.0 / (g - 1.0));
    g -= step;
    ++r.iterations;
    if (std::abs(step) < 1e-17) break;
  }
  r.gamma = g;
  r.a0 = 1.0 - g;
  r.residual = std::abs(gamma_equation(g));
  return r;
}

const GammaResult& cached_gamma() {
  static const GammaResult g = gamma_constant(1e-14);
  return g;
}

double uo_segment_log_real(double a) {
  if (!(a >= -1.0 && a < 1.0)) throw std::invalid_argument("uo_segment_log_real: a must lie in [-1, 1)");
  if (a == 0.0) return 1.0;
  return 1.0 + a * std::log(std::abs(a)) / (1.0 - a);
}

double uo_segment_log(Complex a, Complex b, const QuadratureSpec& spec) {
  if (a == b) throw std::invalid_argument("uo_segment_log: degenerate segment");
  if (std::abs(a) > std::abs(b)) std::swap(a, b);
  // Rotate and scale so that b = 1; log|z| only shifts by a constant.
  const Complex r = a / b;
  if (std::abs(r.imag()) <= 1e-14) return uo_segment_log_real(std::clamp(r.real(), -1.0, std::nextafter(1.0, 0.0)));
  auto logabs = [](std::span<const Complex> z) { return std::log(std::abs(z[0])); };
  const IntegralResult m = mean_over_segment(logabs, Segment(r, Complex(1.0)), spec);
  if (!m.converged) throw NumericalFailure("uo_segment_log: segment quadrature did not converge");
  return -m.value;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string fmt(Complex z) { return fmt(z.real()) + (z.imag() < 0 ? "" : "+") + fmt(z.imag()) + "i"; }

std::string fmt(const ComplexVector& v) {
  std::string s = "(";
  for (std::size_t j = 0; j < v.dim(); ++j) s += (j ? "," : "") + fmt(v[j]);
  return s + ")";
}

std::string region_id(const Region& s) {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Segment>) {
          return "segment[" + fmt(r.a()) + "," + fmt(r.b()) + "]";
        } else if constexpr (std::is_same_v<T, ConvexPolytope>) {
          return "polytope(" + std::to_string(r.vertices().size()) + " vertices in R^" + std::to_string(r.real_dim()) +
                 ")";
        } else if constexpr (std::is_same_v<T, Polydisc>) {
          std::string s = "polydisc" + fmt(r.center()) + " r=(";
          for (std::size_t j = 0; j < r.dim(); ++j) s += (j ? "," : "") + fmt(r.radii()[j]);
          return s + ")";
        } else {
          return region_kind(Region(r));
        }
      },
      s);
}

Complex random_in_disc(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(radius * std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
}

std::vector<Complex> random_unit(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<Complex> w(n);
  double norm = 0.0;
  for (auto& c : w) {
    c = Complex(g(rng), g(rng));
    norm += std::norm(c);
  }
  for (auto& c : w) c /= std::sqrt(norm);
  return w;
}

ConvexPolytope random_polytope(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t d = 2 * n;
  std::uniform_int_distribution<int> count(static_cast<int>(d) + 1, static_cast<int>(d) + 5);
  for (;;) {
    std::vector<std::vector<double>> v(static_cast<std::size_t>(count(rng)), std::vector<double>(d));
    for (auto& x : v)
      for (auto& c : x) c = u(rng);
    ConvexPolytope a(std::move(v));
    if (!a.full_dimensional()) continue;
    // Keep hulls that fill a reasonable share of their bounding box.
    std::int64_t drawn = 0;
    const auto hits = polytope_samples(a, 20000, rng(), 1, &drawn);
    if (hits.size() * 100 >= static_cast<std::size_t>(drawn)) return a;
  }
}

Polynomial random_polynomial(std::mt19937_64& rng, std::size_t n, const std::vector<Complex>& centroid, int deg_max) {
  std::uniform_int_distribution<int> deg(1, deg_max);
  int remaining = deg(rng);
  std::vector<LinearFactor> factors;
  while (remaining > 0) {
    std::uniform_int_distribution<int> mult(1, std::min(3, remaining));
    const int m = mult(rng);
    remaining -= m;
    LinearFactor f;
    f.direction = n == 1 ? std::vector<Complex>{1.0} : random_unit(rng, n);
    f.multiplicity = m;
    // The zero set passes through a point within distance 2 of the centroid.
    const std::vector<Complex> dir = random_unit(rng, n);
    const double rho = 2.0 * std::sqrt(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    for (std::size_t j = 0; j < n; ++j) f.root += f.direction[j] * (centroid[j] + rho * dir[j]);
    factors.push_back(std::move(f));
  }
  return Polynomial(n, random_in_disc(rng, 1.0) + Complex(0.5, 0.0), std::move(factors));
}

}  // namespace

RemezReport remez_check(const Polynomial& p, const Region& a, const QuadratureSpec& spec) {
  if (p.degree() < 1) throw std::invalid_argument("remez_check: degree must be at least 1");
  if (p.lead() == Complex{}) throw std::invalid_argument("remez_check: polynomial vanishes identically");
  if (std::holds_alternative<AnisotropicBox>(a)) throw std::invalid_argument("remez_check: unsupported region kind");
  const PshFunction f = log_poly_function(p);
  const SupResult sup = sup_on_region(f, a, spec);
  const IntegralResult mean = mean_over_region(f, a, spec);
  if (!mean.converged) throw NumericalFailure("remez_check: mean did not converge on " + region_id(a));
  RemezReport r;
  r.polynomial_id = p.describe();
  r.region_id = region_id(a);
  r.degree = p.degree();
  r.uo = sup.value - mean.value;
  r.uo_error = sup.error + mean.abs_error_estimate;
  r.ratio = r.uo / r.degree;
  r.pass = r.ratio <= cached_gamma().gamma + kRemezTolerance;
  return r;
}

std::vector<RemezReport> remez_sweep(int count, std::uint64_t seed, int deg_max, const QuadratureSpec& spec) {
  if (count < 0 || deg_max < 1) throw std::invalid_argument("remez_sweep: need count >= 0 and deg_max >= 1");
  spec.validate();
  return parallel_map<RemezReport>(static_cast<std::size_t>(count), [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    const std::size_t n = 1 + rng() % 3;
    const int kinds = n == 1 ? 3 : n == 2 ? 2 : 1;
    const int kind = static_cast<int>(rng() % kinds);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::optional<Region> region;
    std::vector<Complex> centroid(n);
    if (kind == 0) {
      std::vector<Complex> a(n), b(n);
      for (std::size_t j = 0; j < n; ++j) {
        a[j] = Complex(u(rng), u(rng));
        b[j] = Complex(u(rng), u(rng));
        centroid[j] = 0.5 * (a[j] + b[j]);
      }
      region = Segment(ComplexVector(a), ComplexVector(b));
    } else if (kind == 1) {
      ConvexPolytope poly = random_polytope(rng, n);
      centroid = to_complex(poly.vertex_centroid());
      region = std::move(poly);
    } else {
      const Complex c(u(rng), u(rng));
      const double radius = std::pow(10.0, std::uniform_real_distribution<double>(-1.0, 0.5)(rng));
      centroid[0] = c;
      region = make_disc(c, radius);
    }
    const Polynomial p = random_polynomial(rng, n, centroid, deg_max);
    QuadratureSpec local = spec;
    local.seed = spec.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
    return remez_check(p, *region, local);
  });
}

std::vector<RemezReport> remez_sharpness(const QuadratureSpec& spec, int grid) {
  if (grid < 1) throw std::invalid_argument("remez_sharpness: grid must be positive");
  const double a0 = cached_gamma().a0;
  struct Case {
    std::vector<Complex> w;
    Complex c;
    double scale;
    double theta;
    int m;
  };
  const std::vector<Case> cases{{{1.0}, 0.0, 1.0, 0.0, 1},
                                {{1.0}, Complex(0.3, -0.2), 2.5, 1.1, 2},
                                {{Complex(0.6, 0.0), Complex(0.0, 0.8)}, Complex(-1.0, 0.5), 0.7, -2.0, 3}};
  std::vector<std::pair<std::size_t, double>> jobs;
  for (std::size_t k = 0; k < cases.size(); ++k)
    for (int g = 0; g < grid; ++g) {
      const double offset = grid == 1 ? 0.0 : 0.1 * (static_cast<double>(g) / (grid - 1) - 0.5);
      jobs.emplace_back(k, a0 + offset);
    }
  return parallel_map<RemezReport>(jobs.size(), [&](std::size_t i) {
    const Case& cs = cases[jobs[i].first];
    const double a = jobs[i].second;
    const std::size_t n = cs.w.size();
    double wn = 0.0;
    for (auto x : cs.w) wn += std::norm(x);
    // Points z with w . z = value along the direction conj(w).
    auto lift = [&](Complex value) {
      std::vector<Complex> z(n);
      for (std::size_t j = 0; j < n; ++j) z[j] = std::conj(cs.w[j]) * value / wn;
      return ComplexVector(std::move(z));
    };
    const Complex e = std::polar(cs.scale, cs.theta);
    const Segment seg(lift(cs.c + a * e), lift(cs.c + e));
    const Polynomial p(n, 1.0, {{cs.w, cs.c, cs.m}});
    return remez_check(p, seg, spec);
  });
}

// ---------------------------------------------------------------------------

RayRow audit_ray(const Polynomial& p, const ConvexPolytope& a, std::span<const double> z0, std::span<const double> v,
                 const QuadratureSpec& spec) {
  if (z0.size() != a.real_dim() || v.size() != a.real_dim())
    throw std::invalid_argument("audit_ray: dimension mismatch");
  RayRow row;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw std::invalid_argument("audit_ray: zero direction");
  row.direction.resize(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) row.direction[k] = v[k] / norm;
  row.length = a.ray_exit(z0, row.direction);
  if (!(row.length > 0.0)) throw std::invalid_argument("audit_ray: direction leaves the polytope at z0");
  std::vector<double> end(z0.begin(), z0.end());
  for (std::size_t k = 0; k < end.size(); ++k) end[k] += row.length * row.direction[k];
  const std::vector<Complex> start_c = to_complex(z0), end_c = to_complex(end);
  const Segment seg{ComplexVector(start_c), ComplexVector(end_c)};
  const PshFunction f = log_poly_function(p);
  const SupResult sup = sup_on_region(f, seg, spec);
  const IntegralResult mean = mean_over_segment(f, seg, spec);
  if (!mean.converged) throw NumericalFailure("audit_ray: segment quadrature did not converge");
  row.sup_on_ray = sup.value;
  row.sup_gap = sup.value - p.log_abs(start_c);
  row.uo = sup.value - mean.value;
  row.ratio = row.uo / p.degree();
  return row;
}

RayAudit ray_decomposition_audit(const Polynomial& p, const ConvexPolytope& a, int rays, const QuadratureSpec& spec,
                                 std::uint64_t seed) {
  if (!a.full_dimensional()) throw std::invalid_argument("ray_decomposition_audit: polytope must be full-dimensional");
  if (p.dim() != a.dim()) throw std::invalid_argument("ray_decomposition_audit: dimension mismatch");
  if (p.degree() < 1) throw std::invalid_argument("ray_decomposition_audit: degree must be at least 1");
  if (rays < 1) throw std::invalid_argument("ray_decomposition_audit: need at least one ray");
  RayAudit out;
  out.degree = p.degree();
  const SupResult sup = sup_on_region(log_poly_function(p), a, spec);
  out.z0 = to_real(sup.argmax);
  out.sup = sup.value;
  // Rays aim at seeded points of A, so every ray starts into the polytope.
  std::vector<std::vector<double>> targets;
  for (std::int64_t draw = 4 * static_cast<std::int64_t>(rays);
       targets.size() < static_cast<std::size_t>(rays) && draw <= (std::int64_t{1} << 26); draw *= 4) {
    targets = polytope_samples(a, draw, seed, 1);
    targets.erase(std::remove_if(targets.begin(), targets.end(),
                                 [&](const std::vector<double>& x) {
                                   double d = 0.0;
                                   for (std::size_t k = 0; k < x.size(); ++k) d += std::pow(x[k] - out.z0[k], 2);
                                   return d < 1e-12;
                                 }),
                  targets.end());
  }
  if (targets.size() > static_cast<std::size_t>(rays)) targets.resize(static_cast<std::size_t>(rays));
  out.rays = parallel_map<RayRow>(targets.size(), [&](std::size_t i) {
    std::vector<double> v(targets[i].size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = targets[i][k] - out.z0[k];
    return audit_ray(p, a, out.z0, v, spec);
  });
  for (const auto& r : out.rays) {
    out.max_ratio = std::max(out.max_ratio, r.ratio);
    out.max_sup_gap = std::max(out.max_sup_gap, r.sup_gap);
  }
  const RemezReport whole = remez_check(p, a, spec);
  out.region_uo = whole.uo;
  out.region_ratio = whole.ratio;
  out.pass = !out.rays.empty() && out.max_ratio <= cached_gamma().gamma + kRemezTolerance &&
             out.max_sup_gap <= kRaySupTolerance;
  return out;
}

}  // namespace pshosc
