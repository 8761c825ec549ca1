#include "pshosc/osc.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pshosc/parallel.hpp"

namespace pshosc {

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr double kMoTolerance = 1e-8;

// Maximize h on [lo, hi] by golden-section search started from a bracket.
std::pair<double, double> golden_max(const std::function<double(double)>& h, double lo, double hi, int iters = 60) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = h(x1), f2 = h(x2);
  for (int k = 0; k < iters && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++k) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = h(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = h(x2);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

double oracle_tolerance(double closed) { return 1e-6 * std::max(1.0, std::abs(closed)); }

SupResult sup_torus(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec) {
  const std::size_t n = p.dim();
  const auto& c = p.center();
  const auto& r = p.radii();
  SupResult out;
  std::vector<Complex> z(n);
  if (f.meta().multicircular && p.centered_at_origin()) {
    for (std::size_t j = 0; j < n; ++j) z[j] = r[j];
    out.value = f(z);
    out.argmax = z;
    return out;
  }
  int m = spec.angular_nodes;
  while (m > 8 && std::pow(static_cast<double>(m), static_cast<double>(n)) > 65536.0) m /= 2;
  std::vector<int> idx(n, 0), best_idx(n, 0);
  double best = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (;;) {
    for (std::size_t j = 0; j < n; ++j) z[j] = c[j] + std::polar(r[j], 2.0 * M_PI * idx[j] / m);
    const double v = f(z);
    if (first || v > best) {
      best = v;
      best_idx = idx;
      first = false;
    }
    std::size_t k = n;
    while (k-- > 0) {
      if (++idx[k] < m) break;
      idx[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  std::vector<double> theta(n);
  for (std::size_t j = 0; j < n; ++j) theta[j] = 2.0 * M_PI * best_idx[j] / m;
  auto at = [&](const std::vector<double>& th) {
    for (std::size_t j = 0; j < n; ++j) z[j] = c[j] + std::polar(r[j], th[j]);
    return f(z);
  };
  double last_gain = best;
  double width = 2.0 * M_PI / m;
  for (int sweep = 0; sweep < 4; ++sweep) {
    const double before = best;
    for (std::size_t j = 0; j < n; ++j) {
      auto th = theta;
      auto [x, v] = golden_max(
          [&](double s) {
            th[j] = s;
            return at(th);
          },
          theta[j] - width, theta[j] + width);
      if (v > best) {
        best = v;
        theta[j] = x;
      }
    }
    width *= 0.5;
    last_gain = best - before;
  }
  for (std::size_t j = 0; j < n; ++j) z[j] = c[j] + std::polar(r[j], theta[j]);
  out.value = best;
  out.argmax = z;
  // Gain of the final coordinate sweep.
  out.error = std::max(last_gain, 1e-12 * std::max(1.0, std::abs(best)));
  return out;
}

// Full closed-polydisc search for functions without the maximum principle.
SupResult sup_solid(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec) {
  const std::size_t n = p.dim();
  const int radial = 8;
  int m = std::max(8, spec.angular_nodes / 2);
  while (m > 8 && std::pow(static_cast<double>(m * radial + 1), static_cast<double>(n)) > 2e5) m /= 2;
  std::vector<std::pair<double, double>> factor_pts{{0.0, 0.0}};
  for (int i = 1; i <= radial; ++i)
    for (int k = 0; k < m; ++k) factor_pts.push_back({static_cast<double>(i) / radial, 2.0 * M_PI * k / m});
  std::vector<std::size_t> idx(n, 0), best_idx(n, 0);
  std::vector<Complex> z(n);
  auto point = [&](const std::vector<double>& rho, const std::vector<double>& th) {
    for (std::size_t j = 0; j < n; ++j) z[j] = p.center()[j] + std::polar(rho[j] * p.radii()[j], th[j]);
    return f(z);
  };
  double best = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (;;) {
    for (std::size_t j = 0; j < n; ++j)
      z[j] = p.center()[j] + std::polar(factor_pts[idx[j]].first * p.radii()[j], factor_pts[idx[j]].second);
    const double v = f(z);
    if (first || v > best) {
      best = v;
      best_idx = idx;
      first = false;
    }
    std::size_t k = n;
    while (k-- > 0) {
      if (++idx[k] < factor_pts.size()) break;
      idx[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  std::vector<double> rho(n), th(n);
  for (std::size_t j = 0; j < n; ++j) {
    rho[j] = factor_pts[best_idx[j]].first;
    th[j] = factor_pts[best_idx[j]].second;
  }
  double last_gain = best;
  for (int sweep = 0; sweep < 4; ++sweep) {
    const double before = best;
    for (std::size_t j = 0; j < n; ++j) {
      auto r2 = rho;
      auto [x, v] = golden_max(
          [&](double s) {
            r2[j] = s;
            return point(r2, th);
          },
          std::max(0.0, rho[j] - 1.0 / radial), std::min(1.0, rho[j] + 1.0 / radial));
      if (v > best) {
        best = v;
        rho[j] = x;
      }
      auto t2 = th;
      auto [y, w] = golden_max(
          [&](double s) {
            t2[j] = s;
            return point(rho, t2);
          },
          th[j] - 2.0 * M_PI / m, th[j] + 2.0 * M_PI / m);
      if (w > best) {
        best = w;
        th[j] = y;
      }
    }
    last_gain = best - before;
  }
  SupResult out;
  out.value = point(rho, th);
  out.value = std::max(out.value, best);
  out.argmax = z;
  // Gain of the final coordinate sweep.
  out.error = std::max(last_gain, 1e-12 * std::max(1.0, std::abs(best)));
  return out;
}

SupResult sup_polydisc(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec) {
  SupResult num = f.is_psh() ? sup_torus(f, p, spec) : sup_solid(f, p, spec);
  if (f.meta().closed_sup_on_polydisc) {
    if (auto closed = f.meta().closed_sup_on_polydisc(p)) {
      if (!(std::abs(num.value - *closed) <= oracle_tolerance(*closed)))
        throw OracleViolation("sup_on_region(" + f.name() + "): closed form " + std::to_string(*closed) +
                              " disagrees with numerical maximum " + std::to_string(num.value));
      num.value = *closed;
      num.closed_form = true;
      num.error = 0.0;
    }
  }
  return num;
}

SupResult sup_segment(const PshFunction& f, const Segment& seg) {
  const int grid = 1024;
  std::vector<Complex> z(seg.dim());
  auto h = [&](double t) {
    seg.point_at(t, z);
    return f(z);
  };
  int best_i = 0;
  double best = h(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double v = h(static_cast<double>(i) / grid);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  const double grid_best = best;
  double best_t = static_cast<double>(best_i) / grid;
  auto [t, v] = golden_max(h, std::max(0.0, best_t - 1.0 / grid), std::min(1.0, best_t + 1.0 / grid), 80);
  if (v > best) {
    best = v;
    best_t = t;
  }
  SupResult out;
  seg.point_at(best_t, z);
  out.value = best;
  out.argmax = z;
  out.error = std::max(best - grid_best, 1e-12 * std::max(1.0, std::abs(best)));
  return out;
}

SupResult sup_polytope(const PshFunction& f, const ConvexPolytope& a, const QuadratureSpec& spec) {
  const std::size_t d = a.real_dim();
  auto value = [&](std::span<const double> x) {
    auto z = to_complex(x);
    return f(z);
  };
  std::vector<std::vector<double>> cand = a.vertices();
  const auto& v = a.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      for (int k = 1; k < 16; ++k) {
        std::vector<double> x(d);
        for (std::size_t q = 0; q < d; ++q) x[q] = v[i][q] + (v[j][q] - v[i][q]) * k / 16.0;
        cand.push_back(std::move(x));
      }
    }
  }
  for (auto& x : polytope_samples(a, std::min<std::int64_t>(spec.mc_samples / 4, 50000), spec.seed ^ 0x5u, 4))
    cand.push_back(std::move(x));
  std::vector<double> best_x = cand.front();
  double best = value(best_x);
  for (const auto& x : cand) {
    const double fx = value(x);
    if (fx > best) {
      best = fx;
      best_x = x;
    }
  }
  const double grid_best = best;

  // Direct search with moves clipped to the hull so it can slide along faces.
  double diam = 0.0;
  for (std::size_t q = 0; q < d; ++q) diam = std::max(diam, a.box_max()[q] - a.box_min()[q]);
  std::mt19937_64 rng(spec.seed ^ 0xA11CEu);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<double>> dirs;
  for (std::size_t q = 0; q < d; ++q) {
    std::vector<double> e(d, 0.0);
    e[q] = 1.0;
    dirs.push_back(e);
    e[q] = -1.0;
    dirs.push_back(e);
  }
  for (int k = 0; k < 8 + 4 * static_cast<int>(d); ++k) {
    std::vector<double> e(d);
    double nrm = 0.0;
    for (auto& x : e) {
      x = gauss(rng);
      nrm += x * x;
    }
    for (auto& x : e) x /= std::sqrt(nrm);
    dirs.push_back(e);
  }
  double step = 0.05 * diam;
  std::vector<double> trial(d);
  while (step > 1e-13 * std::max(1.0, diam)) {
    bool improved = false;
    for (const auto& e : dirs) {
      double s = step;
      if (a.full_dimensional()) s = std::min(s, a.ray_exit(best_x, e));
      if (s <= 0.0) continue;
      for (std::size_t q = 0; q < d; ++q) trial[q] = best_x[q] + s * e[q];
      if (!a.full_dimensional() && !a.contains(trial)) continue;
      const double ft = value(trial);
      if (ft > best) {
        best = ft;
        best_x = trial;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  SupResult out;
  out.value = best;
  out.argmax = to_complex(best_x);
  out.error = std::max(best - grid_best, 1e-12 * std::max(1.0, std::abs(best)));
  return out;
}

}  // namespace

SupResult sup_on_region(const PshFunction& f, const Region& s, const QuadratureSpec& spec) {
  if (f.dim() != region_dim(s)) throw std::invalid_argument("sup_on_region: dimension mismatch");
  if (const auto* p = std::get_if<Polydisc>(&s)) return sup_polydisc(f, *p, spec);
  if (const auto* b = std::get_if<AnisotropicBox>(&s)) return sup_polydisc(f, b->as_polydisc(), spec);
  if (const auto* seg = std::get_if<Segment>(&s)) return sup_segment(f, *seg);
  return sup_polytope(f, std::get<ConvexPolytope>(s), spec);
}

OscillationReport oscillation(const PshFunction& f, const Region& s, const QuadratureSpec& spec) {
  OscillationReport r;
  SupResult sup = sup_on_region(f, s, spec);
  IntegralResult mean = mean_over_region(f, s, spec);
  r.sup = sup.value;
  r.sup_error = sup.error;
  r.mean = mean.value;
  r.mean_error = mean.abs_error_estimate;
  r.uo = r.sup - r.mean;
  const double m = mean.value;
  const Evaluator& ev = f.evaluator();
  Integrand dev = [&ev, m](std::span<const Complex> z) {
    const double v = ev(z);
    return std::isinf(v) ? std::numeric_limits<double>::infinity() : std::abs(v - m);
  };
  // |f - mean| has a kink along a level curve; its integral is taken to a
  // looser tolerance than the mean itself.
  QuadratureSpec mo_spec = spec;
  mo_spec.target_rel_error = std::max(spec.target_rel_error, kMoTolerance);
  IntegralResult mo = mean_over_region(dev, s, mo_spec, f.meta().multicircular);
  r.mo = mo.value;
  r.mo_error = mo.abs_error_estimate + r.mean_error;
  r.converged = mean.converged && mo.converged && !mean.divergent && !mo.divergent;
  return r;
}

// ---------------------------------------------------------------------------

bool DecompositionReport::i1_bound_holds(double slack) const {
  return i1 <= std::pow(3.0, n) * j1 + slack + (1.0 + std::pow(3.0, n)) * tolerance;
}

bool DecompositionReport::i2_bound_holds(double slack) const { return i2 <= j2 + slack + tolerance; }

double boundary_mean(const PshFunction& f, const Polydisc& p, std::span<const double> t, const QuadratureSpec& spec) {
  return mean_over_shilov(f, p.log_shifted(t), spec).value;
}

DecompositionReport harnack_decomposition(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec) {
  if (f.dim() != p.dim()) throw std::invalid_argument("harnack_decomposition: dimension mismatch");
  DecompositionReport d;
  d.n = static_cast<int>(p.dim());
  SupResult sup = sup_on_region(f, p, spec);
  SupResult half = sup_on_region(f, p.scaled(0.5), spec);
  IntegralResult shilov = mean_over_shilov(f, p, spec);
  IntegralResult solid = mean_over_polydisc(f, p, spec);
  IntegralResult inner = mean_over_shilov(f, p.scaled(std::exp(-0.5)), spec);
  d.i1 = sup.value - shilov.value;
  d.i2 = shilov.value - solid.value;
  d.j1 = sup.value - half.value;
  d.j2 = shilov.value - inner.value;
  d.tolerance = sup.error + half.error + shilov.abs_error_estimate + solid.abs_error_estimate + inner.abs_error_estimate;
  d.converged = shilov.converged && solid.converged && inner.converged;
  if (!std::isfinite(d.tolerance))
    throw NumericalFailure("harnack_decomposition: no usable error estimate for " + f.name());
  return d;
}

LelongClassReport lelong_class_check(const PshFunction& f, const std::vector<Polydisc>& family,
                                     const QuadratureSpec& spec, std::uint64_t seed) {
  if (!f.meta().lelong_class_constant)
    throw std::invalid_argument("lelong_class_check: '" + f.name() + "' has no Lelong-class constant");
  const double c = *f.meta().lelong_class_constant;
  const std::size_t n = f.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(-3.0, 6.0), phase(0.0, 2.0 * M_PI);
  std::vector<Complex> z(n);
  for (int k = 0; k < 256; ++k) {
    double growth = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      z[j] = std::polar(std::pow(10.0, expo(rng)), phase(rng));
      growth = std::max(growth, std::log1p(std::abs(z[j])));
    }
    const double rhs = c + growth;
    if (f(z) > rhs + 1e-12 * std::max(1.0, std::abs(rhs)))
      throw std::invalid_argument("lelong_class_check: growth hypothesis fails for '" + f.name() + "'");
  }
  LelongClassReport rep;
  rep.bound = std::pow(3.0, static_cast<double>(n));
  rep.proof_bound = rep.bound * std::log(2.0) + 0.5;
  struct Member {
    double uo, error;
    bool converged;
  };
  const auto members = parallel_map<Member>(family.size(), [&](std::size_t i) {
    if (family[i].dim() != n) throw std::invalid_argument("lelong_class_check: polydisc dimension mismatch");
    const SupResult sup = sup_on_region(f, family[i], spec);
    const IntegralResult mean = mean_over_polydisc(f, family[i], spec);
    const double err = sup.error + mean.abs_error_estimate;
    if (!std::isfinite(err) || !std::isfinite(mean.value))
      throw NumericalFailure("lelong_class_check: quadrature did not converge");
    return Member{sup.value - mean.value, err, mean.converged};
  });
  rep.pass = true;
  for (const auto& m : members) {
    rep.uo.push_back(m.uo);
    rep.uo_error.push_back(m.error);
    rep.converged = rep.converged && m.converged;
    rep.pass = rep.pass && m.uo + m.error < rep.bound && m.uo + m.error <= rep.proof_bound + 1e-9;
  }
  rep.max_uo = rep.uo.empty() ? 0.0 : *std::max_element(rep.uo.begin(), rep.uo.end());
  return rep;
}

// ---------------------------------------------------------------------------
// Convex test functions

namespace {

double softplus(double t) { return t > 30.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

}  // namespace

ConvexHandle convex_max(std::size_t n) {
  return {"max", n, [](std::span<const double> t) { return *std::max_element(t.begin(), t.end()); }};
}

ConvexHandle convex_logsumexp(std::size_t n) {
  return {"logsumexp", n, [](std::span<const double> t) {
            const double m = *std::max_element(t.begin(), t.end());
            double s = 0.0;
            for (double x : t) s += std::exp(x - m);
            return m + std::log(s);
          }};
}

ConvexHandle convex_linear(std::vector<double> slopes) {
  for (double s : slopes)
    if (!(s >= 0.0)) throw std::invalid_argument("convex_linear: slopes must be non-negative");
  const std::size_t n = slopes.size();
  return {"linear", n, [slopes](std::span<const double> t) {
            double s = 0.0;
            for (std::size_t j = 0; j < slopes.size(); ++j) s += slopes[j] * t[j];
            return s;
          }};
}

ConvexHandle convex_lelong_max(std::size_t n) {
  return {"lelong_max", n, [](std::span<const double> t) {
            double m = -std::numeric_limits<double>::infinity();
            for (double x : t) m = std::max(m, softplus(x));
            return m;
          }};
}

ConvexHandle convex_softplus(std::size_t n) {
  return {"softplus", n, [](std::span<const double> t) { return softplus(t[0]); }};
}

ConvexHandle convex_boundary_mean(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec) {
  return {"boundary_mean:" + f.name(), p.dim(),
          [f, p, spec](std::span<const double> t) { return boundary_mean(f, p, t, spec); }};
}

GapReport convexity_gap_check(const ConvexHandle& g, GapKind kind, double param, int samples, std::uint64_t seed) {
  const std::size_t n = g.dim;
  if (samples < 1) throw std::invalid_argument("convexity_gap_check: samples must be >= 1");
  if (kind == GapKind::FiniteType && !(param >= 1.0))
    throw std::invalid_argument("convexity_gap_check: N must be >= 1");
  if (kind == GapKind::Lelong && !(param > 0.0)) throw std::invalid_argument("convexity_gap_check: M must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double shift = kind == GapKind::FiniteType ? 1.0 : param;
  std::vector<double> t(n), ts(n);
  auto gap_at = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) ts[j] = x[j] - shift;
    return g.g(x) - g.g(ts);
  };

  GapReport rep;
  if (kind == GapKind::FiniteType) {
    std::vector<double> ones(n, 1.0), zero(n, 0.0);
    rep.bound = static_cast<double>(n) * param * (g.g(ones) - g.g(zero));
  } else {
    rep.bound = param;
    const ConvexHandle cap = convex_lelong_max(n);
    std::uniform_real_distribution<double> box(-50.0, 50.0);
    for (int k = 0; k < 512; ++k) {
      for (auto& x : t) x = box(rng);
      if (g.g(t) > cap.g(t) + 1e-12 * std::max(1.0, std::abs(cap.g(t))))
        throw std::invalid_argument("convexity_gap_check: '" + g.name + "' exceeds max_j log(1 + e^{t_j})");
    }
  }
  rep.max_gap = -std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<double>& x) {
    const double v = gap_at(x);
    ++rep.samples;
    if (v > rep.max_gap) {
      rep.max_gap = v;
      rep.argmax = x;
    }
  };
  const int diagonal = std::max(1, samples / 8);
  for (int k = 0; k < diagonal; ++k) {
    // Diagonal points: -s(1,...,1) on a log grid, and the Lelong case also
    // scans positive s.
    const double s = std::pow(10.0, -2.0 + 4.0 * k / std::max(1, diagonal - 1));
    std::fill(t.begin(), t.end(), -s);
    consider(t);
    if (kind == GapKind::Lelong) {
      std::fill(t.begin(), t.end(), s);
      consider(t);
    }
  }
  for (int k = diagonal; k < samples; ++k) {
    if (kind == GapKind::FiniteType) {
      const double s = std::pow(10.0, -2.0 + 4.0 * unit(rng));
      for (auto& x : t) x = -s * (1.0 + (param - 1.0) * unit(rng));
    } else {
      for (auto& x : t) x = -30.0 + 60.0 * unit(rng);
    }
    consider(t);
  }
  rep.pass = rep.max_gap <= rep.bound + 1e-9 * std::max(1.0, std::abs(rep.bound));
  return rep;
}

BarycenterReport barycenter_inequality_check(const ConvexHandle& f, int trials, std::uint64_t seed) {
  if (f.dim != 1) throw std::invalid_argument("barycenter_inequality_check: function must be univariate");
  if (trials < 0) throw std::invalid_argument("barycenter_inequality_check: trials must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.2, 2.0), ub(-1.0, 1.0);
  AdaptiveOptions opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-12;
  BarycenterReport rep;
  rep.trials = trials;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= trials; ++k) {
    const double a = k == 0 ? 1.0 : ua(rng), b = k == 0 ? 0.0 : ub(rng), c = k == 0 ? 0.0 : ub(rng);
    auto h = [&](double t) {
      const double s = a * t + b;
      return f.g(std::span<const double>(&s, 1)) + c * t;
    };
    IntegralResult r = integrate_adaptive([&](double t) { return 2.0 * std::exp(2.0 * t) * h(t); }, -40.0, 0.0, opt);
    const double at = h(-0.5);
    if (k == 0) {
      rep.integral = r.value;
      rep.at_barycenter = at;
    }
    rep.min_gap = std::min(rep.min_gap, r.value - at + r.abs_error_estimate);
  }
  rep.pass = rep.min_gap >= -1e-10;
  return rep;
}

// ---------------------------------------------------------------------------

double counterexample_gap_formula(double x) { return (5.0 - x) / (std::sqrt(6.0 - 2.0 * x) + std::sqrt(1.0 - x)); }

std::vector<CounterexampleRow> counterexample_scan(const std::vector<double>& x_values, const QuadratureSpec& spec) {
  for (double x : x_values)
    if (!(x <= -1.0)) throw std::invalid_argument("counterexample_scan: x values must be <= -1");
  const PshFunction phi = catalog_lookup("counterexample");
  auto profile = [](double x, double y) { return -std::sqrt((x + y) * y); };
  return parallel_map<CounterexampleRow>(x_values.size(), [&](std::size_t i) {
    const double x = x_values[i];
    CounterexampleRow row;
    row.x = x;
    row.gap = profile(x, -1.0) - profile(x - 1.0, -2.0);
    row.gap_closed_form = counterexample_gap_formula(x);
    const Polydisc p(ComplexVector{0.0, 0.0}, {std::exp(x), std::exp(-1.0)});
    auto uo_of = [&](const Polydisc& q, double& err) {
      const SupResult sup = sup_on_region(phi, q, spec);
      const IntegralResult mean = mean_over_polydisc(phi, q, spec);
      if (!mean.converged) throw NumericalFailure("counterexample_scan: quadrature did not converge");
      err = sup.error + mean.abs_error_estimate;
      return sup.value - mean.value;
    };
    row.uo = uo_of(p, row.uo_error);
    row.mo_lower = std::exp(-2.0) * uo_of(p.scaled(std::exp(-0.5)), row.mo_lower_error);
    row.mo_lower_error *= std::exp(-2.0);
    return row;
  });
}

// ---------------------------------------------------------------------------

double disc_log_uo(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("disc_log_uo: x must be finite and >= 0");
  auto g = [x](double c) { return c == 0.0 ? 0.0 : 2.0 * c * std::log(std::max(x, c)); };
  const double k = std::min(x, 1.0);
  double mean = 0.0;
  if (k > 0.0) mean += integrate_adaptive(g, 0.0, k).value;
  if (k < 1.0) mean += integrate_adaptive(g, k, 1.0).value;
  return std::log1p(x) - mean;
}

std::vector<double> log_spaced(double r_max, double ratio, int count) {
  std::vector<double> r;
  for (int k = 0; k < count; ++k) r.push_back(r_max * std::pow(ratio, k));
  return r;
}

SlopeFit fit_log_slope(const std::vector<double>& r, const std::vector<double>& y) {
  if (r.size() != y.size() || r.size() < 2) throw std::invalid_argument("fit_log_slope: need matching samples");
  const double m = static_cast<double>(r.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = std::log(r[i]);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  SlopeFit fit;
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double e = y[i] - (fit.slope * std::log(r[i]) + fit.intercept);
    ss += e * e;
  }
  fit.residual_rms = std::sqrt(ss / m);
  fit.r_values = r;
  fit.y_values = y;
  fit.non_asymptotic = fit.residual_rms > 0.05 * std::abs(fit.slope);
  return fit;
}

SlopeFit directional_lelong(const PshFunction& f, const std::vector<double>& a, const std::vector<double>& r_grid,
                            const QuadratureSpec& spec) {
  if (a.size() != f.dim()) throw std::invalid_argument("directional_lelong: exponent count must equal dimension");
  if (r_grid.size() < 4) throw std::invalid_argument("directional_lelong: need at least 4 radii");
  for (double r : r_grid)
    if (!(r > 0.0 && r <= 0.5)) throw std::invalid_argument("directional_lelong: radii must lie in (0, 0.5]");
  std::vector<double> y = parallel_map<double>(r_grid.size(), [&](std::size_t i) {
    AnisotropicBox box(ComplexVector::zeros(f.dim()), r_grid[i], a);
    return sup_on_region(f, box, spec).value;
  });
  return fit_log_slope(r_grid, y);
}

}  // namespace pshosc
