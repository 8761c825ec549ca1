#include "pshosc/bergman.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "pshosc/parallel.hpp"

namespace pshosc {

std::string method_name(BergmanMethod m) {
  switch (m) {
    case BergmanMethod::Auto: return "auto";
    case BergmanMethod::Circular: return "circular";
    case BergmanMethod::Gram: return "gram";
  }
  return "unknown";
}

WeightSpec make_weight(const PshFunction& phi, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("weight: epsilon must be >= 0");
  WeightSpec w{phi, epsilon, phi.meta().multicircular};
  if (!w.multicircular) return w;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mod(0.05, 0.95), ang(0.0, 2.0 * M_PI);
  const std::size_t n = phi.dim();
  std::vector<Complex> z(n), zr(n);
  for (int k = 0; k < 16; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      z[j] = std::polar(mod(rng), ang(rng));
      zr[j] = z[j] * std::polar(1.0, ang(rng));
    }
    const double a = phi(z), b = phi(zr);
    if (!(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a))))
      throw std::invalid_argument("weight: '" + phi.name() + "' is flagged multicircular but depends on phases");
  }
  return w;
}

PshFunction dilate(const PshFunction& phi, std::span<const Complex> t) {
  if (t.size() != phi.dim()) throw std::invalid_argument("dilate: dimension mismatch");
  std::vector<Complex> tv(t.begin(), t.end());
  FunctionMeta meta;
  meta.multicircular = phi.meta().multicircular;
  Evaluator eval = [phi, tv](std::span<const Complex> z) {
    std::vector<Complex> tz(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) tz[j] = tv[j] * z[j];
    return phi(tz);
  };
  return PshFunction(phi.name() + "^t", phi.dim(), eval, std::move(meta), phi.is_psh());
}

namespace {

double polydisc_volume_log(const Polydisc& p) {
  double v = 0.0;
  for (double r : p.radii()) v += std::log(M_PI * r * r);
  return v;
}

void require_origin(const Polydisc& p) {
  for (std::size_t j = 0; j < p.dim(); ++j)
    if (p.center()[j] != Complex{}) throw std::invalid_argument("bergman: polydisc must be centered at the origin");
}

// mean_P e^{-(psi - s)} for a multicircular weight, with s = psi at the corner.
struct CircularMean {
  double shift = 0.0;
  IntegralResult mean;
};

CircularMean circular_mean(const WeightSpec& w, const Polydisc& p, const QuadratureSpec& spec) {
  std::vector<Complex> corner(p.dim());
  for (std::size_t j = 0; j < p.dim(); ++j) corner[j] = p.radii()[j];
  CircularMean out;
  out.shift = w.epsilon == 0.0 ? 0.0 : w.epsilon * w.phi(corner);
  if (!std::isfinite(out.shift)) throw std::invalid_argument("bergman: weight is infinite on the torus of P");
  const double eps = w.epsilon, s = out.shift;
  const PshFunction& phi = w.phi;
  Integrand g = [&phi, eps, s](std::span<const Complex> z) {
    if (eps == 0.0) return 1.0;
    const double v = phi(z);
    if (v == kNegInf) return std::numeric_limits<double>::infinity();
    return std::exp(-(eps * v - s));
  };
  out.mean = mean_over_polydisc(g, p, spec, true);
  if (out.mean.divergent || !std::isfinite(out.mean.value))
    throw std::domain_error("bergman: e^{-eps phi} is not integrable on the polydisc");
  return out;
}

BergmanResult circular(const WeightSpec& w, const Polydisc& p, const QuadratureSpec& spec) {
  const CircularMean cm = circular_mean(w, p, spec);
  BergmanResult r;
  r.method = BergmanMethod::Circular;
  r.log_normalized = cm.shift - std::log(cm.mean.value);
  r.value = std::exp(r.log_normalized - polydisc_volume_log(p));
  r.convergence_gap = cm.mean.abs_error_estimate / cm.mean.value;
  r.flagged = !cm.mean.converged;
  if (r.flagged) r.note = "radial quadrature did not converge";
  return r;
}

std::vector<std::vector<int>> monomial_basis(std::size_t n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  for (;;) {
    out.push_back(a);
    std::size_t j = n;
    while (j > 0) {
      --j;
      if (a[j] < d) {
        ++a[j];
        for (std::size_t k = j + 1; k < n; ++k) a[k] = 0;
        break;
      }
      if (j == 0) return out;
    }
    if (n == 0) return out;
  }
}

struct GramSolve {
  double log_k = 0.0;  // log (G'^{-1})_{00}, G' the moments in z / r
  double condition = 1.0;
  bool pivoted = false;
  bool failed = false;
  std::vector<Complex> section;
};

GramSolve gram_solve(const WeightSpec& w, const Polydisc& p, int d, const QuadratureSpec& spec) {
  const std::size_t n = p.dim();
  const auto basis = monomial_basis(n, d);
  const auto nb = static_cast<Eigen::Index>(basis.size());
  const int nr = std::max(spec.radial_nodes, d + 8);
  const int na = std::max(spec.angular_nodes, 4 * d + 8);
  const auto& gl = gauss_legendre(nr);

  // One disc factor: nodes zeta and weights for the mean over the unit disc.
  std::vector<Complex> fz;
  std::vector<double> fw;
  for (int i = 0; i < nr; ++i) {
    const double rho = 0.5 * (1.0 + gl.nodes[static_cast<std::size_t>(i)]);
    const double wr = gl.weights[static_cast<std::size_t>(i)] * rho / na;
    for (int k = 0; k < na; ++k) {
      fz.push_back(std::polar(rho, 2.0 * M_PI * (k + 0.5) / na));
      fw.push_back(wr);
    }
  }
  const std::size_t per = fz.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= per;

  auto node = [&](std::size_t q, std::vector<Complex>& zeta, double& weight) {
    weight = 1.0;
    for (std::size_t j = n; j-- > 0;) {
      const std::size_t i = q % per;
      q /= per;
      zeta[j] = fz[i];
      weight *= fw[i];
    }
  };

  // Weight exponents first, to shift by their minimum.
  std::vector<double> psi(total);
  parallel_for(total, [&](std::size_t q) {
    std::vector<Complex> zeta(n), z(n);
    double wq;
    node(q, zeta, wq);
    for (std::size_t j = 0; j < n; ++j) z[j] = p.radii()[j] * zeta[j];
    psi[q] = w.epsilon == 0.0 ? 0.0 : w.epsilon * w.phi(z);
    if (std::isnan(psi[q]) || psi[q] == kNegInf)
      throw std::domain_error("bergman: weight is singular at a quadrature node; use the circular method");
  });
  const double shift = *std::min_element(psi.begin(), psi.end());

  std::vector<double> scale(basis.size());
  for (std::size_t b = 0; b < basis.size(); ++b) {
    double s = 1.0;
    for (int a : basis[b]) s *= a + 1.0;
    scale[b] = std::sqrt(s);
  }

  constexpr std::size_t kChunk = 2048;
  const std::size_t chunks = (total + kChunk - 1) / kChunk;
  auto partial = parallel_map<Eigen::MatrixXcd>(chunks, [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(total, lo + kChunk);
    Eigen::MatrixXcd v(nb, static_cast<Eigen::Index>(hi - lo));
    std::vector<Complex> zeta(n);
    std::vector<std::vector<Complex>> pw(n, std::vector<Complex>(static_cast<std::size_t>(d) + 1));
    for (std::size_t q = lo; q < hi; ++q) {
      double wq;
      node(q, zeta, wq);
      for (std::size_t j = 0; j < n; ++j) {
        pw[j][0] = 1.0;
        for (int e = 1; e <= d; ++e) pw[j][static_cast<std::size_t>(e)] = pw[j][static_cast<std::size_t>(e) - 1] * zeta[j];
      }
      const double amp = std::sqrt(wq * std::exp(-(psi[q] - shift)));
      for (std::size_t b = 0; b < basis.size(); ++b) {
        Complex m = amp * scale[b];
        for (std::size_t j = 0; j < n; ++j) m *= pw[j][static_cast<std::size_t>(basis[b][j])];
        v(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(q - lo)) = m;
      }
    }
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(nb, nb);
    g.selfadjointView<Eigen::Lower>().rankUpdate(v);
    return g;
  });
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(nb, nb);
  for (const auto& g : partial) h += g;
  h = h.selfadjointView<Eigen::Lower>();

  GramSolve out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
  out.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(nb);
  e0(0) = 1.0;
  Eigen::VectorXcd x;
  if (out.condition <= kGramConditionLimit) {
    Eigen::LLT<Eigen::MatrixXcd> llt(h);
    if (llt.info() != Eigen::Success) out.condition = std::numeric_limits<double>::infinity();
    x = llt.solve(e0);
  }
  if (out.condition > kGramConditionLimit) {
    out.pivoted = true;
    x = h.colPivHouseholderQr().solve(e0);
  }
  out.failed = out.condition > kGramConditionFail || !(x(0).real() > 0.0);
  out.log_k = shift + std::log(std::max(x(0).real(), std::numeric_limits<double>::min()));
  out.section.resize(basis.size());
  const double es_shift = std::exp(shift);
  for (std::size_t b = 0; b < basis.size(); ++b)
    out.section[b] = es_shift * scale[b] * std::conj(x(static_cast<Eigen::Index>(b)));
  return out;
}

BergmanResult gram(const WeightSpec& w, const Polydisc& p, const QuadratureSpec& spec) {
  BergmanResult r;
  r.method = BergmanMethod::Gram;
  const std::size_t n = p.dim();
  double prev = 0.0;
  bool have_prev = false;
  for (int d = 2; d <= 8; d += 2) {
    if (std::pow(d + 1.0, static_cast<double>(n)) > 400.0) {
      r.flagged = true;
      r.note = "basis too large for the degree schedule";
      break;
    }
    GramSolve g = gram_solve(w, p, d, spec);
    r.truncation_degree = d;
    r.condition_estimate = g.condition;
    r.pivoted = g.pivoted;
    r.log_normalized = g.log_k;
    r.basis = monomial_basis(n, d);
    r.section = std::move(g.section);
    if (g.failed) {
      r.flagged = true;
      r.note = "Gram matrix ill-conditioned";
      break;
    }
    if (have_prev) {
      r.convergence_gap = std::abs(std::expm1(g.log_k - prev));
      if (r.convergence_gap < spec.target_rel_error) break;
    }
    prev = g.log_k;
    have_prev = true;
  }
  if (!r.flagged && !(r.convergence_gap < spec.target_rel_error)) {
    r.flagged = true;
    r.note = "degree schedule exhausted before convergence";
  }
  r.value = std::exp(r.log_normalized - polydisc_volume_log(p));
  return r;
}

}  // namespace

BergmanResult bergman_origin(const WeightSpec& w, const Polydisc& p, const QuadratureSpec& spec,
                             BergmanMethod method) {
  spec.validate();
  if (w.phi.dim() != p.dim()) throw std::invalid_argument("bergman: dimension mismatch");
  require_origin(p);
  if (method == BergmanMethod::Auto) method = w.multicircular ? BergmanMethod::Circular : BergmanMethod::Gram;
  if (method == BergmanMethod::Circular) {
    if (!w.multicircular) throw std::invalid_argument("bergman: circular method needs a multicircular weight");
    return circular(w, p, spec);
  }
  return gram(w, p, spec);
}

double F_eval(const WeightSpec& w, std::span<const Complex> t, const QuadratureSpec& spec, BergmanMethod method) {
  if (t.size() != w.phi.dim()) throw std::invalid_argument("F_eval: dimension mismatch");
  std::vector<double> radii(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    radii[j] = std::abs(t[j]);
    if (!(radii[j] > 0.0 && radii[j] < 1.0)) throw std::invalid_argument("F_eval: need 0 < |t_j| < 1");
  }
  const Polydisc dt(ComplexVector::zeros(t.size()), radii);
  const BergmanResult r = bergman_origin(w, dt, spec, method);
  if (r.flagged) throw NumericalFailure("F_eval: " + r.note);
  return r.log_normalized - static_cast<double>(t.size()) * std::log(M_PI);
}

SandwichReport sandwich_check(const WeightSpec& w, const Polydisc& p, const QuadratureSpec& spec) {
  require_origin(p);
  SandwichReport s;
  s.sup = w.epsilon == 0.0 ? 0.0 : w.epsilon * sup_on_region(w.phi, p, spec).value;
  if (!std::isfinite(s.sup)) throw std::invalid_argument("sandwich: weight must be bounded above on P");
  const double eps = w.epsilon, sup = s.sup;
  const PshFunction& phi = w.phi;
  Integrand g = [&phi, eps, sup](std::span<const Complex> z) {
    if (eps == 0.0) return 1.0;
    const double v = phi(z);
    if (v == kNegInf) return std::numeric_limits<double>::infinity();
    return std::exp(-(eps * v - sup));
  };
  const IntegralResult m = mean_over_polydisc(g, p, spec, w.multicircular);
  if (m.divergent || !m.converged) throw NumericalFailure("sandwich: mean of the weight did not converge");
  s.lower = 1.0 / m.value;
  const BergmanResult k = bergman_origin(w, p, spec);
  if (k.flagged) throw NumericalFailure("sandwich: " + k.note);
  s.middle = std::exp(k.log_normalized - sup);
  s.pass = s.lower <= s.middle + kBergmanTolerance * std::max(1.0, s.middle) && s.middle <= s.upper + kBergmanTolerance;
  return s;
}

OtReport ot_check(const WeightSpec& w, const QuadratureSpec& spec) {
  const std::size_t n = w.phi.dim();
  const Polydisc unit(ComplexVector::zeros(n), std::vector<double>(n, 1.0));
  const BergmanResult k = bergman_origin(w, unit, spec);
  if (k.flagged) throw NumericalFailure("ot_check: " + k.note);
  const std::vector<Complex> zero(n);
  const double phi0 = w.epsilon == 0.0 ? 0.0 : w.epsilon * w.phi(zero);
  OtReport r;
  r.kernel = k.value;
  r.bound = std::exp(phi0 - static_cast<double>(n) * std::log(M_PI));
  r.margin = r.kernel - r.bound;
  r.pass = r.margin >= -kBergmanTolerance;
  return r;
}

MonotonicityReport monotonicity_check(const WeightSpec& w, const std::vector<std::vector<double>>& t_path,
                                      const QuadratureSpec& spec) {
  const std::size_t n = w.phi.dim();
  for (std::size_t i = 0; i < t_path.size(); ++i) {
    if (t_path[i].size() != n) throw std::invalid_argument("monotonicity: dimension mismatch");
    if (i > 0)
      for (std::size_t j = 0; j < n; ++j)
        if (t_path[i][j] < t_path[i - 1][j]) throw std::invalid_argument("monotonicity: path must increase");
  }
  MonotonicityReport r;
  const std::vector<Complex> zero(n);
  r.lower_bound = (w.epsilon == 0.0 ? 0.0 : w.epsilon * w.phi(zero)) - static_cast<double>(n) * std::log(M_PI);
  r.f_values = parallel_map<double>(t_path.size(), [&](std::size_t i) {
    std::vector<Complex> t(t_path[i].begin(), t_path[i].end());
    return F_eval(w, t, spec);
  });
  r.bound_holds = std::all_of(r.f_values.begin(), r.f_values.end(),
                              [&](double f) { return f >= r.lower_bound - kBergmanTolerance; });
  if (w.multicircular)
    for (std::size_t i = 1; i < r.f_values.size(); ++i)
      if (r.f_values[i] < r.f_values[i - 1] - kBergmanTolerance * std::max(1.0, std::abs(r.f_values[i]))) r.monotone = false;
  r.pass = r.bound_holds && r.monotone;
  return r;
}

HessianCheckReport hessian_limit_check(const WeightSpec& w, const std::vector<double>& h_values,
                                       const QuadratureSpec& spec, BergmanMethod method) {
  if (!w.phi.meta().smooth_hessian_at)
    throw std::invalid_argument("hessian_limit_check: weight needs exact Hessian metadata");
  if (h_values.empty()) throw std::invalid_argument("hessian_limit_check: need at least one step");
  for (double h : h_values)
    if (!(h >= kHessianStepFloor && h < 0.5)) throw std::invalid_argument("hessian_limit_check: steps must lie in [1e-3, 0.5)");
  const std::size_t n = w.phi.dim();
  const auto N = static_cast<Eigen::Index>(n);

  // Stencil points; F is evaluated once per distinct point.
  std::map<std::vector<double>, double> table;
  std::vector<std::vector<Complex>> stencils;
  auto key = [](const std::vector<Complex>& t) {
    std::vector<double> k;
    for (auto c : t) {
      k.push_back(c.real());
      k.push_back(c.imag());
    }
    return k;
  };
  auto point = [&](std::initializer_list<std::pair<std::size_t, Complex>> moves) {
    std::vector<Complex> t(n, Complex(0.0));
    for (auto [j, v] : moves) t[j] = v;
    return t;
  };
  const std::array<Complex, 2> units{Complex(1, 0), Complex(0, 1)};
  auto add = [&](const std::vector<Complex>& t) {
    if (table.emplace(key(t), 0.0).second) stencils.push_back(t);
  };
  for (double h : h_values) {
    add(point({}));
    for (std::size_t j = 0; j < n; ++j) {
      for (Complex s : {Complex(h), Complex(-h), Complex(0, h), Complex(0, -h)}) add(point({{j, s}}));
      for (std::size_t k = j + 1; k < n; ++k)
        for (Complex a : units)
          for (Complex b : units)
            for (double sa : {1.0, -1.0})
              for (double sb : {1.0, -1.0}) add(point({{j, sa * h * a}, {k, sb * h * b}}));
    }
  }
  const auto values = parallel_map<double>(stencils.size(), [&](std::size_t i) {
    std::vector<Complex> t = stencils[i];
    for (auto& c : t)
      if (c == Complex(0.0)) c = kTinyRadius;
    return F_eval(w, t, spec, method);
  });
  for (std::size_t i = 0; i < stencils.size(); ++i) table[key(stencils[i])] = values[i];
  auto F = [&](const std::vector<Complex>& t) { return table.at(key(t)); };

  HessianCheckReport rep;
  for (double h : h_values) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
    const double f0 = F(point({}));
    for (std::size_t j = 0; j < n; ++j) {
      double s = -4.0 * f0;
      for (Complex v : {Complex(h), Complex(-h), Complex(0, h), Complex(0, -h)}) s += F(point({{j, v}}));
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 0.25 * s / (h * h);
      for (std::size_t k = j + 1; k < n; ++k) {
        auto mixed = [&](Complex a, Complex b) {
          double s2 = 0.0;
          for (double sa : {1.0, -1.0})
            for (double sb : {1.0, -1.0}) s2 += sa * sb * F(point({{j, sa * h * a}, {k, sb * h * b}}));
          return s2 / (4.0 * h * h);
        };
        const double xx = mixed(units[0], units[0]), yy = mixed(units[1], units[1]);
        const double xy = mixed(units[0], units[1]), yx = mixed(units[1], units[0]);
        const Complex e = 0.25 * Complex(xx + yy, xy - yx);
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = e;
        m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = std::conj(e);
      }
    }
    rep.levels.push_back({h, m});
  }

  const std::vector<Complex> zero(n);
  const HermitianMatrix hess = w.phi.meta().smooth_hessian_at(zero);
  rep.target = Eigen::MatrixXcd::Zero(N, N);
  for (Eigen::Index j = 0; j < N; ++j) rep.target(j, j) = 0.5 * w.epsilon * hess(j, j).real();

  const std::size_t L = rep.levels.size();
  if (L == 1) {
    rep.extrapolated = rep.levels[0].matrix;
  } else {
    const double q2 = std::pow(rep.levels[L - 2].h / rep.levels[L - 1].h, 2);
    rep.extrapolated = (q2 * rep.levels[L - 1].matrix - rep.levels[L - 2].matrix) / (q2 - 1.0);
  }
  rep.observed_order = std::numeric_limits<double>::quiet_NaN();
  if (L >= 3) {
    const double d1 = (rep.levels[L - 3].matrix - rep.levels[L - 2].matrix).diagonal().cwiseAbs().maxCoeff();
    const double d2 = (rep.levels[L - 2].matrix - rep.levels[L - 1].matrix).diagonal().cwiseAbs().maxCoeff();
    if (d1 > 0.0 && d2 > 0.0) rep.observed_order = std::log(d1 / d2) / std::log(rep.levels[L - 2].h / rep.levels[L - 1].h);
  }
  rep.max_abs_dev = (rep.extrapolated - rep.target).cwiseAbs().maxCoeff();
  rep.hermitian_defect = (rep.extrapolated - rep.extrapolated.adjoint()).cwiseAbs().maxCoeff();
  return rep;
}

LelongPreservationReport lelong_preservation_check(const PshFunction& phi, const std::vector<double>& a,
                                                   const std::vector<double>& eps_values,
                                                   const std::vector<double>& r_grid, const QuadratureSpec& spec) {
  if (a.size() != phi.dim()) throw std::invalid_argument("lelong_preservation: exponent length must equal dim");
  for (std::size_t i = 1; i < eps_values.size(); ++i)
    if (!(eps_values[i] < eps_values[i - 1])) throw std::invalid_argument("lelong_preservation: eps_values must decrease");
  for (double e : eps_values)
    if (!(e > 0.0)) throw std::invalid_argument("lelong_preservation: eps_values must be positive");
  LelongPreservationReport rep;
  rep.rhs = directional_lelong(phi, a, r_grid, spec);
  rep.eps_values = eps_values;
  for (double eps : eps_values) {
    const WeightSpec w = make_weight(phi, eps);
    std::vector<double> y(r_grid.size());
    bool ok = true;
    try {
      y = parallel_map<double>(r_grid.size(), [&](std::size_t i) {
        std::vector<Complex> t(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) t[j] = std::pow(r_grid[i], a[j]);
        return F_eval(w, t, spec) / eps;
      });
    } catch (const std::domain_error&) {
      ok = false;
    }
    SlopeFit fit;
    if (ok) {
      fit = fit_log_slope(r_grid, y);
    } else {
      fit.slope = std::numeric_limits<double>::quiet_NaN();
      fit.r_values = r_grid;
    }
    const bool agree = ok && std::abs(fit.slope - rep.rhs.slope) <= kSlopeAgreement * std::abs(rep.rhs.slope);
    rep.lhs.push_back(std::move(fit));
    rep.agrees.push_back(agree);
    if (agree && !rep.eps_used) rep.eps_used = eps;
  }
  rep.flagged = !rep.eps_used.has_value();
  return rep;
}

}  // namespace pshosc
