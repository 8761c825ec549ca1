#include "pshosc/jn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "pshosc/osc.hpp"
#include "pshosc/parallel.hpp"

namespace pshosc {

double quasi_distance(const ComplexVector& z, const ComplexVector& w, const std::vector<double>& a) {
  if (z.dim() != w.dim() || a.size() != z.dim()) throw std::invalid_argument("quasi_distance: dimension mismatch");
  double rho = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] > 0.0)) throw std::invalid_argument("quasi_distance: exponents must be positive");
    rho = std::max(rho, std::pow(std::abs(z[k] - w[k]), 1.0 / a[k]));
  }
  return rho;
}

double quasi_triangle_constant(const std::vector<double>& a) {
  double p = 0.0;
  for (double ak : a) {
    if (!(ak > 0.0)) throw std::invalid_argument("quasi_triangle_constant: exponents must be positive");
    p = std::max(p, 1.0 / ak);
  }
  return std::max(1.0, std::pow(2.0, p - 1.0));
}

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, x = 0.0;
  while (i > 0) {
    x += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return x;
}

}  // namespace

std::vector<double> halton_point(std::uint64_t index, std::size_t dim) {
  if (dim > std::size(kPrimes)) throw std::invalid_argument("halton_point: dimension too large");
  std::vector<double> u(dim);
  for (std::size_t k = 0; k < dim; ++k) u[k] = radical_inverse(index, kPrimes[k]);
  return u;
}

std::vector<double> default_t_grid() {
  std::vector<double> t;
  for (int k = 0; k <= 32; ++k) t.push_back(0.25 * k);
  return t;
}

DecayTable distribution_estimate(const PshFunction& f, const AnisotropicBox& b0, const std::vector<double>& t_grid,
                                 const QuadratureSpec& spec, std::uint64_t seed, std::int64_t samples) {
  const std::size_t n = b0.dim();
  if (f.dim() != n) throw std::invalid_argument("distribution_estimate: dimension mismatch");
  if (t_grid.empty() || !std::is_sorted(t_grid.begin(), t_grid.end()))
    throw std::invalid_argument("distribution_estimate: t grid must be non-empty and increasing");
  spec.validate();
  const std::int64_t count = samples > 0 ? samples : 1000000 * static_cast<std::int64_t>(n);
  const Polydisc p = b0.as_polydisc();

  // Cranley-Patterson shift of the Halton points, fixed by the seed.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> shift(2 * n);
  for (auto& s : shift) s = u01(rng);

  constexpr std::size_t kChunk = 8192;
  const std::size_t chunks = (static_cast<std::size_t>(count) + kChunk - 1) / kChunk;
  std::vector<double> values(static_cast<std::size_t>(count));
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<Complex> z(n);
    const std::size_t end = std::min(values.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      auto u = halton_point(i + 1, 2 * n);
      for (std::size_t j = 0; j < n; ++j) {
        const double a = std::fmod(u[2 * j] + shift[2 * j], 1.0);
        const double b = std::fmod(u[2 * j + 1] + shift[2 * j + 1], 1.0);
        z[j] = p.center()[j] + std::polar(p.radii()[j] * std::sqrt(a), 2.0 * M_PI * b);
      }
      values[i] = f(z);
    }
  });

  DecayTable d;
  d.samples = count;
  d.t_values = t_grid;
  const IntegralResult m = mean_over_polydisc(f, p, spec);
  if (m.converged && std::isfinite(m.value)) {
    d.mean = m.value;
  } else {
    std::vector<double> finite;
    for (double v : values)
      if (std::isfinite(v)) finite.push_back(v);
    d.mean = pairwise_sum(finite) / static_cast<double>(finite.size());
  }

  std::vector<double> dev(values.size());
  // Rounding residue of the mean counts as no deviation.
  const double floor = 1e-12 * std::max(1.0, std::abs(d.mean));
  for (std::size_t i = 0; i < values.size(); ++i) {
    dev[i] = std::abs(values[i] - d.mean);
    if (dev[i] <= floor) dev[i] = 0.0;
  }
  std::sort(dev.begin(), dev.end());
  d.median_deviation = dev[dev.size() / 2];
  const double total = static_cast<double>(dev.size());
  std::vector<std::int64_t> above(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    above[k] = static_cast<std::int64_t>(dev.end() - std::upper_bound(dev.begin(), dev.end(), t_grid[k]));
    d.log_measures.push_back(above[k] == 0 ? kNegInf : std::log(static_cast<double>(above[k]) / total));
  }

  for (std::size_t k = 0; k < t_grid.size(); ++k)
    if (t_grid[k] > d.median_deviation && above[k] >= kMinTailCount) d.tail.push_back(k);
  if (d.tail.size() < 2) {
    d.fitted_slope = kNegInf;
    d.fitted_intercept = 0.0;
    return d;
  }
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double m_pts = static_cast<double>(d.tail.size());
  for (std::size_t k : d.tail) {
    st += t_grid[k];
    sy += d.log_measures[k];
    stt += t_grid[k] * t_grid[k];
    sty += t_grid[k] * d.log_measures[k];
  }
  d.fitted_slope = (m_pts * sty - st * sy) / (m_pts * stt - st * st);
  d.fitted_intercept = (sy - d.fitted_slope * st) / m_pts;
  double ss = 0.0;
  for (std::size_t k : d.tail) {
    const double r = d.log_measures[k] - (d.fitted_intercept + d.fitted_slope * t_grid[k]);
    ss += r * r;
  }
  d.residual_rms = std::sqrt(ss / m_pts);
  return d;
}

std::optional<double> exponential_mean(const PshFunction& f, const AnisotropicBox& b, double eps,
                                       const QuadratureSpec& spec) {
  if (f.dim() != b.dim()) throw std::invalid_argument("exponential_mean: dimension mismatch");
  if (!(eps >= 0.0)) throw std::invalid_argument("exponential_mean: eps must be >= 0");
  const Polydisc p = b.as_polydisc();
  const double sup = sup_on_region(f, p, spec).value;
  Integrand g = [&f, eps, sup](std::span<const Complex> z) {
    const double v = f(z);
    if (v == kNegInf) return eps == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return std::exp(-eps * (v - sup));
  };
  const IntegralResult m = mean_over_polydisc(g, p, spec, f.meta().multicircular);
  if (m.divergent || !m.converged || !std::isfinite(m.value)) return std::nullopt;
  return m.value;
}

double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("theil_sen_slope: size mismatch");
  std::vector<double> s;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (x[j] != x[i]) s.push_back((y[j] - y[i]) / (x[j] - x[i]));
  if (s.empty()) return 0.0;
  std::sort(s.begin(), s.end());
  const std::size_t h = s.size() / 2;
  return s.size() % 2 ? s[h] : 0.5 * (s[h - 1] + s[h]);
}

EpsilonReport epsilon0_search(const PshFunction& f, const std::vector<AnisotropicBox>& family,
                              const std::vector<double>& eps_grid, const QuadratureSpec& spec, double threshold) {
  if (family.empty()) throw std::invalid_argument("epsilon0_search: empty family");
  if (eps_grid.empty() || !std::is_sorted(eps_grid.begin(), eps_grid.end()))
    throw std::invalid_argument("epsilon0_search: eps grid must be non-empty and increasing");
  EpsilonReport rep;
  rep.family_size = family.size();
  rep.eps_values = eps_grid;
  rep.threshold = threshold;
  std::vector<double> log_r;
  for (const auto& b : family) log_r.push_back(std::log(b.scale()));

  bool leading = true;
  for (double eps : eps_grid) {
    EpsilonRow row;
    row.eps = eps;
    auto means = parallel_map<std::optional<double>>(
        family.size(), [&](std::size_t i) { return exponential_mean(f, family[i], eps, spec); });
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::vector<double> logs;
    for (const auto& m : means) {
      const double v = m ? *m : std::numeric_limits<double>::infinity();
      if (!m) row.divergent = true;
      row.member_means.push_back(v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      logs.push_back(std::log(v));
    }
    row.sup_mean = hi;
    if (!row.divergent) {
      row.fluctuation = hi / lo;
      row.theil_sen_slope = theil_sen_slope(log_r, logs);
      row.bounded = hi < threshold && row.fluctuation < kFluctuationLimit &&
                    std::abs(row.theil_sen_slope) <= kTrendLimit;
    } else {
      row.fluctuation = std::numeric_limits<double>::infinity();
    }
    leading = leading && row.bounded;
    if (leading) rep.eps0_estimate = eps;
    rep.sup_means.push_back(row.sup_mean);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::vector<AnisotropicBox> dyadic_family(const ComplexVector& center, const std::vector<double>& a, int count) {
  if (count < 1) throw std::invalid_argument("dyadic_family: count must be positive");
  std::vector<AnisotropicBox> out;
  for (int k = 0; k < count; ++k) out.emplace_back(center, std::ldexp(1.0, -k), a);
  return out;
}

}  // namespace pshosc
