#include "pshosc/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <random>

namespace pshosc {

void QuadratureSpec::validate() const {
  if (radial_nodes < 4) throw std::invalid_argument("QuadratureSpec: radial_nodes must be >= 4");
  if (angular_nodes < 8) throw std::invalid_argument("QuadratureSpec: angular_nodes must be >= 8");
  if ((angular_nodes & (angular_nodes - 1)) != 0)
    throw std::invalid_argument("QuadratureSpec: angular_nodes must be a power of two");
  if (!(target_rel_error >= 1e-13)) throw std::invalid_argument("QuadratureSpec: target_rel_error must be >= 1e-13");
  if (max_refinements < 0 || max_refinements > 12) throw std::invalid_argument("QuadratureSpec: max_refinements must be in [0, 12]");
  if (mc_samples < 1000) throw std::invalid_argument("QuadratureSpec: mc_samples must be >= 1000");
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

// ---------------------------------------------------------------------------
// Gauss-Legendre

const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7/15

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
constexpr double kEps = 2.220446049250313e-16;

struct Piece {
  double a, b, value, error;
  int depth;
  bool singular;
};

Piece gk15(const std::function<double(double)>& g, double a, double b, int depth, bool at_max_depth) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double f[15];
  f[7] = g(c);
  for (int j = 0; j < 7; ++j) {
    f[j] = g(c - h * kXgk[j]);
    f[14 - j] = g(c + h * kXgk[j]);
  }
  bool singular = false;
  double extreme = 0.0;  // finite node value of largest magnitude
  for (double v : f) {
    if (std::isnan(v)) throw NumericalFailure("integrate_adaptive: integrand returned NaN");
    if (is_singular_value(v)) {
      singular = true;
    } else if (std::abs(v) > std::abs(extreme)) {
      extreme = v;
    }
  }
  if (singular && !at_max_depth) return {a, b, 0.0, std::numeric_limits<double>::infinity(), depth, true};
  if (singular) {
    for (double& v : f)
      if (is_singular_value(v)) v = extreme;
  }
  double rk = kWgk[7] * f[7], rg = kWg[3] * f[7], rabs = std::abs(rk);
  for (int j = 0; j < 7; ++j) {
    double s = f[j] + f[14 - j];
    rk += kWgk[j] * s;
    rabs += kWgk[j] * (std::abs(f[j]) + std::abs(f[14 - j]));
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  const double mean = 0.5 * rk;
  double asc = kWgk[7] * std::abs(f[7] - mean);
  for (int j = 0; j < 7; ++j) asc += kWgk[j] * (std::abs(f[j] - mean) + std::abs(f[14 - j] - mean));
  double err = std::abs((rk - rg) * h);
  const double resasc = asc * std::abs(h), resabs = rabs * std::abs(h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(err, 50.0 * kEps * resabs);
  if (singular) err = std::max(err, std::abs(rk * h));
  return {a, b, rk * h, err, depth, false};
}

}  // namespace

IntegralResult integrate_adaptive(const std::function<double(double)>& g, double a, double b,
                                  const AdaptiveOptions& opt) {
  IntegralResult out;
  if (a == b) return out;
  auto cmp = [](const Piece& x, const Piece& y) { return x.error < y.error; };
  std::priority_queue<Piece, std::vector<Piece>, decltype(cmp)> open(cmp);
  std::vector<Piece> closed;
  open.push(gk15(g, a, b, 0, opt.max_depth == 0));
  out.nodes_used = 15;
  int intervals = 1;

  // Running totals; intervals with unresolved singular nodes carry an
  // infinite error and are counted separately.
  double run_value = 0.0, run_error = 0.0;
  int infinite = 0;
  double closed_error = 0.0;
  auto account = [&](const Piece& p, double sign) {
    run_value += sign * p.value;
    if (std::isinf(p.error)) {
      infinite += sign > 0 ? 1 : -1;
    } else {
      run_error += sign * p.error;
    }
  };
  account(open.top(), 1.0);

  while (!open.empty()) {
    if (infinite == 0 && run_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(run_value))) break;
    if (intervals >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    Piece p = open.top();
    open.pop();
    if (p.depth >= opt.max_depth) {
      closed.push_back(p);
      closed_error += p.error;
      if (open.empty() || closed_error > std::max(opt.abs_tol, opt.rel_tol * std::abs(run_value))) break;
      continue;
    }
    account(p, -1.0);
    const double m = 0.5 * (p.a + p.b);
    const bool last = p.depth + 1 >= opt.max_depth;
    Piece left = gk15(g, p.a, m, p.depth + 1, last), right = gk15(g, m, p.b, p.depth + 1, last);
    account(left, 1.0);
    account(right, 1.0);
    open.push(left);
    open.push(right);
    out.nodes_used += 30;
    ++intervals;
  }

  while (!open.empty()) {
    closed.push_back(open.top());
    open.pop();
  }
  std::sort(closed.begin(), closed.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
  std::vector<double> vals, errs;
  for (const auto& p : closed) {
    vals.push_back(p.value);
    errs.push_back(p.error);
  }
  out.value = pairwise_sum(vals);
  out.abs_error_estimate = pairwise_sum(errs);
  out.refinements = intervals - 1;
  if (!(out.abs_error_estimate <= std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value)))) out.converged = false;
  if (!std::isfinite(out.value)) {
    out.converged = false;
    out.divergent = true;
  }
  return out;
}

namespace {

struct Cell {
  double ax, bx, ay, by, value, error;
  int depth;
  bool split_x;
};

// Tensor Kronrod-15 rule on a rectangle with embedded Gauss-7 estimates per
// axis; the cell is later split along the axis with the larger estimate.
Cell gk15_2d(const std::function<double(double, double)>& g, double ax, double bx, double ay, double by, int depth,
             bool at_max_depth) {
  const double cx = 0.5 * (ax + bx), hx = 0.5 * (bx - ax), cy = 0.5 * (ay + by), hy = 0.5 * (by - ay);
  double xs[15], ys[15], wk[15], wg[15];
  for (int j = 0; j < 15; ++j) {
    const int k = j < 8 ? j : 14 - j;
    const double sgn = j < 7 ? -1.0 : 1.0;
    xs[j] = cx + sgn * hx * kXgk[k];
    ys[j] = cy + sgn * hy * kXgk[k];
    wk[j] = kWgk[k];
    wg[j] = (k % 2 == 1) ? kWg[k / 2] : (k == 7 ? kWg[3] : 0.0);
  }
  double f[15][15];
  bool singular = false;
  double extreme = 0.0;
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 15; ++j) {
      const double v = g(xs[i], ys[j]);
      if (std::isnan(v)) throw NumericalFailure("integrate_adaptive_2d: integrand returned NaN");
      if (is_singular_value(v)) {
        singular = true;
      } else if (std::abs(v) > std::abs(extreme)) {
        extreme = v;
      }
      f[i][j] = v;
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  if (singular && !at_max_depth) return {ax, bx, ay, by, 0.0, inf, depth, bx - ax >= by - ay};
  if (singular)
    for (auto& row : f)
      for (double& v : row)
        if (is_singular_value(v)) v = extreme;
  double kk = 0.0, gk = 0.0, kg = 0.0, rabs = 0.0;
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 15; ++j) {
      kk += wk[i] * wk[j] * f[i][j];
      gk += wg[i] * wk[j] * f[i][j];
      kg += wk[i] * wg[j] * f[i][j];
      rabs += wk[i] * wk[j] * std::abs(f[i][j]);
    }
  }
  const double area = hx * hy;
  const double ex = std::abs(kk - gk) * area, ey = std::abs(kk - kg) * area;
  double err = ex + ey;
  err = std::max(err, 50.0 * kEps * rabs * area);
  if (singular) err = std::max(err, std::abs(kk * area));
  return {ax, bx, ay, by, kk * area, err, depth, ex >= ey};
}

}  // namespace

IntegralResult integrate_adaptive_2d(const std::function<double(double, double)>& g, double ax, double bx, double ay,
                                     double by, const AdaptiveOptions& opt) {
  IntegralResult out;
  if (ax == bx || ay == by) return out;
  auto cmp = [](const Cell& x, const Cell& y) { return x.error < y.error; };
  std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> open(cmp);
  std::vector<Cell> closed;
  const int max_depth = 2 * opt.max_depth;
  open.push(gk15_2d(g, ax, bx, ay, by, 0, max_depth == 0));
  out.nodes_used = 225;
  int cells = 1;
  double run_value = open.top().value, run_error = 0.0, closed_error = 0.0;
  int infinite = std::isinf(open.top().error) ? 1 : 0;
  if (!infinite) run_error = open.top().error;
  auto account = [&](const Cell& c, double sign) {
    run_value += sign * c.value;
    if (std::isinf(c.error)) {
      infinite += sign > 0 ? 1 : -1;
    } else {
      run_error += sign * c.error;
    }
  };
  while (!open.empty()) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(run_value));
    if (infinite == 0 && run_error <= tol) break;
    if (cells >= 4 * opt.max_intervals) {
      out.converged = false;
      break;
    }
    Cell c = open.top();
    open.pop();
    if (c.depth >= max_depth) {
      closed.push_back(c);
      closed_error += c.error;
      if (open.empty() || closed_error > tol) break;
      continue;
    }
    account(c, -1.0);
    const bool last = c.depth + 1 >= max_depth;
    Cell a, b;
    if (c.split_x) {
      const double m = 0.5 * (c.ax + c.bx);
      a = gk15_2d(g, c.ax, m, c.ay, c.by, c.depth + 1, last);
      b = gk15_2d(g, m, c.bx, c.ay, c.by, c.depth + 1, last);
    } else {
      const double m = 0.5 * (c.ay + c.by);
      a = gk15_2d(g, c.ax, c.bx, c.ay, m, c.depth + 1, last);
      b = gk15_2d(g, c.ax, c.bx, m, c.by, c.depth + 1, last);
    }
    account(a, 1.0);
    account(b, 1.0);
    open.push(a);
    open.push(b);
    out.nodes_used += 450;
    ++cells;
  }
  while (!open.empty()) {
    closed.push_back(open.top());
    open.pop();
  }
  std::sort(closed.begin(), closed.end(),
            [](const Cell& x, const Cell& y) { return x.ax < y.ax || (x.ax == y.ax && x.ay < y.ay); });
  std::vector<double> vals, errs;
  for (const auto& c : closed) {
    vals.push_back(c.value);
    errs.push_back(c.error);
  }
  out.value = pairwise_sum(vals);
  out.abs_error_estimate = pairwise_sum(errs);
  out.refinements = cells - 1;
  if (!(out.abs_error_estimate <= std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value)))) out.converged = false;
  return out;
}

IntegralResult integrate_log_radial(const std::function<double(double)>& g, const AdaptiveOptions& opt) {
  auto weighted = [&g](double t) {
    double v = g(t);
    if (std::isnan(v) || std::isinf(v)) return v;
    return v == 0.0 ? 0.0 : 2.0 * std::exp(2.0 * t) * v;
  };
  IntegralResult out;
  double hi = 0.0, lo = -20.0, prev_piece = std::numeric_limits<double>::infinity();
  std::vector<double> pieces;
  double err = 0.0;
  for (int k = 0;; ++k) {
    IntegralResult piece = integrate_adaptive(weighted, lo, hi, opt);
    pieces.push_back(piece.value);
    err += piece.abs_error_estimate;
    out.nodes_used += piece.nodes_used;
    out.refinements += piece.refinements;
    if (!piece.converged) out.converged = false;
    const double total = pairwise_sum(pieces);
    const double mag = std::abs(piece.value);
    if (k > 0 && mag >= std::abs(prev_piece) && mag > opt.abs_tol) {
      out.divergent = true;
      out.converged = false;
      out.value = total;
      out.abs_error_estimate = std::numeric_limits<double>::infinity();
      return out;
    }
    if (k > 0 && mag <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) break;
    if (lo <= -320.0) {
      // Geometric tail estimate from the last two pieces.
      const double ratio = mag / std::abs(prev_piece);
      const double tail = mag * ratio / (1.0 - ratio);
      err += tail;
      if (!(tail <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)))) out.converged = false;
      break;
    }
    prev_piece = piece.value;
    hi = lo;
    lo *= 2.0;
  }
  out.value = pairwise_sum(pieces);
  out.abs_error_estimate = err;
  return out;
}

// ---------------------------------------------------------------------------
// Circles and tori

IntegralResult circle_mean(const std::function<double(Complex)>& g, Complex center, double rho,
                           const QuadratureSpec& spec) {
  IntegralResult out;
  const double tol_rel = spec.target_rel_error;
  int m = spec.angular_nodes;
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(m) << spec.max_refinements);
  bool singular = false;
  auto sample = [&](double theta) {
    double v = g(center + std::polar(rho, theta));
    if (std::isnan(v)) throw NumericalFailure("circle_mean: integrand returned NaN");
    if (is_singular_value(v)) singular = true;
    vals.push_back(v);
  };
  for (int k = 0; k < m; ++k) sample(2.0 * M_PI * k / m);
  double prev = pairwise_sum(vals) / m;
  out.nodes_used = m;
  bool done = false;
  for (int r = 0; r < spec.max_refinements + 2 && !singular; ++r) {
    for (int k = 0; k < m; ++k) sample(2.0 * M_PI * (k + 0.5) / m);
    m *= 2;
    out.nodes_used = m;
    out.refinements = r + 1;
    double cur = pairwise_sum(vals) / m;
    double diff = std::abs(cur - prev);
    prev = cur;
    if (singular) break;
    if (diff <= tol_rel * std::max(1.0, std::abs(cur))) {
      out.value = cur;
      out.abs_error_estimate = std::max(diff, 4.0 * kEps * std::abs(cur));
      done = true;
      break;
    }
  }
  if (done) return out;

  // Near-singular or singular: adaptive in the angle.
  AdaptiveOptions opt;
  opt.abs_tol = tol_rel * std::max(1.0, std::abs(singular ? 0.0 : prev)) * 2.0 * M_PI;
  opt.rel_tol = tol_rel;
  auto h = [&](double theta) { return g(center + std::polar(rho, theta)); };
  IntegralResult a = integrate_adaptive(h, 0.0, 2.0 * M_PI, opt);
  a.value /= 2.0 * M_PI;
  a.abs_error_estimate /= 2.0 * M_PI;
  a.nodes_used += out.nodes_used;
  a.refinements += out.refinements;
  return a;
}

namespace {

struct FactorRule {
  std::vector<Complex> offsets;
  std::vector<double> weights;
};

// Per-factor tensor rule for the normalized solid mean: Gauss-Legendre in u
// with radius u^2 r (weight 4u^3) times a half-offset trapezoid in angle.
FactorRule solid_factor_rule(double r, int nr, int na) {
  const auto& gl = gauss_legendre(nr);
  FactorRule f;
  for (int i = 0; i < nr; ++i) {
    const double u = 0.5 * (gl.nodes[i] + 1.0), wu = 0.5 * gl.weights[i];
    const double rho = u * u * r, w = 4.0 * u * u * u * wu / na;
    for (int k = 0; k < na; ++k) {
      f.offsets.push_back(std::polar(rho, 2.0 * M_PI * (k + 0.5) / na));
      f.weights.push_back(w);
    }
  }
  return f;
}

FactorRule torus_factor_rule(double r, int na) {
  FactorRule f;
  for (int k = 0; k < na; ++k) {
    f.offsets.push_back(std::polar(r, 2.0 * M_PI * k / na));
    f.weights.push_back(1.0 / na);
  }
  return f;
}

struct TensorSum {
  double value = 0.0;
  std::int64_t nodes = 0;
  std::int64_t singular = 0;
};

// Sum over the tensor product of factor rules; the innermost factor is
// summed in order, outer partial sums are combined pairwise.
TensorSum tensor_sum(const Integrand& f, const ComplexVector& center, const std::vector<FactorRule>& rules) {
  const std::size_t n = rules.size();
  std::vector<Complex> z(center.components());
  TensorSum out;
  std::vector<double> outer_sums;
  const FactorRule& first = rules[0];
  outer_sums.reserve(first.offsets.size());

  std::function<double(std::size_t, double)> recurse = [&](std::size_t level, double w) -> double {
    const FactorRule& rule = rules[level];
    double s = 0.0;
    for (std::size_t i = 0; i < rule.offsets.size(); ++i) {
      z[level] = center[level] + rule.offsets[i];
      const double wi = w * rule.weights[i];
      if (level + 1 == n) {
        double v = f(z);
        ++out.nodes;
        if (std::isnan(v)) throw NumericalFailure("tensor quadrature: integrand returned NaN");
        if (is_singular_value(v)) {
          ++out.singular;
          continue;
        }
        s += wi * v;
      } else {
        s += recurse(level + 1, wi);
      }
    }
    return s;
  };

  for (std::size_t i = 0; i < first.offsets.size(); ++i) {
    z[0] = center[0] + first.offsets[i];
    if (n == 1) {
      double v = f(z);
      ++out.nodes;
      if (std::isnan(v)) throw NumericalFailure("tensor quadrature: integrand returned NaN");
      if (is_singular_value(v)) {
        ++out.singular;
        continue;
      }
      outer_sums.push_back(first.weights[i] * v);
    } else {
      outer_sums.push_back(recurse(1, first.weights[i]));
    }
  }
  out.value = pairwise_sum(outer_sums);
  return out;
}

constexpr std::int64_t kTensorNodeBudget = std::int64_t{1} << 26;

std::int64_t ipow(std::int64_t b, std::size_t e) {
  std::int64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

template <typename MakeRules>
IntegralResult refine_tensor(const Integrand& f, const ComplexVector& center, std::size_t n, const QuadratureSpec& spec,
                             int nr, int na, bool angular_only, MakeRules make_rules) {
  IntegralResult out;
  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0;; ++level) {
    TensorSum s = tensor_sum(f, center, make_rules(nr, na));
    out.nodes_used += s.nodes;
    if (s.singular > 0) out.converged = false;
    if (have_prev) {
      const double diff = std::abs(s.value - prev);
      out.value = s.value;
      out.abs_error_estimate = std::max(diff, 4.0 * kEps * std::abs(s.value) * std::sqrt(double(s.nodes)));
      out.refinements = level;
      if (diff <= spec.target_rel_error * std::max(1.0, std::abs(s.value))) {
        if (s.singular > 0) out.converged = false;
        return out;
      }
    }
    prev = s.value;
    have_prev = true;
    const int next_nr = angular_only ? nr : 2 * nr;
    const int next_na = na == 1 ? 1 : 2 * na;
    const std::int64_t per_factor = (angular_only ? 1 : next_nr) * next_na;
    if (level >= spec.max_refinements || ipow(per_factor, n) > kTensorNodeBudget) {
      if (level == 0) {
        out.value = s.value;
        out.abs_error_estimate = std::numeric_limits<double>::infinity();
      }
      out.converged = false;
      return out;
    }
    nr = next_nr;
    na = next_na;
  }
}

}  // namespace

namespace {

// Iterated log-radial integrals for functions of the moduli on a polydisc
// centered at the origin.
IntegralResult nested_log_radial(const Integrand& f, const Polydisc& p, const QuadratureSpec& spec) {
  const std::size_t n = p.dim();
  std::vector<Complex> z(n);
  AdaptiveOptions opt;
  opt.rel_tol = spec.target_rel_error;
  opt.abs_tol = spec.target_rel_error;
  std::int64_t nodes = 0;
  double inner_err = 0.0;  // relative to max(1, |inner value|)
  bool inner_ok = true, inner_div = false;
  IntegralResult outer;
  std::function<double(std::size_t)> level = [&](std::size_t j) -> double {
    if (j == n) {
      ++nodes;
      return f(z);
    }
    IntegralResult r = integrate_log_radial(
        [&](double t) {
          z[j] = p.radii()[j] * std::exp(t);
          return level(j + 1);
        },
        opt);
    if (j > 0) {
      inner_err = std::max(inner_err, r.abs_error_estimate / std::max(1.0, std::abs(r.value)));
      inner_ok = inner_ok && r.converged;
      inner_div = inner_div || r.divergent;
    }
    if (j == 0) {
      r.abs_error_estimate += inner_err * std::max(1.0, std::abs(r.value));
      r.converged = r.converged && inner_ok;
      r.divergent = r.divergent || inner_div;
      r.nodes_used = nodes;
      outer = r;
    }
    return r.value;
  };
  level(0);
  return outer;
}

}  // namespace

IntegralResult mean_over_polydisc(const Integrand& f, const Polydisc& p, const QuadratureSpec& spec) {
  return mean_over_polydisc(f, p, spec, false);
}

IntegralResult mean_over_polydisc(const Integrand& f, const Polydisc& p, const QuadratureSpec& spec,
                                  bool radial_only) {
  spec.validate();
  const std::size_t n = p.dim();
  radial_only = radial_only && p.centered_at_origin();
  if (n == 1 && radial_only) {
    const double r = p.radii()[0];
    AdaptiveOptions opt;
    opt.rel_tol = spec.target_rel_error;
    opt.abs_tol = spec.target_rel_error;
    std::int64_t nodes = 0;
    IntegralResult out = integrate_log_radial(
        [&](double t) {
          ++nodes;
          const Complex z(r * std::exp(t));
          return f(std::span<const Complex>(&z, 1));
        },
        opt);
    out.nodes_used = nodes;
    return out;
  }
  if (n == 1) {
    // Polar coordinates about the center, s = |z - c| / r with density 2s.
    const Complex c = p.center()[0];
    const double r = p.radii()[0];
    AdaptiveOptions opt;
    opt.rel_tol = spec.target_rel_error;
    opt.abs_tol = spec.target_rel_error;
    IntegralResult out = integrate_adaptive_2d(
        [&](double s, double theta) {
          const Complex z = c + std::polar(r * s, theta);
          const double v = f(std::span<const Complex>(&z, 1));
          if (is_singular_value(v)) return v;
          return s * v / M_PI;
        },
        0.0, 1.0, 0.0, 2.0 * M_PI, opt);
    return out;
  }
  if (radial_only && n == 2) return nested_log_radial(f, p, spec);
  auto make = [&](int nr, int na) {
    std::vector<FactorRule> rules;
    for (std::size_t j = 0; j < n; ++j) rules.push_back(solid_factor_rule(p.radii()[j], nr, na));
    return rules;
  };
  return refine_tensor(f, p.center(), n, spec, spec.radial_nodes, radial_only ? 1 : spec.angular_nodes, false, make);
}

IntegralResult mean_over_shilov(const Integrand& f, const Polydisc& p, const QuadratureSpec& spec) {
  spec.validate();
  const std::size_t n = p.dim();
  if (n == 1) {
    return circle_mean([&](Complex z) { return f(std::span<const Complex>(&z, 1)); }, p.center()[0], p.radii()[0],
                       spec);
  }
  auto make = [&](int, int na) {
    std::vector<FactorRule> rules;
    for (std::size_t j = 0; j < n; ++j) rules.push_back(torus_factor_rule(p.radii()[j], na));
    return rules;
  };
  return refine_tensor(f, p.center(), n, spec, 1, spec.angular_nodes, true, make);
}

IntegralResult mean_over_segment(const Integrand& f, const Segment& seg, const QuadratureSpec& spec) {
  spec.validate();
  std::vector<Complex> z(seg.dim());
  auto g = [&](double t) {
    seg.point_at(t, z);
    return f(z);
  };
  AdaptiveOptions opt;
  opt.rel_tol = spec.target_rel_error;
  opt.abs_tol = spec.target_rel_error;
  return integrate_adaptive(g, 0.0, 1.0, opt);
}

// ---------------------------------------------------------------------------
// Polytopes: stratified sampling of the bounding box with hull rejection,
// replicated in independent batches for the error estimate.

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename Visit>
std::int64_t stratified_batch(const ConvexPolytope& a, std::int64_t count, std::uint64_t seed, Visit visit) {
  const std::size_t d = a.real_dim();
  std::mt19937_64 rng(seed);
  auto strata = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(count), 1.0 / d) + 1e-9));
  strata = std::max<std::int64_t>(1, strata);
  const std::int64_t cells = ipow(strata, d);
  std::vector<double> x(d);
  std::vector<std::int64_t> cell(d, 0);
  std::int64_t drawn = 0;
  for (std::int64_t i = 0; i < count; ++i) {
    const bool stratified = i < cells;
    for (std::size_t k = 0; k < d; ++k) {
      const double lo = a.box_min()[k], hi = a.box_max()[k];
      const double u = unit_uniform(rng);
      x[k] = stratified ? lo + (hi - lo) * (static_cast<double>(cell[k]) + u) / static_cast<double>(strata)
                        : lo + (hi - lo) * u;
    }
    if (stratified) {
      for (std::size_t k = 0; k < d; ++k) {
        if (++cell[k] < strata) break;
        cell[k] = 0;
      }
    }
    ++drawn;
    if (a.contains(x, 0.0)) visit(x);
  }
  return drawn;
}

std::uint64_t batch_seed(std::uint64_t seed, int b) {
  std::uint64_t s = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(b + 1);
  s ^= s >> 31;
  return s;
}

}  // namespace

std::vector<std::vector<double>> polytope_samples(const ConvexPolytope& a, std::int64_t count, std::uint64_t seed,
                                                  int batches, std::int64_t* drawn) {
  std::vector<std::vector<double>> pts;
  std::int64_t total = 0;
  for (int b = 0; b < batches; ++b)
    total += stratified_batch(a, count / batches, batch_seed(seed, b), [&](const std::vector<double>& x) { pts.push_back(x); });
  if (drawn) *drawn = total;
  return pts;
}

IntegralResult mean_over_polytope(const Integrand& f, const ConvexPolytope& a, const QuadratureSpec& spec) {
  spec.validate();
  constexpr int kBatches = 16;
  const std::int64_t per_batch = spec.mc_samples / kBatches;
  std::vector<double> batch_sum(kBatches, 0.0), batch_count(kBatches, 0.0);
  std::int64_t drawn = 0;
  std::vector<Complex> z(a.dim());
  for (int b = 0; b < kBatches; ++b) {
    std::vector<double> vals;
    drawn += stratified_batch(a, per_batch, batch_seed(spec.seed, b), [&](const std::vector<double>& x) {
      for (std::size_t j = 0; j < z.size(); ++j) z[j] = {x[2 * j], x[2 * j + 1]};
      double v = f(z);
      if (std::isnan(v)) throw NumericalFailure("mean_over_polytope: integrand returned NaN");
      if (is_singular_value(v)) return;  // null set
      vals.push_back(v);
    });
    batch_sum[b] = pairwise_sum(vals);
    batch_count[b] = static_cast<double>(vals.size());
  }
  const double accepted = pairwise_sum(batch_count);
  if (accepted < 1e-3 * static_cast<double>(drawn) || accepted < kBatches)
    throw std::invalid_argument(
        "mean_over_polytope: degenerate polytope (hull acceptance rate below 1e-3); pass lower-dimensional sets as a "
        "Segment");
  IntegralResult out;
  out.value = pairwise_sum(batch_sum) / accepted;
  std::vector<double> dev;
  int used = 0;
  for (int b = 0; b < kBatches; ++b) {
    if (batch_count[b] == 0.0) continue;
    const double m = batch_sum[b] / batch_count[b];
    dev.push_back((m - out.value) * (m - out.value));
    ++used;
  }
  const double var = used > 1 ? pairwise_sum(dev) / (used - 1) : 0.0;
  out.abs_error_estimate = 3.0 * std::sqrt(var / used);
  out.nodes_used = drawn;
  return out;
}

// ---------------------------------------------------------------------------

IntegralResult mean_over_polydisc(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec) {
  if (f.dim() != p.dim()) throw std::invalid_argument("mean_over_polydisc: dimension mismatch");
  return mean_over_polydisc(f.evaluator(), p, spec, f.meta().multicircular);
}

IntegralResult mean_over_shilov(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec) {
  if (f.dim() != p.dim()) throw std::invalid_argument("mean_over_shilov: dimension mismatch");
  if (f.meta().multicircular && p.centered_at_origin()) {
    std::vector<Complex> z(p.dim());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = p.radii()[j];
    IntegralResult out;
    out.value = f(z);
    out.nodes_used = 1;
    return out;
  }
  return mean_over_shilov(f.evaluator(), p, spec);
}

IntegralResult mean_over_segment(const PshFunction& f, const Segment& seg, const QuadratureSpec& spec) {
  if (f.dim() != seg.dim()) throw std::invalid_argument("mean_over_segment: dimension mismatch");
  return mean_over_segment(f.evaluator(), seg, spec);
}

IntegralResult mean_over_polytope(const PshFunction& f, const ConvexPolytope& a, const QuadratureSpec& spec) {
  if (f.dim() != a.dim()) throw std::invalid_argument("mean_over_polytope: dimension mismatch");
  return mean_over_polytope(f.evaluator(), a, spec);
}

IntegralResult mean_over_region(const Integrand& f, const Region& s, const QuadratureSpec& spec, bool radial_only) {
  struct V {
    const Integrand& f;
    const QuadratureSpec& spec;
    bool radial_only;
    IntegralResult operator()(const Polydisc& p) const { return mean_over_polydisc(f, p, spec, radial_only); }
    IntegralResult operator()(const AnisotropicBox& b) const {
      return mean_over_polydisc(f, b.as_polydisc(), spec, radial_only);
    }
    IntegralResult operator()(const Segment& seg) const { return mean_over_segment(f, seg, spec); }
    IntegralResult operator()(const ConvexPolytope& a) const { return mean_over_polytope(f, a, spec); }
  };
  return std::visit(V{f, spec, radial_only}, s);
}

IntegralResult mean_over_region(const PshFunction& f, const Region& s, const QuadratureSpec& spec) {
  if (f.dim() != region_dim(s)) throw std::invalid_argument("mean_over_region: dimension mismatch");
  return mean_over_region(f.evaluator(), s, spec, f.meta().multicircular);
}

}  // namespace pshosc
