#pragma once
// Upper and mean oscillation over regions, the Harnack decomposition, the
// Lelong-class bound and the convexity lemmas behind them.

#include <cstdint>
#include <string>
#include <vector>

#include "pshosc/core.hpp"
#include "pshosc/quad.hpp"

namespace pshosc {

struct SupResult {
  double value = 0.0;
  double error = 0.0;
  std::vector<Complex> argmax;
  bool closed_form = false;
};

/// sup of f over the closed region. Psh functions on polydiscs and boxes are
/// maximized on the distinguished boundary only. When f carries a closed-form
/// sup for the polydisc it is cross-checked against the numerical value and
/// returned; a disagreement beyond 1e-6 throws OracleViolation.
SupResult sup_on_region(const PshFunction& f, const Region& s, const QuadratureSpec& spec);

struct OscillationReport {
  double sup = 0.0;
  double mean = 0.0;
  double uo = 0.0;
  double mo = 0.0;
  double sup_error = 0.0;
  double mean_error = 0.0;
  double mo_error = 0.0;
  bool converged = true;
};

OscillationReport oscillation(const PshFunction& f, const Region& s, const QuadratureSpec& spec);

struct DecompositionReport {
  double i1 = 0.0, i2 = 0.0, j1 = 0.0, j2 = 0.0;
  int n = 0;
  /// Combined error estimate of the four quantities.
  double tolerance = 0.0;
  /// False when a mean stopped at max_refinements; tolerance still bounds it.
  bool converged = true;
  bool i1_bound_holds(double slack) const;
  bool i2_bound_holds(double slack) const;
};

/// I1 = sup_P - mean_{dP}, I2 = mean_{dP} - mean_P, J1 = sup_P - sup_{P/2},
/// J2 = b(0) - b(-1/2, ..., -1/2) with b(t) the mean over the torus of P_t.
DecompositionReport harnack_decomposition(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec);

/// Torus mean of f over P_t, radii r_j e^{t_j}.
double boundary_mean(const PshFunction& f, const Polydisc& p, std::span<const double> t, const QuadratureSpec& spec);

struct LelongClassReport {
  std::vector<double> uo;
  std::vector<double> uo_error;
  double max_uo = 0.0;
  /// False when some mean stopped at max_refinements; pass then uses uo + uo_error.
  bool converged = true;
  double bound = 0.0;        // 3^n
  double proof_bound = 0.0;  // 3^n log 2 + 1/2
  bool pass = false;
};

/// Requires lelong_class_constant metadata; the growth hypothesis
/// f <= c + max_j log(1 + |z_j|) is spot-checked on seeded points and a
/// violation throws std::invalid_argument.
LelongClassReport lelong_class_check(const PshFunction& f, const std::vector<Polydisc>& family,
                                     const QuadratureSpec& spec, std::uint64_t seed = 7);

/// Convex function on R^n, increasing in each variable.
struct ConvexHandle {
  std::string name;
  std::size_t dim = 1;
  std::function<double(std::span<const double>)> g;
};

ConvexHandle convex_max(std::size_t n);
ConvexHandle convex_logsumexp(std::size_t n);
ConvexHandle convex_linear(std::vector<double> slopes);
/// max_j log(1 + e^{t_j}).
ConvexHandle convex_lelong_max(std::size_t n);
/// Single-variable log(1 + e^{t}) on the first coordinate.
ConvexHandle convex_softplus(std::size_t n);
/// t -> mean of f over the torus of P_t.
ConvexHandle convex_boundary_mean(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec);

enum class GapKind { FiniteType, Lelong };

struct GapReport {
  double max_gap = 0.0;
  std::vector<double> argmax;
  double bound = 0.0;
  int samples = 0;
  bool pass = false;
};

/// FiniteType: sup over sampled t in A_N of g(t) - g(t - 1) against
/// nN [g(1,...,1) - g(0)]. Lelong: sup over sampled t of g(t) - g(t - M)
/// against M, after checking g <= max_j log(1 + e^{t_j}).
/// `param` is N or M; samples include the diagonal.
GapReport convexity_gap_check(const ConvexHandle& g, GapKind kind, double param, int samples, std::uint64_t seed);

struct BarycenterReport {
  double integral = 0.0;       // int f d(e^{2t}) on (-40, 0)
  double at_barycenter = 0.0;  // f(-1/2)
  double min_gap = 0.0;        // over the base function and its trials
  int trials = 0;
  bool pass = false;
};

/// The base function plus `trials` seeded variants f(a t + b) + c t, a > 0.
BarycenterReport barycenter_inequality_check(const ConvexHandle& f, int trials, std::uint64_t seed = 7);

struct CounterexampleRow {
  double x = 0.0;
  double gap = 0.0;
  double gap_closed_form = 0.0;
  double uo = 0.0;
  double uo_error = 0.0;
  double mo_lower = 0.0;
  double mo_lower_error = 0.0;
};

/// (5 - x) / (sqrt(6 - 2x) + sqrt(1 - x)).
double counterexample_gap_formula(double x);

/// For r = (e^x, e^{-1}): gap f(x,-1) - f(x-1,-2), UO over the bidisc D_r and
/// the MO lower bound e^{-2} (sup - mean) over D_{e^{-1/2} r}.
std::vector<CounterexampleRow> counterexample_scan(const std::vector<double>& x_values, const QuadratureSpec& spec);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::vector<double> r_values;
  std::vector<double> y_values;
  bool non_asymptotic = false;
};

/// Least-squares fit of y against log r; flags residual_rms > 0.05 |slope|.
SlopeFit fit_log_slope(const std::vector<double>& r, const std::vector<double>& y);

/// Slope of sup_{P_{r^a}(0)} f against log r over a log-spaced grid in (0, 1/2].
SlopeFit directional_lelong(const PshFunction& f, const std::vector<double>& a, const std::vector<double>& r_grid,
                            const QuadratureSpec& spec);

/// UO of log|z| over the unit disc centered at x >= 0, integrating the
/// circle means log max(x, c) over the radius c.
double disc_log_uo(double x);

/// `count` points r_max * ratio^k, k = 0..count-1.
std::vector<double> log_spaced(double r_max, double ratio, int count);

}  // namespace pshosc
