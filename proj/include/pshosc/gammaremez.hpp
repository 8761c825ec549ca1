#pragma once
// The constant gamma of the segment estimate, closed forms for log|z| on
// segments and the Remez-type bound UO_A(log|p|) <= gamma deg p.

#include <cstdint>
#include <string>
#include <vector>

#include "pshosc/core.hpp"
#include "pshosc/quad.hpp"

namespace pshosc {

struct GammaResult {
  double gamma = 0.0;
  double a0 = 0.0;  // 1 - gamma
  int iterations = 0;
  double residual = 0.0;  // |gamma + log(gamma - 1)|
};

/// Root of gamma + log(gamma - 1) = 0 by bisection on (1 + 1e-9, 2) to width
/// `tol`, then Newton.
GammaResult gamma_constant(double tol = 1e-12);

/// gamma_constant at full precision, computed once per process.
const GammaResult& cached_gamma();

/// sup - mean of log|z| over the segment [a, b].
double uo_segment_log(Complex a, Complex b, const QuadratureSpec& spec = {});

/// UO of log|z| on [a, 1] for real a in [-1, 1).
double uo_segment_log_real(double a);

struct RemezReport {
  std::string polynomial_id;
  std::string region_id;
  int degree = 0;
  double uo = 0.0;
  double uo_error = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

inline constexpr double kRemezTolerance = 1e-6;

/// Region must be a segment, a polytope or a polydisc.
RemezReport remez_check(const Polynomial& p, const Region& a, const QuadratureSpec& spec);

/// Seeded random pairs: dimension 1..3, degree 1..deg_max, segments in every
/// dimension, polytopes for n <= 2 and discs for n = 1. Roots lie within
/// distance 2 of the region centroid with multiplicities 1..3.
std::vector<RemezReport> remez_sweep(int count, std::uint64_t seed, int deg_max, const QuadratureSpec& spec);

/// Segments [c + s a e^{i theta}, c + s e^{i theta}] with p = (w . z - c)^m and
/// a sweeping a grid around 1 - gamma; the maximum ratio approaches gamma.
std::vector<RemezReport> remez_sharpness(const QuadratureSpec& spec, int grid = 41);

struct RayRow {
  std::vector<double> direction;
  double length = 0.0;
  double uo = 0.0;
  double ratio = 0.0;
  double sup_on_ray = 0.0;
  double sup_gap = 0.0;  // sup over the ray minus log|p(z0)|
};

struct RayAudit {
  std::vector<double> z0;
  double sup = 0.0;
  int degree = 0;
  std::vector<RayRow> rays;
  double max_ratio = 0.0;
  double max_sup_gap = 0.0;
  /// UO over A itself. Each ray carries its 1-D uniform measure while A
  /// weights a ray by r^{2n-1} dr, so this can exceed every per-ray value.
  double region_uo = 0.0;
  double region_ratio = 0.0;
  /// Per-ray bounds and sup equality; says nothing about region_ratio.
  bool pass = false;
};

inline constexpr double kRaySupTolerance = 1e-6;

/// One ray from z0 (a point of A in real coordinates) along v to the boundary.
RayRow audit_ray(const Polynomial& p, const ConvexPolytope& a, std::span<const double> z0, std::span<const double> v,
                 const QuadratureSpec& spec);

/// z0 = argmax_A |p|, then `rays` seeded directions from z0.
RayAudit ray_decomposition_audit(const Polynomial& p, const ConvexPolytope& a, int rays, const QuadratureSpec& spec,
                                 std::uint64_t seed = 7);

}  // namespace pshosc
