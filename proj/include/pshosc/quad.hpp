#pragma once
// Deterministic integration over polydiscs, distinguished boundaries,
// segments and convex polytopes. All routines return normalized means
// (1/|S|) int_S f together with an error estimate.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pshosc/core.hpp"

namespace pshosc {

struct QuadratureSpec {
  int radial_nodes = 16;    // Gauss-Legendre points per radial factor
  int angular_nodes = 32;   // equispaced points per angle, power of two
  double target_rel_error = 1e-10;
  int max_refinements = 3;
  std::int64_t mc_samples = 200000;
  std::uint64_t seed = 7;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct IntegralResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::int64_t nodes_used = 0;
  int refinements = 0;
  bool converged = true;
  /// Set when refinement makes the value grow without bound.
  bool divergent = false;
};

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// Cached n-point rule, computed by Newton iteration on P_n.
const GaussLegendreRule& gauss_legendre(int n);

struct AdaptiveOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_depth = 40;
  int max_intervals = 4000;
};

/// Global adaptive Gauss-Kronrod (7/15) on [a, b]. Values below -1e30 are
/// treated as the -infinity sentinel: the containing interval is split
/// toward the singular point instead of being accepted.
IntegralResult integrate_adaptive(const std::function<double(double)>& g, double a, double b,
                                  const AdaptiveOptions& opt = {});

/// Global adaptive tensor Gauss-Kronrod on a rectangle, splitting each cell
/// along the axis with the larger error estimate. Sentinel handling as above.
IntegralResult integrate_adaptive_2d(const std::function<double(double, double)>& g, double ax, double bx, double ay,
                                     double by, const AdaptiveOptions& opt = {});

/// int_{-inf}^0 g(t) d(e^{2t}); the probability measure on the log-radius.
/// The lower limit is pushed out until the tail is negligible; a tail that
/// does not shrink marks the result divergent.
IntegralResult integrate_log_radial(const std::function<double(double)>& g, const AdaptiveOptions& opt = {});

/// Mean over the circle |z - c| = rho, trapezoid with doubling and an
/// adaptive fallback for near-singular integrands.
IntegralResult circle_mean(const std::function<double(Complex)>& g, Complex center, double rho,
                           const QuadratureSpec& spec);

using Integrand = std::function<double(std::span<const Complex>)>;

IntegralResult mean_over_polydisc(const Integrand& f, const Polydisc& p, const QuadratureSpec& spec);
/// With radial_only set and p centered at the origin, f is assumed to
/// depend only on |z_j| and the angular rule collapses to one node.
IntegralResult mean_over_polydisc(const Integrand& f, const Polydisc& p, const QuadratureSpec& spec,
                                  bool radial_only);
IntegralResult mean_over_shilov(const Integrand& f, const Polydisc& p, const QuadratureSpec& spec);
IntegralResult mean_over_segment(const Integrand& f, const Segment& seg, const QuadratureSpec& spec);
IntegralResult mean_over_polytope(const Integrand& f, const ConvexPolytope& a, const QuadratureSpec& spec);

IntegralResult mean_over_polydisc(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec);
IntegralResult mean_over_shilov(const PshFunction& f, const Polydisc& p, const QuadratureSpec& spec);
IntegralResult mean_over_segment(const PshFunction& f, const Segment& seg, const QuadratureSpec& spec);
IntegralResult mean_over_polytope(const PshFunction& f, const ConvexPolytope& a, const QuadratureSpec& spec);

/// Mean over any region kind (boxes are integrated as their polydisc).
/// radial_only has the meaning of mean_over_polydisc and is ignored for
/// segments and polytopes.
IntegralResult mean_over_region(const Integrand& f, const Region& s, const QuadratureSpec& spec,
                                bool radial_only = false);
IntegralResult mean_over_region(const PshFunction& f, const Region& s, const QuadratureSpec& spec);

/// Seeded stratified points of the polytope's bounding box that fall in the
/// hull, as used by mean_over_polytope; grouped in `batches` replicates.
std::vector<std::vector<double>> polytope_samples(const ConvexPolytope& a, std::int64_t count,
                                                  std::uint64_t seed, int batches = 16,
                                                  std::int64_t* drawn = nullptr);

/// Sum with a fixed pairwise reduction tree.
double pairwise_sum(std::span<const double> v);

}  // namespace pshosc
