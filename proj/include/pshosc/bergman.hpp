#pragma once
// Weighted Bergman kernels at the origin of polydiscs centered at 0, and the
// identities and bounds built on F(phi)(t, 0) = log K_{phi^t, D^n}(0).

#include <optional>
#include <string>
#include <vector>

#include "pshosc/core.hpp"
#include "pshosc/osc.hpp"
#include "pshosc/quad.hpp"

namespace pshosc {

/// Weight e^{-epsilon phi}.
struct WeightSpec {
  PshFunction phi;
  double epsilon = 1.0;
  bool multicircular = false;
};

/// Reads the multicircular flag from the metadata and spot-checks it on
/// seeded random phases (equality to 1e-10); a false claim throws.
WeightSpec make_weight(const PshFunction& phi, double epsilon, std::uint64_t seed = 7);

enum class BergmanMethod { Auto, Circular, Gram };

std::string method_name(BergmanMethod m);

struct BergmanResult {
  double value = 0.0;
  /// log(|P| K(0)), kept separately since K itself over- or underflows on
  /// tiny polydiscs.
  double log_normalized = 0.0;
  BergmanMethod method = BergmanMethod::Circular;
  int truncation_degree = 0;
  double convergence_gap = 0.0;
  double condition_estimate = 1.0;
  bool pivoted = false;
  bool flagged = false;
  std::string note;
  /// Gram only: exponents of the monomial basis and the coefficients of
  /// K(., 0) in the basis z^alpha / r^alpha.
  std::vector<std::vector<int>> basis;
  std::vector<Complex> section;
};

inline constexpr double kGramConditionLimit = 1e12;
inline constexpr double kGramConditionFail = 1e15;

/// K_{epsilon phi, P}(0) for P centered at 0. Auto picks Circular when the
/// weight is multicircular. Gram uses per-coordinate degree caps 2, 4, 6, 8
/// and stops when the relative change drops below spec.target_rel_error.
BergmanResult bergman_origin(const WeightSpec& w, const Polydisc& p, const QuadratureSpec& spec,
                             BergmanMethod method = BergmanMethod::Auto);

/// phi(t z).
PshFunction dilate(const PshFunction& phi, std::span<const Complex> t);

/// F(epsilon phi)(t, 0) = log(|D_t| K_{epsilon phi, D_t}(0)) - n log pi,
/// through the shrunk polydisc D_t. All |t_j| in (0, 1).
double F_eval(const WeightSpec& w, std::span<const Complex> t, const QuadratureSpec& spec,
              BergmanMethod method = BergmanMethod::Auto);

struct SandwichReport {
  double lower = 0.0;
  double middle = 0.0;
  double upper = 1.0;
  double sup = 0.0;
  bool pass = false;
};

inline constexpr double kBergmanTolerance = 1e-9;

SandwichReport sandwich_check(const WeightSpec& w, const Polydisc& p, const QuadratureSpec& spec);

struct OtReport {
  double kernel = 0.0;
  double bound = 0.0;  // e^{epsilon phi(0)} / pi^n
  double margin = 0.0;
  bool pass = false;
};

/// On the unit polydisc of dimension phi.dim().
OtReport ot_check(const WeightSpec& w, const QuadratureSpec& spec);

struct MonotonicityReport {
  std::vector<double> f_values;
  double lower_bound = 0.0;  // epsilon phi(0) - n log pi
  bool bound_holds = false;
  bool monotone = true;  // checked for multicircular weights only
  bool pass = false;
};

/// Each entry of t_path lists |t_1|, ..., |t_n|; entries increase coordinatewise.
MonotonicityReport monotonicity_check(const WeightSpec& w, const std::vector<std::vector<double>>& t_path,
                                      const QuadratureSpec& spec);

struct HessianLevel {
  double h = 0.0;
  Eigen::MatrixXcd matrix;
};

struct HessianCheckReport {
  std::vector<HessianLevel> levels;
  Eigen::MatrixXcd extrapolated;
  Eigen::MatrixXcd target;
  double max_abs_dev = 0.0;
  double observed_order = 0.0;  // from the diagonal, NaN when undetermined
  double hermitian_defect = 0.0;
};

inline constexpr double kHessianStepFloor = 1e-3;
/// Radius used for coordinates that sit at t_j = 0 on a stencil.
inline constexpr double kTinyRadius = 1e-8;

/// Finite-difference d^2 F / dt_j d conj(t_k) near t = 0 for each h, one
/// Richardson step on the last two steps, compared with
/// (1/2) diag(phi_{z_j conj z_j}(0)) scaled by epsilon.
HessianCheckReport hessian_limit_check(const WeightSpec& w, const std::vector<double>& h_values,
                                       const QuadratureSpec& spec, BergmanMethod method = BergmanMethod::Auto);

struct LelongPreservationReport {
  SlopeFit rhs;
  std::vector<SlopeFit> lhs;  // one per epsilon
  std::vector<double> eps_values;
  std::vector<bool> agrees;
  std::optional<double> eps_used;  // largest agreeing epsilon
  bool flagged = false;
};

inline constexpr double kSlopeAgreement = 0.05;

/// lhs: sup over t in P_{r^a} of F(epsilon phi)(t, 0) / epsilon, attained at
/// the corner t_j = r^{a_j}, fitted against log r; rhs from directional_lelong.
LelongPreservationReport lelong_preservation_check(const PshFunction& phi, const std::vector<double>& a,
                                                   const std::vector<double>& eps_values,
                                                   const std::vector<double>& r_grid, const QuadratureSpec& spec);

}  // namespace pshosc
