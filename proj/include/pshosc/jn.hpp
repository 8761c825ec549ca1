#pragma once
// Empirical John-Nirenberg checks on anisotropic polydisc families.

#include <cstdint>
#include <optional>
#include <vector>

#include "pshosc/core.hpp"
#include "pshosc/quad.hpp"

namespace pshosc {

/// rho(z, w) = max_k |z_k - w_k|^{1/a_k}.
double quasi_distance(const ComplexVector& z, const ComplexVector& w, const std::vector<double>& a);

/// Upper bound c in rho(x, y) <= c (rho(x, z) + rho(z, y)): max(1, 2^{max 1/a_k - 1}).
double quasi_triangle_constant(const std::vector<double>& a);

/// Point `index` of the Halton sequence in [0, 1)^dim (bases 2, 3, 5, ...).
std::vector<double> halton_point(std::uint64_t index, std::size_t dim);

struct DecayTable {
  std::vector<double> t_values;
  /// log of the normalized measure of {|phi - phi_B0| > t}; -inf once empty.
  std::vector<double> log_measures;
  double mean = 0.0;
  double median_deviation = 0.0;
  std::int64_t samples = 0;
  /// Grid indices used in the fit.
  std::vector<std::size_t> tail;
  double fitted_slope = 0.0;
  double fitted_intercept = 0.0;
  double residual_rms = 0.0;
};

/// Tail points need at least this many samples above t.
inline constexpr std::int64_t kMinTailCount = 100;


/// t = 0, 0.25, ..., 8.
std::vector<double> default_t_grid();

/// Seeded, shifted Halton sampling of B0 (10^6 points per complex dimension
/// unless `samples` is positive). The line is fitted to the grid points past
/// the median of |phi - mean| that keep kMinTailCount samples; fewer than two
/// such points give the slope -infinity.
DecayTable distribution_estimate(const PshFunction& f, const AnisotropicBox& b0, const std::vector<double>& t_grid,
                                 const QuadratureSpec& spec, std::uint64_t seed, std::int64_t samples = 0);

struct EpsilonRow {
  double eps = 0.0;
  std::vector<double> member_means;  // +inf where divergent
  double sup_mean = 0.0;
  bool divergent = false;
  double fluctuation = 1.0;       // max / min over the family
  double theil_sen_slope = 0.0;   // log mean against log r
  bool bounded = false;
};

struct EpsilonReport {
  std::size_t family_size = 0;
  std::vector<double> eps_values;
  std::vector<double> sup_means;
  std::vector<EpsilonRow> rows;
  double threshold = 1e6;
  /// Largest eps of the leading run of bounded rows; 0 when the first fails.
  double eps0_estimate = 0.0;
};

inline constexpr double kFluctuationLimit = 10.0;
inline constexpr double kTrendLimit = 0.1;

/// (1 / |P|) int_P e^{-eps (phi - sup_P phi)} for one member; nullopt when
/// the integral diverges.
std::optional<double> exponential_mean(const PshFunction& f, const AnisotropicBox& p, double eps,
                                       const QuadratureSpec& spec);

/// Median of pairwise slopes.
double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y);

EpsilonReport epsilon0_search(const PshFunction& f, const std::vector<AnisotropicBox>& family,
                              const std::vector<double>& eps_grid, const QuadratureSpec& spec,
                              double threshold = 1e6);

/// Boxes P_{r^a}(c) with r = 2^{-k}, k = 0 .. count - 1.
std::vector<AnisotropicBox> dyadic_family(const ComplexVector& center, const std::vector<double>& a, int count);

}  // namespace pshosc
