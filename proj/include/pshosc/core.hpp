#pragma once
// Domain types for regions and test functions, and the catalog of named
// plurisubharmonic functions with closed-form metadata.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace pshosc {

using Complex = std::complex<double>;
using HermitianMatrix = Eigen::MatrixXcd;

/// Sentinel returned by functions evaluated on their polar set.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Values below -1e30, and +inf, are treated as the infinite sentinel by quadrature.
inline constexpr double kSingularCutoff = -1e30;

inline bool is_singular_value(double v) { return !(v >= kSingularCutoff) || std::isinf(v); }

/// Numerical failure (non-convergence escalated by a caller, ill-conditioning).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-form value and its numerical counterpart disagree.
class OracleViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point of C^n, n >= 1, with finite components.
class ComplexVector {
 public:
  ComplexVector(std::initializer_list<Complex> c);
  explicit ComplexVector(std::vector<Complex> c);

  static ComplexVector zeros(std::size_t n);

  std::size_t dim() const { return c_.size(); }
  Complex operator[](std::size_t i) const { return c_[i]; }
  std::span<const Complex> span() const { return c_; }
  const std::vector<Complex>& components() const { return c_; }

  double max_abs() const;
  double norm() const;

 private:
  std::vector<Complex> c_;
};

/// P = {|z_j - c_j| < r_j}.
class Polydisc {
 public:
  Polydisc(ComplexVector center, std::vector<double> polyradius);

  std::size_t dim() const { return center_.dim(); }
  const ComplexVector& center() const { return center_; }
  const std::vector<double>& radii() const { return radii_; }
  double volume() const;

  /// tau * P: same center, polyradius scaled by tau.
  Polydisc scaled(double tau) const;
  /// P_t: polyradius r_j * exp(t_j).
  Polydisc log_shifted(std::span<const double> t) const;
  bool centered_at_origin() const;

 private:
  ComplexVector center_;
  std::vector<double> radii_;
};

/// One-dimensional disc {|z - c| < r}.
Polydisc make_disc(Complex center, double radius);

/// P_{r^a}(c) = {|z_j - c_j| <= r^{a_j}}.
class AnisotropicBox {
 public:
  AnisotropicBox(ComplexVector center, double scale, std::vector<double> exponents);

  std::size_t dim() const { return center_.dim(); }
  const ComplexVector& center() const { return center_; }
  double scale() const { return scale_; }
  const std::vector<double>& exponents() const { return exponents_; }

  std::vector<double> radii() const;
  Polydisc as_polydisc() const;

 private:
  ComplexVector center_;
  double scale_;
  std::vector<double> exponents_;
};

/// Closed segment {a + t (b - a) : t in [0, 1]} in C^n.
class Segment {
 public:
  Segment(ComplexVector a, ComplexVector b);
  Segment(Complex a, Complex b);

  std::size_t dim() const { return a_.dim(); }
  const ComplexVector& a() const { return a_; }
  const ComplexVector& b() const { return b_; }
  void point_at(double t, std::span<Complex> out) const;
  double length() const;

 private:
  ComplexVector a_;
  ComplexVector b_;
};

/// Convex hull of a vertex list in R^{2n}, with coordinates ordered
/// (Re z_1, Im z_1, Re z_2, Im z_2, ...).
class ConvexPolytope {
 public:
  explicit ConvexPolytope(std::vector<std::vector<double>> vertices);

  std::size_t dim() const { return real_dim_ / 2; }
  std::size_t real_dim() const { return real_dim_; }
  const std::vector<std::vector<double>>& vertices() const { return vertices_; }

  /// Affine dimension of the hull; equals real_dim() when full-dimensional.
  std::size_t affine_dim() const { return affine_dim_; }
  bool full_dimensional() const { return affine_dim_ == real_dim_; }

  bool contains(std::span<const double> x, double tol = 1e-12) const;

  const std::vector<double>& box_min() const { return box_min_; }
  const std::vector<double>& box_max() const { return box_max_; }
  std::vector<double> vertex_centroid() const;

  /// Largest s >= 0 with x + s v inside the hull (x assumed inside).
  /// Only valid for full-dimensional polytopes.
  double ray_exit(std::span<const double> x, std::span<const double> v) const;

 private:
  struct Facet {
    std::vector<double> normal;  // in affine coordinates
    double offset;
  };
  std::vector<double> to_affine(std::span<const double> x) const;

  std::vector<std::vector<double>> vertices_;
  std::size_t real_dim_ = 0;
  std::size_t affine_dim_ = 0;
  std::vector<double> origin_;
  std::vector<std::vector<double>> basis_;  // orthonormal, affine_dim_ rows
  std::vector<Facet> facets_;
  std::vector<double> box_min_, box_max_;
};

using Region = std::variant<Polydisc, AnisotropicBox, Segment, ConvexPolytope>;

std::size_t region_dim(const Region& s);
std::string region_kind(const Region& s);

/// Point of C^n to R^{2n} and back.
std::vector<double> to_real(std::span<const Complex> z);
std::vector<Complex> to_complex(std::span<const double> x);

/// Exact membership for polydiscs, boxes and segments (segment distance
/// tolerance 1e-12); hull test for polytopes. Regions are treated as closed.
bool region_membership(const Region& s, const ComplexVector& z);

/// max_j r_j <= min_j r_j^{1/N}.
bool finite_type_check(const Polydisc& p, double n_type);

/// One factor (w . z - root)^multiplicity of a polynomial on C^n.
struct LinearFactor {
  std::vector<Complex> direction;
  Complex root;
  int multiplicity = 1;
};

/// Polynomial stored as lead * prod_j (w_j . z - a_j)^{m_j}.
/// In one variable every direction is 1 and the a_j are the roots.
class Polynomial {
 public:
  Polynomial(std::size_t dim, Complex lead, std::vector<LinearFactor> factors);

  static Polynomial from_roots(std::vector<Complex> roots, std::vector<int> multiplicities = {},
                               Complex lead = 1.0);

  std::size_t dim() const { return dim_; }
  Complex lead() const { return lead_; }
  const std::vector<LinearFactor>& factors() const { return factors_; }
  int degree() const;

  Complex operator()(std::span<const Complex> z) const;
  /// log|p(z)|, summed factor by factor; -inf on the zero set.
  double log_abs(std::span<const Complex> z) const;

  /// Restriction to the complex line base + zeta * dir, as a univariate
  /// polynomial in zeta.
  Polynomial restrict_to_line(std::span<const Complex> base, std::span<const Complex> dir) const;

  /// Coefficients c_0..c_d of a univariate polynomial (display only).
  std::vector<Complex> coefficients() const;

  std::string describe() const;

 private:
  std::size_t dim_;
  Complex lead_;
  std::vector<LinearFactor> factors_;
};

struct FunctionMeta {
  std::optional<int> degree;
  std::optional<double> lelong_class_constant;
  /// sup over the closed polydisc, when known in closed form for that polydisc.
  std::function<std::optional<double>(const Polydisc&)> closed_sup_on_polydisc;
  std::function<HermitianMatrix(std::span<const Complex>)> smooth_hessian_at;
  std::optional<Polynomial> polynomial;
  /// Depends only on (|z_1|, ..., |z_n|).
  bool multicircular = false;
};

using Evaluator = std::function<double(std::span<const Complex>)>;

class PshFunction {
 public:
  PshFunction(std::string name, std::size_t dim, Evaluator eval, FunctionMeta meta = {},
              bool psh = true);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  const FunctionMeta& meta() const { return meta_; }
  bool is_psh() const { return psh_; }
  const Evaluator& evaluator() const { return eval_; }

  double operator()(std::span<const Complex> z) const { return eval_(z); }
  double operator()(const ComplexVector& z) const;

 private:
  std::string name_;
  std::size_t dim_;
  Evaluator eval_;
  FunctionMeta meta_;
  bool psh_;
};

using ParamMap = std::map<std::string, std::string>;

/// Registered names: log_abs, log_poly, lelong_max, counterexample, quadratic,
/// m_log, max_log, constant, re_z. Unknown names and invalid parameters throw
/// std::invalid_argument.
PshFunction catalog_lookup(const std::string& name, const ParamMap& params = {});
std::vector<std::string> catalog_names();

/// log|p| for a polynomial in roots form.
PshFunction log_poly_function(const Polynomial& p);

/// Hermitian quadratic form sum c_jk z_j conj(z_k); rejects non-PSD matrices.
PshFunction quadratic_function(const Eigen::MatrixXd& c);

/// Parameter-value helpers shared with the CLI grammar; lists use ';'.
std::vector<double> parse_real_list(const std::string& s);
std::vector<Complex> parse_complex_list(const std::string& s);
Complex parse_complex(const std::string& s);

}  // namespace pshosc
