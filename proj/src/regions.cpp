#include "pshosc/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pshosc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool all_finite(const std::vector<Complex>& c) {
  return std::all_of(c.begin(), c.end(), [](Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

}  // namespace

ComplexVector::ComplexVector(std::initializer_list<Complex> c) : ComplexVector(std::vector<Complex>(c)) {}

ComplexVector::ComplexVector(std::vector<Complex> c) : c_(std::move(c)) {
  require(!c_.empty(), "ComplexVector: dimension must be >= 1");
  require(all_finite(c_), "ComplexVector: components must be finite");
}

ComplexVector ComplexVector::zeros(std::size_t n) { return ComplexVector(std::vector<Complex>(n)); }

double ComplexVector::max_abs() const {
  double m = 0.0;
  for (auto z : c_) m = std::max(m, std::abs(z));
  return m;
}

double ComplexVector::norm() const {
  double s = 0.0;
  for (auto z : c_) s += std::norm(z);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------

Polydisc::Polydisc(ComplexVector center, std::vector<double> polyradius)
    : center_(std::move(center)), radii_(std::move(polyradius)) {
  require(radii_.size() == center_.dim(), "Polydisc: polyradius length must equal dimension");
  for (double r : radii_) require(std::isfinite(r) && r > 0.0, "Polydisc: radii must be positive");
}

double Polydisc::volume() const {
  double v = 1.0;
  for (double r : radii_) v *= M_PI * r * r;
  return v;
}

Polydisc Polydisc::scaled(double tau) const {
  std::vector<double> r(radii_);
  for (auto& x : r) x *= tau;
  return Polydisc(center_, std::move(r));
}

Polydisc Polydisc::log_shifted(std::span<const double> t) const {
  require(t.size() == radii_.size(), "Polydisc::log_shifted: dimension mismatch");
  std::vector<double> r(radii_);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] *= std::exp(t[j]);
  return Polydisc(center_, std::move(r));
}

bool Polydisc::centered_at_origin() const {
  for (auto z : center_.components())
    if (z != Complex{}) return false;
  return true;
}

Polydisc make_disc(Complex center, double radius) { return Polydisc(ComplexVector{center}, {radius}); }

AnisotropicBox::AnisotropicBox(ComplexVector center, double scale, std::vector<double> exponents)
    : center_(std::move(center)), scale_(scale), exponents_(std::move(exponents)) {
  require(exponents_.size() == center_.dim(), "AnisotropicBox: exponent count must equal dimension");
  require(std::isfinite(scale_) && scale_ > 0.0, "AnisotropicBox: scale must be positive");
  for (double a : exponents_) require(std::isfinite(a) && a > 0.0, "AnisotropicBox: exponents must be positive");
}

std::vector<double> AnisotropicBox::radii() const {
  std::vector<double> r(exponents_.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = std::pow(scale_, exponents_[j]);
  return r;
}

Polydisc AnisotropicBox::as_polydisc() const { return Polydisc(center_, radii()); }

Segment::Segment(ComplexVector a, ComplexVector b) : a_(std::move(a)), b_(std::move(b)) {
  require(a_.dim() == b_.dim(), "Segment: endpoint dimensions differ");
  require(a_.components() != b_.components(), "Segment: endpoints must differ");
}

Segment::Segment(Complex a, Complex b) : Segment(ComplexVector{a}, ComplexVector{b}) {}

void Segment::point_at(double t, std::span<Complex> out) const {
  for (std::size_t j = 0; j < a_.dim(); ++j) out[j] = a_[j] + t * (b_[j] - a_[j]);
}

double Segment::length() const {
  double s = 0.0;
  for (std::size_t j = 0; j < a_.dim(); ++j) s += std::norm(b_[j] - a_[j]);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// ConvexPolytope: the hull is stored in H-representation inside its affine
// hull. Facets are found by enumerating affinely independent vertex subsets;
// vertex counts in this project are small.

namespace {

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

ConvexPolytope::ConvexPolytope(std::vector<std::vector<double>> vertices) : vertices_(std::move(vertices)) {
  require(vertices_.size() >= 2, "ConvexPolytope: at least 2 vertices required");
  real_dim_ = vertices_.front().size();
  require(real_dim_ >= 2 && real_dim_ % 2 == 0, "ConvexPolytope: vertices must live in R^{2n}");
  for (const auto& v : vertices_) {
    require(v.size() == real_dim_, "ConvexPolytope: inconsistent vertex dimension");
    for (double x : v) require(std::isfinite(x), "ConvexPolytope: non-finite vertex");
  }

  box_min_.assign(real_dim_, std::numeric_limits<double>::infinity());
  box_max_.assign(real_dim_, -std::numeric_limits<double>::infinity());
  for (const auto& v : vertices_)
    for (std::size_t k = 0; k < real_dim_; ++k) {
      box_min_[k] = std::min(box_min_[k], v[k]);
      box_max_[k] = std::max(box_max_[k], v[k]);
    }

  // Affine hull via SVD of the difference vectors.
  origin_ = vertices_.front();
  const std::size_t m = vertices_.size();
  Eigen::MatrixXd diffs(real_dim_, m - 1);
  for (std::size_t i = 1; i < m; ++i)
    for (std::size_t k = 0; k < real_dim_; ++k) diffs(k, i - 1) = vertices_[i][k] - origin_[k];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double scale = sv.size() > 0 ? sv(0) : 0.0;
  require(scale > 0.0, "ConvexPolytope: all vertices coincide");
  affine_dim_ = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * scale) ++affine_dim_;
  basis_.assign(affine_dim_, std::vector<double>(real_dim_));
  for (std::size_t i = 0; i < affine_dim_; ++i)
    for (std::size_t k = 0; k < real_dim_; ++k) basis_[i][k] = svd.matrixU()(k, i);

  std::vector<std::vector<double>> pts;
  pts.reserve(m);
  for (const auto& v : vertices_) pts.push_back(to_affine(v));

  const std::size_t d = affine_dim_;
  const double tol = 1e-10 * scale;
  auto add_facet = [&](std::vector<double> normal, double offset) {
    for (const auto& f : facets_) {
      double dn = 0.0;
      for (std::size_t k = 0; k < d; ++k) dn = std::max(dn, std::abs(f.normal[k] - normal[k]));
      if (dn < 1e-9 && std::abs(f.offset - offset) < tol) return;
    }
    facets_.push_back({std::move(normal), offset});
  };

  if (d == 1) {
    double lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    add_facet({1.0}, hi);
    add_facet({-1.0}, -lo);
    return;
  }

  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  if (m < d) return;
  do {
    Eigen::MatrixXd a(d - 1, d);
    for (std::size_t i = 1; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) a(i - 1, k) = pts[idx[i]][k] - pts[idx[0]][k];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-10);
    Eigen::MatrixXd ker = lu.kernel();
    if (ker.cols() != 1) continue;
    Eigen::VectorXd nrm = ker.col(0).normalized();
    std::vector<double> normal(nrm.data(), nrm.data() + d);
    double offset = 0.0;
    for (std::size_t k = 0; k < d; ++k) offset += normal[k] * pts[idx[0]][k];
    bool above = false, below = false;
    for (const auto& p : pts) {
      double s = -offset;
      for (std::size_t k = 0; k < d; ++k) s += normal[k] * p[k];
      if (s > tol) above = true;
      if (s < -tol) below = true;
    }
    if (above && below) continue;
    if (above) {
      for (auto& x : normal) x = -x;
      offset = -offset;
    }
    add_facet(std::move(normal), offset);
  } while (next_combination(idx, m));
}

std::vector<double> ConvexPolytope::to_affine(std::span<const double> x) const {
  std::vector<double> y(affine_dim_, 0.0);
  for (std::size_t i = 0; i < affine_dim_; ++i)
    for (std::size_t k = 0; k < real_dim_; ++k) y[i] += basis_[i][k] * (x[k] - origin_[k]);
  return y;
}

bool ConvexPolytope::contains(std::span<const double> x, double tol) const {
  if (x.size() != real_dim_) throw std::invalid_argument("ConvexPolytope::contains: dimension mismatch");
  double extent = 0.0;
  for (std::size_t k = 0; k < real_dim_; ++k) extent = std::max(extent, box_max_[k] - box_min_[k]);
  const double atol = tol * std::max(1.0, extent);
  std::vector<double> y = to_affine(x);
  if (affine_dim_ < real_dim_) {
    double resid = 0.0;
    for (std::size_t k = 0; k < real_dim_; ++k) {
      double p = origin_[k];
      for (std::size_t i = 0; i < affine_dim_; ++i) p += basis_[i][k] * y[i];
      resid = std::max(resid, std::abs(p - x[k]));
    }
    if (resid > atol) return false;
  }
  for (const auto& f : facets_) {
    double s = -f.offset;
    for (std::size_t k = 0; k < affine_dim_; ++k) s += f.normal[k] * y[k];
    if (s > atol) return false;
  }
  return true;
}

std::vector<double> ConvexPolytope::vertex_centroid() const {
  std::vector<double> c(real_dim_, 0.0);
  for (const auto& v : vertices_)
    for (std::size_t k = 0; k < real_dim_; ++k) c[k] += v[k];
  for (auto& x : c) x /= static_cast<double>(vertices_.size());
  return c;
}

double ConvexPolytope::ray_exit(std::span<const double> x, std::span<const double> v) const {
  if (!full_dimensional()) throw std::invalid_argument("ConvexPolytope::ray_exit: polytope is degenerate");
  std::vector<double> y = to_affine(x);
  std::vector<double> dv(affine_dim_, 0.0);
  for (std::size_t i = 0; i < affine_dim_; ++i)
    for (std::size_t k = 0; k < real_dim_; ++k) dv[i] += basis_[i][k] * v[k];
  double s_max = std::numeric_limits<double>::infinity();
  for (const auto& f : facets_) {
    double nv = 0.0, slack = f.offset;
    for (std::size_t k = 0; k < affine_dim_; ++k) {
      nv += f.normal[k] * dv[k];
      slack -= f.normal[k] * y[k];
    }
    if (nv > 0.0) s_max = std::min(s_max, std::max(0.0, slack) / nv);
  }
  return s_max;
}

// ---------------------------------------------------------------------------

std::size_t region_dim(const Region& s) {
  return std::visit([](const auto& r) { return r.dim(); }, s);
}

std::string region_kind(const Region& s) {
  struct V {
    std::string operator()(const Polydisc& p) const { return p.dim() == 1 ? "disc" : "polydisc"; }
    std::string operator()(const AnisotropicBox&) const { return "box"; }
    std::string operator()(const Segment&) const { return "segment"; }
    std::string operator()(const ConvexPolytope&) const { return "polytope"; }
  };
  return std::visit(V{}, s);
}

std::vector<double> to_real(std::span<const Complex> z) {
  std::vector<double> x(2 * z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    x[2 * j] = z[j].real();
    x[2 * j + 1] = z[j].imag();
  }
  return x;
}

std::vector<Complex> to_complex(std::span<const double> x) {
  std::vector<Complex> z(x.size() / 2);
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = {x[2 * j], x[2 * j + 1]};
  return z;
}

namespace {

bool in_polydisc(const ComplexVector& c, const std::vector<double>& r, const ComplexVector& z) {
  for (std::size_t j = 0; j < c.dim(); ++j)
    if (std::abs(z[j] - c[j]) > r[j]) return false;
  return true;
}

}  // namespace

bool region_membership(const Region& s, const ComplexVector& z) {
  if (region_dim(s) != z.dim()) throw std::invalid_argument("region_membership: dimension mismatch");
  struct V {
    const ComplexVector& z;
    bool operator()(const Polydisc& p) const { return in_polydisc(p.center(), p.radii(), z); }
    bool operator()(const AnisotropicBox& b) const { return in_polydisc(b.center(), b.radii(), z); }
    bool operator()(const Segment& seg) const {
      // Closest point on the segment, then a distance test.
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < z.dim(); ++j) {
        Complex d = seg.b()[j] - seg.a()[j];
        num += std::real(std::conj(d) * (z[j] - seg.a()[j]));
        den += std::norm(d);
      }
      double t = std::clamp(num / den, 0.0, 1.0);
      double dist2 = 0.0;
      for (std::size_t j = 0; j < z.dim(); ++j) {
        Complex p = seg.a()[j] + t * (seg.b()[j] - seg.a()[j]);
        dist2 += std::norm(z[j] - p);
      }
      return std::sqrt(dist2) <= 1e-12;
    }
    bool operator()(const ConvexPolytope& poly) const { return poly.contains(to_real(z.span())); }
  };
  return std::visit(V{z}, s);
}

bool finite_type_check(const Polydisc& p, double n_type) {
  if (!(n_type >= 1.0)) throw std::invalid_argument("finite_type_check: N must be >= 1");
  const auto& r = p.radii();
  double max_r = *std::max_element(r.begin(), r.end());
  double min_root = std::numeric_limits<double>::infinity();
  for (double x : r) min_root = std::min(min_root, std::pow(x, 1.0 / n_type));
  return max_r <= min_root;
}

}  // namespace pshosc
