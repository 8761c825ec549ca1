#include "pshosc/core.hpp"

#include <cmath>
#include <sstream>

namespace pshosc {

Polynomial::Polynomial(std::size_t dim, Complex lead, std::vector<LinearFactor> factors)
    : dim_(dim), lead_(lead), factors_(std::move(factors)) {
  if (dim_ == 0) throw std::invalid_argument("Polynomial: dimension must be >= 1");
  if (lead_ == Complex{}) throw std::invalid_argument("Polynomial: identically zero polynomial");
  for (const auto& f : factors_) {
    if (f.direction.size() != dim_) throw std::invalid_argument("Polynomial: factor direction has wrong dimension");
    if (f.multiplicity < 1) throw std::invalid_argument("Polynomial: multiplicities must be >= 1");
    bool nonzero = false;
    for (auto w : f.direction) nonzero = nonzero || w != Complex{};
    if (!nonzero) throw std::invalid_argument("Polynomial: factor direction must be nonzero");
  }
}

Polynomial Polynomial::from_roots(std::vector<Complex> roots, std::vector<int> multiplicities, Complex lead) {
  if (multiplicities.empty()) multiplicities.assign(roots.size(), 1);
  if (multiplicities.size() != roots.size())
    throw std::invalid_argument("Polynomial::from_roots: roots and multiplicities differ in length");
  std::vector<LinearFactor> f;
  f.reserve(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) f.push_back({{Complex{1.0}}, roots[i], multiplicities[i]});
  return Polynomial(1, lead, std::move(f));
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& f : factors_) d += f.multiplicity;
  return d;
}

namespace {

Complex affine_value(const LinearFactor& f, std::span<const Complex> z) {
  Complex s = -f.root;
  for (std::size_t j = 0; j < z.size(); ++j) s += f.direction[j] * z[j];
  return s;
}

}  // namespace

Complex Polynomial::operator()(std::span<const Complex> z) const {
  Complex p = lead_;
  for (const auto& f : factors_) p *= std::pow(affine_value(f, z), f.multiplicity);
  return p;
}

double Polynomial::log_abs(std::span<const Complex> z) const {
  double s = std::log(std::abs(lead_));
  for (const auto& f : factors_) {
    double a = std::abs(affine_value(f, z));
    if (a == 0.0) return kNegInf;
    s += f.multiplicity * std::log(a);
  }
  return s;
}

Polynomial Polynomial::restrict_to_line(std::span<const Complex> base, std::span<const Complex> dir) const {
  if (base.size() != dim_ || dir.size() != dim_)
    throw std::invalid_argument("Polynomial::restrict_to_line: dimension mismatch");
  Complex lead = lead_;
  std::vector<LinearFactor> out;
  for (const auto& f : factors_) {
    Complex slope{}, intercept = -f.root;
    for (std::size_t j = 0; j < dim_; ++j) {
      slope += f.direction[j] * dir[j];
      intercept += f.direction[j] * base[j];
    }
    if (slope == Complex{}) {
      if (intercept == Complex{})
        throw std::invalid_argument("Polynomial::restrict_to_line: restriction vanishes identically");
      lead *= std::pow(intercept, f.multiplicity);
    } else {
      lead *= std::pow(slope, f.multiplicity);
      out.push_back({{Complex{1.0}}, -intercept / slope, f.multiplicity});
    }
  }
  return Polynomial(1, lead, std::move(out));
}

std::vector<Complex> Polynomial::coefficients() const {
  if (dim_ != 1) throw std::invalid_argument("Polynomial::coefficients: only univariate polynomials");
  std::vector<Complex> c{lead_};
  for (const auto& f : factors_) {
    // Multiply by (w z - a) multiplicity times.
    for (int k = 0; k < f.multiplicity; ++k) {
      std::vector<Complex> next(c.size() + 1, Complex{});
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i] += -f.root * c[i];
        next[i + 1] += f.direction[0] * c[i];
      }
      c = std::move(next);
    }
  }
  return c;
}

std::string Polynomial::describe() const {
  std::ostringstream os;
  os << "(" << lead_.real() << (lead_.imag() < 0 ? "" : "+") << lead_.imag() << "i)";
  for (const auto& f : factors_) {
    os << "*(";
    if (dim_ == 1) {
      os << "z";
    } else {
      os << "w.z";
    }
    os << "-(" << f.root.real() << (f.root.imag() < 0 ? "" : "+") << f.root.imag() << "i))";
    if (f.multiplicity > 1) os << "^" << f.multiplicity;
  }
  return os.str();
}

}  // namespace pshosc
