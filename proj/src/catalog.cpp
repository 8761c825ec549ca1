#include "pshosc/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pshosc {

// ---------------------------------------------------------------------------
// Parameter values

Complex parse_complex(const std::string& raw) {
  std::string s;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  auto fail = [&]() -> Complex { throw std::invalid_argument("malformed complex literal '" + raw + "'"); };
  auto parse_real = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != t.size()) fail();
    return v;
  };
  if (s.back() != 'i') return {parse_real(s), 0.0};
  std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not an exponent sign or the leading sign.
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t);
  };
  if (split == std::string::npos) return {0.0, imag_part(body)};
  return {parse_real(body.substr(0, split)), imag_part(body.substr(split))};
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ';')) out.push_back(cur);
  if (out.empty()) throw std::invalid_argument("empty list value");
  return out;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) {
    Complex c = parse_complex(item);
    if (c.imag() != 0.0) throw std::invalid_argument("expected real value, got '" + item + "'");
    out.push_back(c.real());
  }
  return out;
}

std::vector<Complex> parse_complex_list(const std::string& s) {
  std::vector<Complex> out;
  for (const auto& item : split_list(s)) out.push_back(parse_complex(item));
  return out;
}

// ---------------------------------------------------------------------------

PshFunction::PshFunction(std::string name, std::size_t dim, Evaluator eval, FunctionMeta meta, bool psh)
    : name_(std::move(name)), dim_(dim), eval_(std::move(eval)), meta_(std::move(meta)), psh_(psh) {
  if (dim_ == 0) throw std::invalid_argument("PshFunction: dimension must be >= 1");
  if (!eval_) throw std::invalid_argument("PshFunction: missing evaluator");
}

double PshFunction::operator()(const ComplexVector& z) const {
  if (z.dim() != dim_) throw std::invalid_argument("PshFunction '" + name_ + "': dimension mismatch");
  return eval_(z.span());
}

namespace {

class Params {
 public:
  Params(std::string fn, const ParamMap& p, std::vector<std::string> allowed) : fn_(std::move(fn)), p_(p) {
    for (const auto& [k, v] : p_)
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        throw std::invalid_argument("catalog '" + fn_ + "': unknown parameter '" + k + "'");
  }
  bool has(const std::string& k) const { return p_.count(k) != 0; }
  double real(const std::string& k, double def) const {
    if (!has(k)) return def;
    auto v = parse_real_list(p_.at(k));
    if (v.size() != 1) throw std::invalid_argument("catalog '" + fn_ + "': '" + k + "' must be a scalar");
    return v[0];
  }
  std::size_t dim(std::size_t def) const {
    double d = real("dim", static_cast<double>(def));
    if (d < 1 || d != std::floor(d) || d > 8)
      throw std::invalid_argument("catalog '" + fn_ + "': dim must be an integer in [1, 8]");
    return static_cast<std::size_t>(d);
  }
  std::vector<double> reals(const std::string& k) const { return parse_real_list(p_.at(k)); }
  std::vector<Complex> complexes(const std::string& k) const { return parse_complex_list(p_.at(k)); }

 private:
  std::string fn_;
  const ParamMap& p_;
};

double sup_abs_on_factor(const Polydisc& p, std::size_t j, Complex shift) {
  return std::abs(p.center()[j] - shift) + p.radii()[j];
}

PshFunction make_log_abs(const ParamMap& pm) {
  Params p("log_abs", pm, {"z0", "dim"});
  std::vector<Complex> z0 = p.has("z0") ? p.complexes("z0") : std::vector<Complex>{};
  std::size_t n = p.dim(z0.empty() ? 1 : z0.size());
  if (z0.empty()) z0.assign(n, Complex{});
  if (z0.size() != n) throw std::invalid_argument("catalog 'log_abs': z0 length must equal dim");
  ComplexVector zc(z0);  // validates finiteness

  FunctionMeta meta;
  meta.multicircular = zc.max_abs() == 0.0;
  meta.lelong_class_constant = 0.5 * std::log(static_cast<double>(n)) + std::log1p(zc.max_abs());
  meta.closed_sup_on_polydisc = [z0, n](const Polydisc& P) -> std::optional<double> {
    if (P.dim() != n) return std::nullopt;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double m = sup_abs_on_factor(P, j, z0[j]);
      s += m * m;
    }
    return 0.5 * std::log(s);
  };
  auto eval = [z0, n](std::span<const Complex> z) {
    if (n == 1) {
      double a = std::abs(z[0] - z0[0]);
      return a == 0.0 ? kNegInf : std::log(a);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::norm(z[j] - z0[j]);
    return s == 0.0 ? kNegInf : 0.5 * std::log(s);
  };
  return PshFunction("log_abs", n, eval, std::move(meta));
}

PshFunction make_log_poly(const ParamMap& pm) {
  Params p("log_poly", pm, {"roots", "mult", "lead"});
  if (!p.has("roots")) throw std::invalid_argument("catalog 'log_poly': 'roots' is required");
  auto roots = p.complexes("roots");
  std::vector<int> mult;
  if (p.has("mult")) {
    for (double m : p.reals("mult")) {
      if (m < 1 || m != std::floor(m)) throw std::invalid_argument("catalog 'log_poly': multiplicities must be positive integers");
      mult.push_back(static_cast<int>(m));
    }
  }
  Complex lead = p.has("lead") ? parse_complex(pm.at("lead")) : Complex{1.0};
  return log_poly_function(Polynomial::from_roots(std::move(roots), std::move(mult), lead));
}

PshFunction make_lelong_max(const ParamMap& pm) {
  Params p("lelong_max", pm, {"dim"});
  std::size_t n = p.dim(1);
  FunctionMeta meta;
  meta.multicircular = true;
  meta.lelong_class_constant = 0.0;
  meta.closed_sup_on_polydisc = [n](const Polydisc& P) -> std::optional<double> {
    if (P.dim() != n) return std::nullopt;
    double m = kNegInf;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::log1p(sup_abs_on_factor(P, j, 0.0)));
    return m;
  };
  auto eval = [n](std::span<const Complex> z) {
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(z[j]));
    return std::log1p(m);
  };
  return PshFunction("lelong_max", n, eval, std::move(meta));
}

double counterexample_profile(double x, double y) { return -std::sqrt((x + y) * y); }

PshFunction make_counterexample(const ParamMap& pm) {
  Params p("counterexample", pm, {});
  constexpr double kEdge = 1.0 - 1e-9;
  FunctionMeta meta;
  meta.multicircular = true;
  meta.closed_sup_on_polydisc = [](const Polydisc& P) -> std::optional<double> {
    if (P.dim() != 2 || !P.centered_at_origin()) return std::nullopt;
    if (P.radii()[0] >= kEdge || P.radii()[1] >= kEdge) return std::nullopt;
    return counterexample_profile(std::log(P.radii()[0]), std::log(P.radii()[1]));
  };
  auto eval = [](std::span<const Complex> z) {
    double a = std::abs(z[0]), b = std::abs(z[1]);
    if (a >= kEdge || b >= kEdge)
      throw std::domain_error("counterexample: evaluated outside {|z|,|w| < 1 - 1e-9}");
    if (a == 0.0 || b == 0.0) return kNegInf;
    return counterexample_profile(std::log(a), std::log(b));
  };
  return PshFunction("counterexample", 2, eval, std::move(meta));
}

PshFunction make_quadratic(const ParamMap& pm) {
  Params p("quadratic", pm, {"c", "diag"});
  if (p.has("c") == p.has("diag")) throw std::invalid_argument("catalog 'quadratic': give exactly one of 'c' or 'diag'");
  Eigen::MatrixXd c;
  if (p.has("diag")) {
    auto d = p.reals("diag");
    c = Eigen::MatrixXd::Zero(d.size(), d.size());
    for (std::size_t j = 0; j < d.size(); ++j) c(j, j) = d[j];
  } else {
    auto v = p.reals("c");
    auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size()) throw std::invalid_argument("catalog 'quadratic': 'c' must hold n*n entries (row-major)");
    c.resize(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) c(j, k) = v[j * n + k];
  }
  return quadratic_function(c);
}

PshFunction make_m_log(const ParamMap& pm) {
  Params p("m_log", pm, {"m", "dim"});
  double m = p.real("m", 1.0);
  if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("catalog 'm_log': m must be positive");
  std::size_t n = p.dim(1);
  FunctionMeta meta;
  meta.multicircular = true;
  if (m <= 1.0) meta.lelong_class_constant = 0.0;
  meta.closed_sup_on_polydisc = [m, n](const Polydisc& P) -> std::optional<double> {
    if (P.dim() != n) return std::nullopt;
    return m * std::log(sup_abs_on_factor(P, 0, 0.0));
  };
  auto eval = [m](std::span<const Complex> z) {
    double a = std::abs(z[0]);
    return a == 0.0 ? kNegInf : m * std::log(a);
  };
  return PshFunction("m_log", n, eval, std::move(meta));
}

PshFunction make_max_log(const ParamMap& pm) {
  Params p("max_log", pm, {"m"});
  std::vector<double> m = p.has("m") ? p.reals("m") : std::vector<double>{1.0, 1.0};
  for (double x : m)
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("catalog 'max_log': weights must be positive");
  const std::size_t n = m.size();
  FunctionMeta meta;
  meta.multicircular = true;
  if (*std::max_element(m.begin(), m.end()) <= 1.0) meta.lelong_class_constant = 0.0;
  meta.closed_sup_on_polydisc = [m, n](const Polydisc& P) -> std::optional<double> {
    if (P.dim() != n) return std::nullopt;
    double s = kNegInf;
    for (std::size_t j = 0; j < n; ++j) s = std::max(s, m[j] * std::log(sup_abs_on_factor(P, j, 0.0)));
    return s;
  };
  auto eval = [m, n](std::span<const Complex> z) {
    double s = kNegInf;
    for (std::size_t j = 0; j < n; ++j) {
      double a = std::abs(z[j]);
      if (a > 0.0) s = std::max(s, m[j] * std::log(a));
    }
    return s;
  };
  return PshFunction("max_log", n, eval, std::move(meta));
}

PshFunction make_constant(const ParamMap& pm) {
  Params p("constant", pm, {"value", "dim"});
  double c = p.real("value", 1.0);
  if (!std::isfinite(c)) throw std::invalid_argument("catalog 'constant': value must be finite");
  std::size_t n = p.dim(1);
  FunctionMeta meta;
  meta.multicircular = true;
  meta.lelong_class_constant = c;
  meta.closed_sup_on_polydisc = [c](const Polydisc&) -> std::optional<double> { return c; };
  meta.smooth_hessian_at = [n](std::span<const Complex>) { return HermitianMatrix::Zero(n, n).eval(); };
  return PshFunction("constant", n, [c](std::span<const Complex>) { return c; }, std::move(meta));
}

PshFunction make_re_z(const ParamMap& pm) {
  Params p("re_z", pm, {"dim"});
  std::size_t n = p.dim(1);
  FunctionMeta meta;
  meta.closed_sup_on_polydisc = [](const Polydisc& P) -> std::optional<double> {
    return P.center()[0].real() + P.radii()[0];
  };
  meta.smooth_hessian_at = [n](std::span<const Complex>) { return HermitianMatrix::Zero(n, n).eval(); };
  return PshFunction("re_z", n, [](std::span<const Complex> z) { return z[0].real(); }, std::move(meta));
}

}  // namespace

PshFunction log_poly_function(const Polynomial& poly) {
  FunctionMeta meta;
  meta.degree = poly.degree();
  meta.polynomial = poly;
  return PshFunction("log_poly", poly.dim(), [poly](std::span<const Complex> z) { return poly.log_abs(z); },
                     std::move(meta));
}

PshFunction quadratic_function(const Eigen::MatrixXd& c) {
  const auto n = static_cast<std::size_t>(c.rows());
  if (n == 0 || c.cols() != c.rows()) throw std::invalid_argument("quadratic: matrix must be square and non-empty");
  if (!c.allFinite()) throw std::invalid_argument("quadratic: matrix must be finite");
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("quadratic: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.eigenvalues().minCoeff() < -1e-12) throw std::invalid_argument("quadratic: matrix is not positive semidefinite");

  bool diagonal = (c - Eigen::MatrixXd(c.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  FunctionMeta meta;
  meta.multicircular = diagonal;
  HermitianMatrix h = c.cast<Complex>();
  meta.smooth_hessian_at = [h](std::span<const Complex>) { return h; };
  if (diagonal) {
    Eigen::VectorXd d = c.diagonal();
    meta.closed_sup_on_polydisc = [d, n](const Polydisc& P) -> std::optional<double> {
      if (P.dim() != n) return std::nullopt;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double m = sup_abs_on_factor(P, j, 0.0);
        s += d(j) * m * m;
      }
      return s;
    };
  }
  Eigen::MatrixXd cm = c;
  auto eval = [cm, n](std::span<const Complex> z) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s += cm(j, j) * std::norm(z[j]);
      for (std::size_t k = j + 1; k < n; ++k) s += 2.0 * cm(j, k) * std::real(z[j] * std::conj(z[k]));
    }
    return s;
  };
  return PshFunction("quadratic", n, eval, std::move(meta));
}

std::vector<std::string> catalog_names() {
  return {"log_abs", "log_poly", "lelong_max", "counterexample", "quadratic", "m_log", "max_log", "constant", "re_z"};
}

PshFunction catalog_lookup(const std::string& name, const ParamMap& params) {
  if (name == "log_abs") return make_log_abs(params);
  if (name == "log_poly") return make_log_poly(params);
  if (name == "lelong_max") return make_lelong_max(params);
  if (name == "counterexample") return make_counterexample(params);
  if (name == "quadratic") return make_quadratic(params);
  if (name == "m_log") return make_m_log(params);
  if (name == "max_log") return make_max_log(params);
  if (name == "constant") return make_constant(params);
  if (name == "re_z") return make_re_z(params);
  throw std::invalid_argument("unknown catalog function '" + name + "'");
}

}  // namespace pshosc
