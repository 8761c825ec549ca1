#include "pshosc/acceptance.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pshosc/parallel.hpp"

namespace pshosc {

namespace {

std::string real_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string complex_str(Complex z) {
  return real_str(z.real()) + (z.imag() < 0 ? "-" : "+") + real_str(std::abs(z.imag())) + "i";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::mt19937_64 criterion_rng(std::uint64_t seed, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------------------

CriterionResult c1_gamma(const AcceptanceOptions&) {
  CriterionResult r;
  cached_gamma();
  const auto t0 = std::chrono::steady_clock::now();
  const GammaResult g = gamma_constant(1e-12);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.details = to_json(g);
  r.pass = g.residual <= 1e-12 && g.gamma > 1.278 && g.gamma < 1.279 && dt < 1e-3;
  r.runtime_limit = 1e-3;
  r.summary = "gamma = " + fixed(g.gamma, 16) + ", residual " + fixed(g.residual, 3);
  return r;
}

CriterionResult c2_disc_sharpness(const AcceptanceOptions&) {
  CriterionResult r;
  const double oracle = std::log((std::sqrt(5.0) + 1) / 2) + (std::sqrt(5.0) - 1) / 4;
  const double x_star = (std::sqrt(5.0) - 1) / 2;
  constexpr int kGrid = 1000;
  auto uo = parallel_map<double>(kGrid + 1, [](std::size_t k) { return disc_log_uo(static_cast<double>(k) / kGrid); });
  const auto best = static_cast<std::size_t>(std::max_element(uo.begin(), uo.end()) - uo.begin());
  const double argmax = static_cast<double>(best) / kGrid;

  // Cross-check the reduced sweep with the full disc cubature.
  const QuadratureSpec spec;
  const PshFunction f = catalog_lookup("log_abs");
  std::vector<std::size_t> probes;
  for (std::size_t k = 0; k <= kGrid; k += 50) probes.push_back(k);
  probes.push_back(best);
  auto full = parallel_map<double>(probes.size(), [&](std::size_t i) {
    return oscillation(f, make_disc(static_cast<double>(probes[i]) / kGrid, 1.0), spec).uo;
  });
  double cross = 0.0;
  Json checks = Json::array();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    cross = std::max(cross, std::abs(full[i] - uo[probes[i]]));
    checks.push_back(Json{{"x", static_cast<double>(probes[i]) / kGrid}, {"reduced", uo[probes[i]]}, {"cubature", full[i]}});
  }
  r.details = Json{{"grid_step", 1.0 / kGrid},  {"max_uo", uo[best]},  {"argmax", argmax},
                   {"oracle", oracle},           {"oracle_argmax", x_star}, {"cubature_max_deviation", cross},
                   {"cubature_checks", checks}};
  r.runtime_limit = 10.0;
  r.pass = std::abs(uo[best] - oracle) <= 1e-4 && std::abs(argmax - x_star) <= 1e-3 && cross <= 1e-6;
  r.summary = "max UO " + fixed(uo[best], 10) + " at x = " + fixed(argmax, 6) + " (oracle " + fixed(oracle, 10) +
              " at " + fixed(x_star, 6) + "), cubature deviation " + fixed(cross, 2);
  return r;
}

CriterionResult c3_circle_means(const AcceptanceOptions& opt) {
  CriterionResult r;
  auto rng = criterion_rng(opt.seed, 3);
  std::uniform_real_distribution<double> e(-2, 1), ang(0, 2 * M_PI);
  struct Case {
    Complex center;
    double c;
  };
  std::vector<Case> cases(100);
  for (auto& k : cases) k = {std::polar(std::pow(10.0, e(rng)), ang(rng)), std::pow(10.0, e(rng))};
  const QuadratureSpec spec;
  auto errs = parallel_map<double>(cases.size(), [&](std::size_t i) {
    const auto m = circle_mean([](Complex z) { return std::log(std::abs(z)); }, cases[i].center, cases[i].c, spec);
    const double closed = std::log(std::max(std::abs(cases[i].center), cases[i].c));
    return std::abs(m.value - closed);
  });
  const double worst = *std::max_element(errs.begin(), errs.end());
  int inside = 0;
  for (const auto& k : cases) inside += k.c > std::abs(k.center);
  r.details = Json{{"cases", cases.size()}, {"cases_c_gt_abs_center", inside}, {"max_abs_error", worst}};
  r.pass = worst <= 1e-9;
  r.summary = "100 circle means, max error " + fixed(worst, 3) + " (" + std::to_string(inside) + " with c > |z|)";
  return r;
}

CriterionResult c4_remez(const AcceptanceOptions& opt) {
  CriterionResult r;
  const QuadratureSpec spec;
  const auto sweep = remez_sweep(500, opt.seed, 6, spec);
  const double gamma = cached_gamma().gamma;
  int fails = 0;
  double max_ratio = 0.0;
  Json failures = Json::array();
  for (const auto& rep : sweep) {
    max_ratio = std::max(max_ratio, rep.ratio);
    if (rep.ratio > gamma + kRemezTolerance) {
      ++fails;
      failures.push_back(to_json(rep));
    }
  }
  const auto sharp = remez_sharpness(spec);
  double sharp_max = 0.0;
  for (const auto& rep : sharp) sharp_max = std::max(sharp_max, rep.ratio);
  r.details = Json{{"pairs", sweep.size()},       {"gamma", gamma},          {"violations", fails},
                   {"max_ratio", max_ratio},      {"sharpness_max_ratio", sharp_max},
                   {"violating_pairs", failures}};
  r.runtime_limit = 300.0;
  r.pass = fails == 0 && sharp_max >= gamma - 1e-3;
  r.summary = std::to_string(fails) + " of 500 pairs exceed gamma (max ratio " + fixed(max_ratio, 6) +
              "), sharpness family reaches " + fixed(sharp_max, 8);
  return r;
}

CriterionResult c5_lelong_class(const AcceptanceOptions& opt) {
  CriterionResult r;
  auto rng = criterion_rng(opt.seed, 5);
  std::uniform_real_distribution<double> e(-6, 6), ang(0, 2 * M_PI);
  std::vector<Polydisc> family;
  double max_aspect = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double log_aspect = 12.0 * k / 199.0;
    double r1 = std::pow(10.0, e(rng)), r2 = r1 * std::pow(10.0, -log_aspect);
    if (k % 2) std::swap(r1, r2);
    std::vector<Complex> c(2);
    for (auto& x : c) x = k % 10 == 0 ? Complex{} : std::polar(std::pow(10.0, e(rng)), ang(rng));
    max_aspect = std::max(max_aspect, std::max(r1, r2) / std::min(r1, r2));
    family.emplace_back(ComplexVector(c), std::vector<double>{r1, r2});
  }
  QuadratureSpec spec;
  spec.target_rel_error = 1e-6;
  spec.max_refinements = 1;
  const auto rep = lelong_class_check(catalog_lookup("lelong_max", {{"dim", "2"}}), family, spec, opt.seed);
  double max_err = 0.0;
  for (double x : rep.uo_error) max_err = std::max(max_err, x);
  r.details = Json{{"polydiscs", family.size()},     {"max_aspect", max_aspect},  {"max_uo", rep.max_uo},
                   {"max_uo_error", max_err},         {"bound", rep.bound},        {"proof_bound", rep.proof_bound},
                   {"quadrature", to_json(spec)},     {"all_converged", rep.converged}};
  r.runtime_limit = 120.0;
  r.pass = rep.pass;
  r.summary = "200 bidiscs (aspect up to " + fixed(max_aspect, 3) + "), max UO " + fixed(rep.max_uo, 8) + " (error " +
              fixed(max_err, 2) + ") against 9 and " + fixed(rep.proof_bound, 8);
  return r;
}

struct NamedFunction {
  std::string name;
  ParamMap params;
};

NamedFunction random_catalog_function(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1, 1), pos(0.2, 2.0);
  std::uniform_int_distribution<int> pick(0, 5);
  const int k = pick(rng);
  if (n == 1) {
    switch (k) {
      case 0: return {"log_abs", {{"z0", complex_str({u(rng), u(rng)})}}};
      case 1: return {"lelong_max", {}};
      case 2: return {"m_log", {{"m", real_str(pos(rng))}}};
      case 3: return {"quadratic", {{"diag", real_str(pos(rng))}}};
      case 4: {
        std::string roots = complex_str({u(rng), u(rng)}) + ";" + complex_str({u(rng), u(rng)});
        return {"log_poly", {{"roots", roots}}};
      }
      default: return {"constant", {{"value", real_str(u(rng))}}};
    }
  }
  switch (k) {
    case 0: return {"log_abs", {{"z0", complex_str({u(rng), u(rng)}) + ";" + complex_str({u(rng), u(rng)})}, {"dim", "2"}}};
    case 1: return {"lelong_max", {{"dim", "2"}}};
    case 2: return {"max_log", {{"m", real_str(pos(rng)) + ";" + real_str(pos(rng))}}};
    case 3: {
      const double a = pos(rng), b = pos(rng), c = u(rng) * std::sqrt(a * b);
      return {"quadratic", {{"c", real_str(a) + ";" + real_str(c) + ";" + real_str(c) + ";" + real_str(b)}}};
    }
    case 4: return {"m_log", {{"m", real_str(pos(rng))}, {"dim", "2"}}};
    default: return {"constant", {{"value", real_str(u(rng))}, {"dim", "2"}}};
  }
}

Json params_json(const ParamMap& p) {
  Json j = Json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

CriterionResult c6_harnack(const AcceptanceOptions& opt) {
  CriterionResult r;
  auto rng = criterion_rng(opt.seed, 6);
  std::uniform_real_distribution<double> u(-1, 1), pr(0.1, 1.0);
  struct Pair {
    NamedFunction fn;
    Polydisc p;
  };
  std::vector<Pair> pairs;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + k % 2;
    auto fn = random_catalog_function(rng, n);
    std::vector<Complex> c(n);
    std::vector<double> radii(n);
    for (std::size_t j = 0; j < n; ++j) {
      c[j] = {u(rng), u(rng)};
      radii[j] = pr(rng);
    }
    pairs.push_back({fn, Polydisc(ComplexVector(c), radii)});
  }
  const QuadratureSpec spec;
  auto reps = parallel_map<DecompositionReport>(pairs.size(), [&](std::size_t i) {
    return harnack_decomposition(catalog_lookup(pairs[i].fn.name, pairs[i].fn.params), pairs[i].p, spec);
  });
  int ok = 0, unconverged = 0;
  double max_tol = 0.0, min_i1_margin = INFINITY, min_i2_margin = INFINITY;
  Json failures = Json::array();
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& d = reps[i];
    const bool pass = d.i1_bound_holds(1e-8) && d.i2_bound_holds(1e-8);
    ok += pass;
    unconverged += !d.converged;
    max_tol = std::max(max_tol, d.tolerance);
    min_i1_margin = std::min(min_i1_margin, std::pow(3.0, d.n) * d.j1 - d.i1);
    min_i2_margin = std::min(min_i2_margin, d.j2 - d.i2);
    if (!pass) {
      Json f = to_json(d);
      f["function"] = pairs[i].fn.name;
      f["params"] = params_json(pairs[i].fn.params);
      failures.push_back(f);
    }
  }
  r.details = Json{{"pairs", pairs.size()},          {"passing", ok},
                   {"unconverged_means", unconverged}, {"max_tolerance", max_tol},
                   {"min_i1_margin", min_i1_margin},  {"min_i2_margin", min_i2_margin},
                   {"failures", failures}};
  r.pass = ok == static_cast<int>(pairs.size());
  r.summary = std::to_string(ok) + "/100 pairs satisfy both bounds; min margins " + fixed(min_i1_margin, 3) + ", " +
              fixed(min_i2_margin, 3) + "; max tolerance " + fixed(max_tol, 2);
  return r;
}

CriterionResult c7_counterexample(const AcceptanceOptions&) {
  CriterionResult r;
  const QuadratureSpec spec;
  const std::vector<double> xs{-1, -2, -3, -5, -7.5, -10, -15, -20, -25, -30, -35, -40, -45, -50};
  const auto rows = counterexample_scan(xs, spec);
  double gap_err = 0.0;
  for (const auto& row : rows)
    if (row.x == -1 || row.x == -5 || row.x == -20)
      gap_err = std::max(gap_err, std::abs(row.gap - counterexample_gap_formula(row.x)));
  double max_mo = 0.0;
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    max_mo = std::max(max_mo, rows[i].mo_lower);
    if (i > 0 && rows[i].x <= -10 && rows[i].mo_lower <= rows[i - 1].mo_lower) monotone = false;
  }
  Json table = Json::array();
  for (const auto& row : rows) table.push_back(to_json(row));
  r.details = Json{{"gap_max_error", gap_err}, {"max_mo_lower", max_mo}, {"exceeds_3", max_mo > 3.0},
                   {"monotone_tail", monotone}, {"table", table}};
  r.runtime_limit = 120.0;
  r.pass = gap_err <= 1e-12 && max_mo > 3.0 && monotone;
  r.summary = "gap formula error " + fixed(gap_err, 3) + "; MO lower bound reaches " + fixed(max_mo, 6) +
              " at x = -50 (needs > 3); tail monotone: " + (monotone ? "yes" : "no");
  return r;
}

PshFunction random_circular_weight(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::vector<double> c(n);
  for (auto& x : c) x = u(rng);
  const double b = u(rng);
  FunctionMeta meta;
  meta.multicircular = true;
  return PshFunction("circular_sample", n,
                     [c, b](std::span<const Complex> z) {
                       double s = b * std::log1p(std::norm(z[0]));
                       for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * std::norm(z[j]);
                       return s;
                     },
                     meta);
}

Polydisc unit_polydisc(std::size_t n) { return Polydisc(ComplexVector::zeros(n), std::vector<double>(n, 1.0)); }

CriterionResult c8_bergman_cross(const AcceptanceOptions& opt) {
  CriterionResult r;
  const QuadratureSpec spec;
  auto zero = make_weight(catalog_lookup("constant", {{"value", "0"}}), 1.0);
  const double kc = bergman_origin(zero, unit_polydisc(1), spec, BergmanMethod::Circular).value;
  const double kg = bergman_origin(zero, unit_polydisc(1), spec, BergmanMethod::Gram).value;
  const double zero_err = std::max(std::abs(kc - 1 / M_PI), std::abs(kg - 1 / M_PI));

  auto rng = criterion_rng(opt.seed, 8);
  std::uniform_real_distribution<double> rad(0.3, 1.0), eps(0.2, 1.5);
  struct Case {
    WeightSpec w;
    Polydisc p;
  };
  std::vector<Case> cases;
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 1 + k % 2;
    auto w = make_weight(random_circular_weight(rng, n), eps(rng));
    std::vector<double> radii(n);
    for (auto& x : radii) x = rad(rng);
    cases.push_back({w, Polydisc(ComplexVector::zeros(n), radii)});
  }
  auto rel = parallel_map<double>(cases.size(), [&](std::size_t i) {
    const auto c = bergman_origin(cases[i].w, cases[i].p, spec, BergmanMethod::Circular);
    const auto g = bergman_origin(cases[i].w, cases[i].p, spec, BergmanMethod::Gram);
    return g.flagged ? INFINITY : std::abs(g.value - c.value) / c.value;
  });
  const double worst = *std::max_element(rel.begin(), rel.end());
  r.details = Json{{"phi0_circular", kc}, {"phi0_gram", kg}, {"phi0_error", zero_err},
                   {"weights", cases.size()}, {"max_rel_diff", number(worst)}};
  r.pass = zero_err <= 1e-10 && worst <= 1e-6;
  r.summary = "phi = 0 error " + fixed(zero_err, 3) + "; 20 weights, max relative difference " + fixed(worst, 3);
  return r;
}

CriterionResult c9_sandwich_ot(const AcceptanceOptions& opt) {
  CriterionResult r;
  const QuadratureSpec spec;
  auto rng = criterion_rng(opt.seed, 9);
  std::vector<std::pair<std::string, WeightSpec>> weights{
      {"0 (n=1)", make_weight(catalog_lookup("constant", {{"value", "0"}}), 1.0)},
      {"0 (n=2)", make_weight(catalog_lookup("constant", {{"value", "0"}, {"dim", "2"}}), 1.0)},
      {"|z|^2", make_weight(catalog_lookup("quadratic", {{"diag", "1"}}), 1.0)},
      {"|z1|^2+|z2|^2", make_weight(catalog_lookup("quadratic", {{"diag", "1;1"}}), 1.0)},
      {"|z1+z2|^2, eps 0.7", make_weight(catalog_lookup("quadratic", {{"c", "1;1;1;1"}}), 0.7)},
      {"2log|z|, eps 0.5", make_weight(catalog_lookup("m_log", {{"m", "2"}}), 0.5)},
      {"max_log, eps 0.5", make_weight(catalog_lookup("max_log"), 0.5)}};
  for (int k = 0; k < 10; ++k) weights.push_back({"circular sample " + std::to_string(k),
                                                  make_weight(random_circular_weight(rng, 1 + k % 2), 1.0)});
  struct Row {
    SandwichReport s;
    OtReport o;
  };
  auto rows = parallel_map<Row>(weights.size(), [&](std::size_t i) {
    const auto& w = weights[i].second;
    const std::size_t n = w.phi.dim();
    std::vector<double> radii(n);
    for (std::size_t j = 0; j < n; ++j) radii[j] = 0.8 - 0.2 * static_cast<double>(j);
    return Row{sandwich_check(w, Polydisc(ComplexVector::zeros(n), radii), spec), ot_check(w, spec)};
  });
  double min_sandwich = INFINITY, min_ot = INFINITY, ot_zero = 0.0;
  Json table = Json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& s = rows[i].s;
    const double m = std::min(s.middle - s.lower, s.upper - s.middle);
    min_sandwich = std::min(min_sandwich, m);
    min_ot = std::min(min_ot, rows[i].o.margin);
    if (i < 2) ot_zero = std::max(ot_zero, std::abs(rows[i].o.margin));
    table.push_back(Json{{"weight", weights[i].first}, {"sandwich", to_json(s)}, {"ot", to_json(rows[i].o)}});
  }
  r.details = Json{{"weights", weights.size()}, {"min_sandwich_margin", min_sandwich}, {"min_ot_margin", min_ot},
                   {"ot_equality_error_phi0", ot_zero}, {"table", table}};
  r.pass = min_sandwich >= -1e-9 && min_ot >= -1e-9 && ot_zero <= 1e-10;
  r.summary = std::to_string(weights.size()) + " weights: min sandwich margin " + fixed(min_sandwich, 3) +
              ", min OT margin " + fixed(min_ot, 3) + ", OT equality error at phi = 0 " + fixed(ot_zero, 3);
  return r;
}

CriterionResult c10_hessian(const AcceptanceOptions&) {
  CriterionResult r;
  const QuadratureSpec spec;
  const auto h = default_hessian_steps();
  auto a = hessian_limit_check(make_weight(catalog_lookup("quadratic", {{"diag", "1"}}), 1.0), h, spec);
  auto b = hessian_limit_check(make_weight(catalog_lookup("quadratic", {{"diag", "1;4"}}), 1.0), h, spec);
  auto c = hessian_limit_check(make_weight(catalog_lookup("quadratic", {{"c", "1;1;1;1"}}), 1.0), h, spec);
  auto rel = [](Complex v, double t) { return std::abs(v.real() - t) / t; };
  const double da = rel(a.extrapolated(0, 0), 0.5);
  const double db = std::max(rel(b.extrapolated(0, 0), 0.5), rel(b.extrapolated(1, 1), 2.0));
  const double off = std::abs(c.extrapolated(0, 1));
  r.details = Json{{"abs_z_sq", to_json(a)},       {"diag_1_4", to_json(b)},           {"abs_z1_plus_z2_sq", to_json(c)},
                   {"max_rel_dev_n1", da},          {"max_rel_dev_n2", db},             {"offdiag_abs", off}};
  r.runtime_limit = 600.0;
  r.pass = da <= 0.02 && db <= 0.02 && off <= 0.05;
  r.summary = "diagonal deviations " + fixed(da, 3) + " and " + fixed(db, 3) + " (limit 2%), |off-diagonal| " +
              fixed(off, 3) + " (limit 0.05)";
  return r;
}

CriterionResult c11_lelong_preservation(const AcceptanceOptions&) {
  CriterionResult r;
  const QuadratureSpec spec;
  const auto grid = log_spaced(0.5, 0.5, 6);
  const std::vector<double> eps{0.9, 0.5, 0.25};
  struct Case {
    std::string name;
    PshFunction phi;
    std::vector<double> a;
  };
  std::vector<Case> cases{{"2log|z|", catalog_lookup("m_log", {{"m", "2"}}), {1.0}},
                          {"log|z1| (n=2)", catalog_lookup("m_log", {{"dim", "2"}}), {1.0, 1.0}},
                          {"max(log|z1|,log|z2|)", catalog_lookup("max_log"), {1.0, 1.0}}};
  bool pass = true;
  Json table = Json::array();
  std::string summary;
  for (const auto& c : cases) {
    const auto rep = lelong_preservation_check(c.phi, c.a, eps, grid, spec);
    bool ok = rep.eps_used.has_value();
    double lhs = NAN;
    if (ok) {
      const auto k = static_cast<std::size_t>(std::find(eps.begin(), eps.end(), *rep.eps_used) - eps.begin());
      lhs = rep.lhs[k].slope;
      ok = std::abs(lhs - rep.rhs.slope) <= kSlopeAgreement * std::abs(rep.rhs.slope);
    }
    pass = pass && ok;
    Json j = to_json(rep);
    j["function"] = c.name;
    table.push_back(j);
    summary += (summary.empty() ? "" : "; ") + c.name + ": " + fixed(lhs, 6) + " vs " + fixed(rep.rhs.slope, 6);
  }
  r.details = Json{{"cases", table}};
  r.runtime_limit = 300.0;
  r.pass = pass;
  r.summary = summary;
  return r;
}

CriterionResult c12_john_nirenberg(const AcceptanceOptions& opt) {
  CriterionResult r;
  const QuadratureSpec spec;
  const auto phi = catalog_lookup("log_abs");
  const auto decay = distribution_estimate(phi, AnisotropicBox(ComplexVector::zeros(1), 1.0, {1.0}), default_t_grid(),
                                           spec, opt.seed);
  const auto rep = epsilon0_search(phi, dyadic_family(ComplexVector::zeros(1), {1.0}, 20), {0.5, 1.0, 1.5, 2.5}, spec);
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (double m : rep.rows[i].member_means) {
      const double target = 2 / (2 - rep.eps_values[i]);
      worst = std::max(worst, std::isfinite(m) ? std::abs(m - target) / target : INFINITY);
    }
  const bool diverges = rep.rows[3].divergent;
  r.details = Json{{"decay", to_json(decay)}, {"eps0", to_json(rep)}, {"max_rel_error_means", number(worst)},
                   {"eps_2_5_divergent", diverges}};
  r.pass = std::abs(decay.fitted_slope + 2.0) <= 0.05 && worst <= 0.02 && diverges;
  r.summary = "decay slope " + fixed(decay.fitted_slope, 6) + "; means within " + fixed(worst, 3) +
              " of 2/(2-eps); eps = 2.5 divergent: " + (diverges ? "yes" : "no");
  return r;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) out += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
  return out + "'";
}

CriterionResult c13_determinism(const AcceptanceOptions& opt) {
  CriterionResult r;
  if (!opt.cli_path.empty()) {
    const auto dir = std::filesystem::temp_directory_path() / ("pshosc_det_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::vector<int> codes;
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
      const auto base = dir / ("run" + std::to_string(run));
      const std::string cmd = shell_quote(opt.cli_path) + " verify-all --seed " + std::to_string(opt.seed) +
                              " --workers " + std::to_string(run + 1) + " --out " + shell_quote(base.string()) +
                              " > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      codes.push_back(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
      outputs.push_back(read_file(base.string() + ".json"));
    }
    std::filesystem::remove_all(dir);
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    r.details = Json{{"mode", "cli"}, {"exit_codes", codes}, {"bytes", outputs[0].size()}, {"identical", same}};
    r.pass = same && codes[0] == codes[1];
    r.summary = std::string("verify-all --seed ") + std::to_string(opt.seed) + " with 1 and 2 workers: " +
                (same ? "byte-identical" : "outputs differ") + " (" + std::to_string(outputs[0].size()) +
                " bytes, exit codes " + std::to_string(codes[0]) + ", " + std::to_string(codes[1]) + ")";
    return r;
  }
  const unsigned saved = worker_count();
  std::vector<std::string> dumps[2];
  for (int run = 0; run < 2; ++run) {
    set_worker_count(static_cast<unsigned>(run + 1));
    for (int id : {3, 4, 8, 12}) dumps[run].push_back(to_json(run_criterion(id, opt), false).dump());
  }
  set_worker_count(saved);
  const bool same = dumps[0] == dumps[1];
  r.details = Json{{"mode", "in-process"}, {"criteria", {3, 4, 8, 12}}, {"identical", same}};
  r.pass = same;
  r.summary = std::string("criteria 3, 4, 8, 12 re-run with 1 and 2 workers: ") +
              (same ? "byte-identical" : "outputs differ");
  return r;
}

}  // namespace

std::string criterion_title(int id) {
  static const char* titles[] = {"gamma constant",
                                 "disc sharpness",
                                 "closed-form circle means",
                                 "Remez sweep",
                                 "Lelong class",
                                 "Harnack decomposition",
                                 "counterexample blowup",
                                 "Bergman cross-validation",
                                 "sandwich and Ohsawa-Takegoshi",
                                 "Hessian limit",
                                 "Lelong preservation",
                                 "John-Nirenberg",
                                 "determinism"};
  if (id < 1 || id > kCriterionCount) throw std::invalid_argument("unknown criterion " + std::to_string(id));
  return titles[id - 1];
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  static const Fn fns[] = {c1_gamma,      c2_disc_sharpness, c3_circle_means,       c4_remez,
                           c5_lelong_class, c6_harnack,      c7_counterexample,     c8_bergman_cross,
                           c9_sandwich_ot, c10_hessian,      c11_lelong_preservation, c12_john_nirenberg,
                           c13_determinism};
  const std::string title = criterion_title(id);
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = fns[id - 1](opt);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.id = id;
  r.title = title;
  if (r.runtime_limit && r.seconds >= *r.runtime_limit) {
    r.pass = false;
    r.summary += "; runtime " + fixed(r.seconds, 3) + " s over the " + fixed(*r.runtime_limit, 3) + " s limit";
  }
  return r;
}

Json to_json(const CriterionResult& r, bool timing) {
  Json j{{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"summary", r.summary}};
  if (r.runtime_limit) j["runtime_limit_s"] = *r.runtime_limit;
  if (timing) j["seconds"] = r.seconds;
  j["details"] = r.details;
  return j;
}

std::vector<int> parse_criterion_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  auto to_int = [&](const std::string& t) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size() || v < 1 || v > kCriterionCount)
      throw std::invalid_argument("bad criterion selection '" + s + "'");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(to_int(item));
    } else {
      const int a = to_int(item.substr(0, dash)), b = to_int(item.substr(dash + 1));
      if (a > b) throw std::invalid_argument("bad criterion selection '" + s + "'");
      for (int k = a; k <= b; ++k) out.push_back(k);
    }
  }
  if (out.empty()) throw std::invalid_argument("empty criterion selection");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace pshosc
