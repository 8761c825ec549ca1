#include "pshosc/report.hpp"

#include <cmath>

namespace pshosc {

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

std::vector<double> default_hessian_steps() { return {0.2, 0.1, 0.05}; }

Json to_json(const QuadratureSpec& s) {
  return Json{{"radial_nodes", s.radial_nodes},   {"angular_nodes", s.angular_nodes},
              {"target_rel_error", s.target_rel_error}, {"max_refinements", s.max_refinements},
              {"mc_samples", s.mc_samples},       {"seed", s.seed}};
}

Json defaults_table() {
  Json d;
  d["version"] = kDefaultsVersion;
  d["seed"] = kDefaultSeed;
  d["quadrature"] = to_json(QuadratureSpec{});
  d["tolerances"] = Json{{"remez", kRemezTolerance},
                         {"ray_sup", kRaySupTolerance},
                         {"bergman", kBergmanTolerance},
                         {"gram_condition_limit", kGramConditionLimit},
                         {"gram_condition_fail", kGramConditionFail},
                         {"slope_agreement", kSlopeAgreement},
                         {"jn_fluctuation", kFluctuationLimit},
                         {"jn_trend", kTrendLimit}};
  d["hessian"] = Json{{"h", default_hessian_steps()}, {"step_floor", kHessianStepFloor}, {"tiny_radius", kTinyRadius}};
  d["jn"] = Json{{"t_grid", default_t_grid()},
                 {"samples_per_dim", 1000000},
                 {"min_tail_count", kMinTailCount},
                 {"eps_threshold", 1e6}};
  d["gamma_tol"] = 1e-12;
  return d;
}

Json to_json(const Complex& z) { return Json::array({number(z.real()), number(z.imag())}); }

Json to_json(const std::vector<Complex>& v) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back(to_json(z));
  return a;
}

Json to_json(const SupResult& r) {
  return Json{{"value", number(r.value)}, {"error", number(r.error)}, {"argmax", to_json(r.argmax)},
              {"closed_form", r.closed_form}};
}

Json to_json(const OscillationReport& r) {
  return Json{{"sup", number(r.sup)},       {"mean", number(r.mean)},           {"uo", number(r.uo)},
              {"mo", number(r.mo)},         {"sup_error", number(r.sup_error)}, {"mean_error", number(r.mean_error)},
              {"mo_error", number(r.mo_error)}, {"converged", r.converged}};
}

Json to_json(const DecompositionReport& r) {
  return Json{{"n", r.n},
              {"i1", number(r.i1)},
              {"i2", number(r.i2)},
              {"j1", number(r.j1)},
              {"j2", number(r.j2)},
              {"tolerance", number(r.tolerance)},
              {"converged", r.converged},
              {"i1_bound_holds", r.i1_bound_holds(1e-8)},
              {"i2_bound_holds", r.i2_bound_holds(1e-8)}};
}

Json to_json(const LelongClassReport& r) {
  return Json{{"uo", numbers(r.uo)},         {"uo_error", numbers(r.uo_error)},
              {"max_uo", number(r.max_uo)},  {"bound", r.bound},
              {"proof_bound", r.proof_bound}, {"converged", r.converged},
              {"pass", r.pass}};
}

Json to_json(const CounterexampleRow& r) {
  return Json{{"x", r.x},
              {"gap", number(r.gap)},
              {"gap_closed_form", number(r.gap_closed_form)},
              {"uo", number(r.uo)},
              {"uo_error", number(r.uo_error)},
              {"mo_lower", number(r.mo_lower)},
              {"mo_lower_error", number(r.mo_lower_error)}};
}

Json to_json(const SlopeFit& r) {
  return Json{{"slope", number(r.slope)},
              {"intercept", number(r.intercept)},
              {"residual_rms", number(r.residual_rms)},
              {"r", numbers(r.r_values)},
              {"y", numbers(r.y_values)},
              {"non_asymptotic", r.non_asymptotic}};
}

Json to_json(const GammaResult& r) {
  return Json{{"gamma", r.gamma}, {"a0", r.a0}, {"iterations", r.iterations}, {"residual", r.residual}};
}

Json to_json(const RemezReport& r) {
  return Json{{"polynomial", r.polynomial_id}, {"region", r.region_id},   {"degree", r.degree},
              {"uo", number(r.uo)},          {"uo_error", number(r.uo_error)}, {"ratio", number(r.ratio)},
              {"pass", r.pass}};
}

Json to_json(const RayAudit& r) {
  Json rays = Json::array();
  for (const auto& row : r.rays)
    rays.push_back(Json{{"direction", numbers(row.direction)},
                        {"length", number(row.length)},
                        {"uo", number(row.uo)},
                        {"ratio", number(row.ratio)},
                        {"sup_on_ray", number(row.sup_on_ray)},
                        {"sup_gap", number(row.sup_gap)}});
  return Json{{"z0", numbers(r.z0)},         {"sup", number(r.sup)},
              {"degree", r.degree},          {"max_ratio", number(r.max_ratio)},
              {"max_sup_gap", number(r.max_sup_gap)}, {"region_uo", number(r.region_uo)},
              {"region_ratio", number(r.region_ratio)}, {"pass", r.pass},
              {"rays", rays}};
}

Json to_json(const BergmanResult& r) {
  Json j{{"value", number(r.value)},
         {"log_normalized", number(r.log_normalized)},
         {"method", method_name(r.method)},
         {"truncation_degree", r.truncation_degree},
         {"convergence_gap", number(r.convergence_gap)},
         {"condition_estimate", number(r.condition_estimate)},
         {"pivoted", r.pivoted},
         {"flagged", r.flagged},
         {"note", r.note}};
  if (!r.basis.empty()) j["basis_size"] = r.basis.size();
  return j;
}

Json to_json(const SandwichReport& r) {
  return Json{{"lower", number(r.lower)}, {"middle", number(r.middle)}, {"upper", number(r.upper)},
              {"eps_sup", number(r.sup)}, {"pass", r.pass}};
}

Json to_json(const OtReport& r) {
  return Json{{"kernel", number(r.kernel)}, {"bound", number(r.bound)}, {"margin", number(r.margin)}, {"pass", r.pass}};
}

Json to_json(const MonotonicityReport& r) {
  return Json{{"f_values", numbers(r.f_values)}, {"lower_bound", number(r.lower_bound)},
              {"bound_holds", r.bound_holds},    {"monotone", r.monotone},
              {"pass", r.pass}};
}

Json to_json(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const HessianCheckReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels) levels.push_back(Json{{"h", l.h}, {"matrix", to_json(l.matrix)}});
  return Json{{"levels", levels},
              {"extrapolated", to_json(r.extrapolated)},
              {"target", to_json(r.target)},
              {"max_abs_dev", number(r.max_abs_dev)},
              {"observed_order", number(r.observed_order)},
              {"hermitian_defect", number(r.hermitian_defect)}};
}

Json to_json(const LelongPreservationReport& r) {
  Json lhs = Json::array();
  for (const auto& f : r.lhs) lhs.push_back(to_json(f));
  Json agrees = Json::array();
  for (bool b : r.agrees) agrees.push_back(b);
  return Json{{"rhs", to_json(r.rhs)},
              {"lhs", lhs},
              {"eps_values", numbers(r.eps_values)},
              {"agrees", agrees},
              {"eps_used", r.eps_used ? Json(*r.eps_used) : Json(nullptr)},
              {"flagged", r.flagged}};
}

Json to_json(const DecayTable& r) {
  Json tail = Json::array();
  for (auto k : r.tail) tail.push_back(k);
  return Json{{"t_values", numbers(r.t_values)},
              {"log_measures", numbers(r.log_measures)},
              {"mean", number(r.mean)},
              {"median_deviation", number(r.median_deviation)},
              {"samples", r.samples},
              {"tail_indices", tail},
              {"fitted_slope", number(r.fitted_slope)},
              {"fitted_intercept", number(r.fitted_intercept)},
              {"residual_rms", number(r.residual_rms)}};
}

Json to_json(const EpsilonReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back(Json{{"eps", row.eps},
                        {"member_means", numbers(row.member_means)},
                        {"sup_mean", number(row.sup_mean)},
                        {"divergent", row.divergent},
                        {"fluctuation", number(row.fluctuation)},
                        {"theil_sen_slope", number(row.theil_sen_slope)},
                        {"bounded", row.bounded}});
  return Json{{"family_size", r.family_size},   {"eps_values", numbers(r.eps_values)},
              {"sup_means", numbers(r.sup_means)}, {"threshold", r.threshold},
              {"eps0_estimate", number(r.eps0_estimate)}, {"rows", rows}};
}

}  // namespace pshosc
