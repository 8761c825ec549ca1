#include "pshosc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "pshosc/acceptance.hpp"
#include "pshosc/parallel.hpp"

namespace pshosc {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::pair<std::string, ParamMap> split_spec(const std::string& spec, const char* what) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  if (name.empty()) throw std::invalid_argument(std::string("empty ") + what + " name in '" + spec + "'");
  ParamMap params;
  if (colon != std::string::npos && colon + 1 < spec.size()) {
    for (const auto& kv : split(spec.substr(colon + 1), ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument(std::string("malformed ") + what + " parameter '" + kv + "' in '" + spec + "'");
      if (!params.emplace(kv.substr(0, eq), kv.substr(eq + 1)).second)
        throw std::invalid_argument(std::string("duplicate ") + what + " parameter '" + kv.substr(0, eq) + "'");
    }
  }
  return {name, params};
}

void only_keys(const ParamMap& p, std::initializer_list<const char*> allowed, const std::string& kind) {
  for (const auto& [k, v] : p)
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      throw std::invalid_argument("region '" + kind + "': unknown key '" + k + "'");
}

const std::string& need(const ParamMap& p, const char* key, const std::string& kind) {
  auto it = p.find(key);
  if (it == p.end()) throw std::invalid_argument("region '" + kind + "': missing '" + key + "'");
  return it->second;
}

double parse_double(const std::string& s) {
  const auto v = parse_real_list(s);
  if (v.size() != 1) throw std::invalid_argument("expected one number, got '" + s + "'");
  return v[0];
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PshFunction parse_function_spec(const std::string& spec) {
  auto [name, params] = split_spec(spec, "function");
  return catalog_lookup(name, params);
}

Region parse_region_spec(const std::string& spec) {
  auto [kind, p] = split_spec(spec, "region");
  if (kind == "disc") {
    only_keys(p, {"c", "r"}, kind);
    const Complex c = p.count("c") ? parse_complex(p.at("c")) : Complex{};
    return make_disc(c, parse_double(need(p, "r", kind)));
  }
  if (kind == "polydisc") {
    only_keys(p, {"c", "r"}, kind);
    auto r = parse_real_list(need(p, "r", kind));
    auto c = p.count("c") ? parse_complex_list(p.at("c")) : std::vector<Complex>(r.size());
    if (c.size() != r.size()) throw std::invalid_argument("region 'polydisc': c and r lengths differ");
    return Polydisc(ComplexVector(c), r);
  }
  if (kind == "segment") {
    only_keys(p, {"a", "b"}, kind);
    auto a = parse_complex_list(need(p, "a", kind));
    auto b = parse_complex_list(need(p, "b", kind));
    if (a.size() != b.size()) throw std::invalid_argument("region 'segment': endpoint dimensions differ");
    return Segment(ComplexVector(a), ComplexVector(b));
  }
  if (kind == "box") {
    only_keys(p, {"c", "r", "a"}, kind);
    auto a = parse_real_list(need(p, "a", kind));
    auto c = p.count("c") ? parse_complex_list(p.at("c")) : std::vector<Complex>(a.size());
    if (c.size() != a.size()) throw std::invalid_argument("region 'box': c and a lengths differ");
    return AnisotropicBox(ComplexVector(c), parse_double(need(p, "r", kind)), a);
  }
  if (kind == "polytope") {
    only_keys(p, {"v"}, kind);
    std::vector<std::vector<double>> verts;
    for (const auto& v : split(need(p, "v", kind), '/')) verts.push_back(parse_real_list(v));
    return ConvexPolytope(verts);
  }
  throw std::invalid_argument("unknown region kind '" + kind + "' (disc, polydisc, segment, box, polytope)");
}

QuadratureSpec parse_quad_spec(const std::string& spec, QuadratureSpec base) {
  if (spec.empty()) return base;
  for (const auto& kv : split(spec, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed --quad entry '" + kv + "'");
    const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
    std::size_t used = 0;
    auto whole = [&](auto parsed) {
      if (used != v.size()) throw std::invalid_argument("malformed --quad value '" + kv + "'");
      return parsed;
    };
    try {
      if (k == "radial") base.radial_nodes = whole(std::stoi(v, &used));
      else if (k == "angular") base.angular_nodes = whole(std::stoi(v, &used));
      else if (k == "tol") base.target_rel_error = whole(std::stod(v, &used));
      else if (k == "refine") base.max_refinements = whole(std::stoi(v, &used));
      else if (k == "mc") base.mc_samples = whole(std::stoll(v, &used));
      else if (k == "seed") base.seed = whole(std::stoull(v, &used));
      else throw std::invalid_argument("unknown --quad key '" + k + "' (radial, angular, tol, refine, mc, seed)");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const std::invalid_argument*>(&e) && std::string(e.what()).find("--quad") != std::string::npos)
        throw;
      throw std::invalid_argument("malformed --quad value '" + kv + "'");
    }
  }
  base.validate();
  return base;
}

std::string CsvTable::render() const {
  auto cell = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell(r[i]);
    out += "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

namespace {

struct Outcome {
  Json config = Json::object();
  Json results;
  bool pass = true;
  std::string summary;
  std::optional<CsvTable> csv;
};

// One row of the scalar fields, for payloads without a table.
CsvTable scalar_table(const Json& j) {
  CsvTable t;
  if (!j.is_object()) return t;
  std::vector<std::string> row;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.value().is_structured()) continue;
    t.header.push_back(it.key());
    row.push_back(it.value().is_string() ? it.value().get<std::string>() : it.value().dump());
  }
  t.rows.push_back(row);
  return t;
}

std::vector<Polydisc> random_family(std::size_t n, int count, double max_aspect, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> e(-6, 6), ang(0, 2 * M_PI);
  std::uniform_real_distribution<double> asp(0, std::log10(max_aspect));
  std::vector<Polydisc> out;
  for (int k = 0; k < count; ++k) {
    std::vector<Complex> c(n);
    std::vector<double> r(n);
    const double base = std::pow(10.0, e(rng));
    for (std::size_t j = 0; j < n; ++j) {
      c[j] = std::polar(std::pow(10.0, e(rng)), ang(rng));
      r[j] = base * std::pow(10.0, -asp(rng));
    }
    out.emplace_back(ComplexVector(c), r);
  }
  return out;
}

PshFunction function_with_dim(const std::string& spec, std::optional<std::size_t> n) {
  if (!n) return parse_function_spec(spec);
  auto [name, params] = split_spec(spec, "function");
  if (!params.count("dim")) {
    ParamMap with = params;
    with["dim"] = std::to_string(*n);
    try {
      return catalog_lookup(name, with);
    } catch (const std::invalid_argument&) {
    }
  }
  PshFunction f = catalog_lookup(name, params);
  if (f.dim() != *n)
    throw std::invalid_argument("--n " + std::to_string(*n) + " does not match the dimension of '" + spec + "'");
  return f;
}

BergmanMethod parse_method(const std::string& m) {
  if (m == "auto") return BergmanMethod::Auto;
  if (m == "circular") return BergmanMethod::Circular;
  if (m == "gram") return BergmanMethod::Gram;
  throw std::invalid_argument("unknown method '" + m + "' (auto, circular, gram)");
}

Polydisc region_as_polydisc(const std::string& spec, std::size_t n) {
  if (spec.empty()) return Polydisc(ComplexVector::zeros(n), std::vector<double>(n, 1.0));
  Region r = parse_region_spec(spec);
  if (auto* p = std::get_if<Polydisc>(&r)) return *p;
  if (auto* b = std::get_if<AnisotropicBox>(&r)) return b->as_polydisc();
  throw std::invalid_argument("this command needs a disc, polydisc or box region");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

const char* kGrammarHelp = R"(Function specs (--fn): name:key=value,...  lists use ';', complex as 1+2i.
  log_abs:z0=..;..[,dim=n]   log_poly:roots=..;..[,mult=..,lead=..]   lelong_max:dim=n
  counterexample             quadratic:c=row-major|diag=..            m_log:m=..,dim=n
  max_log:m=..;..            constant:value=..,dim=n                  re_z:dim=n
Region specs (--region):
  disc:c=0,r=1   polydisc:c=0;0,r=0.5;0.25   segment:a=-0.27846,b=1
  box:c=0;0,r=0.01,a=1;2     polytope:v=x1;y1;../x2;y2;../...   (real coordinates)
Quadrature (--quad): radial=16,angular=32,tol=1e-10,refine=3,mc=200000,seed=7
Exit codes: 0 pass, 1 assertion failed, 2 numerical failure, 64 usage error.)";

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Oscillation, Remez and Bergman-kernel experiments for plurisubharmonic functions", "pshosc"};
  app.footer(kGrammarHelp);
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 0;
  std::string quad_text, output = "json", out_path;
  bool timing = false;
  auto add_globals = [&](CLI::App* a) {
    a->add_option("--seed", seed, "Seed for sweeps and sampling")->envname("PSHOSC_SEED");
    a->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
    a->add_option("--quad", quad_text, "Quadrature overrides");
    a->add_option("--output", output, "Emitted formats")->check(CLI::IsMember({"json", "csv", "both"}));
    a->add_option("--out", out_path, "Write PATH.json / PATH.csv instead of stdout");
    a->add_flag("--timing", timing, "Include wall time in the report");
  };
  add_globals(&app);

  struct Leaf {
    CLI::App* app;
    std::string name;
    std::function<Outcome()> run;
  };
  std::vector<Leaf> leaves;
  QuadratureSpec spec;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc) {
    CLI::App* a = parent->add_subcommand(name, desc);
    a->fallthrough();
    return a;
  };
  auto group = [&](const std::string& name, const std::string& desc) {
    CLI::App* g = app.add_subcommand(name, desc);
    g->require_subcommand(1);
    g->fallthrough();
    return g;
  };

  // Option storage shared by the leaves.
  std::string fn, region, method = "auto", a_text, x_text, eps_text, h_text, center_text;
  double eps = 1.0, tol = 1e-12, rmax = 0.5, ratio = 0.5, step = 1e-3, xmax = 1.0, max_aspect = 1e12, threshold = 1e6;
  int count = 0, deg_max = 6, grid = 41;
  std::int64_t samples = 0;
  std::optional<std::size_t> dim_n;
  std::string only = "1-13";

  // ---- osc
  CLI::App* osc = group("osc", "Upper and mean oscillation");
  {
    CLI::App* a = leaf(osc, "uo", "UO and MO of a function over a region");
    a->add_option("--fn", fn, "Function spec")->required();
    a->add_option("--region", region, "Region spec")->required();
    leaves.push_back({a, "osc uo", [&] {
                        Outcome o;
                        auto f = parse_function_spec(fn);
                        auto rep = oscillation(f, parse_region_spec(region), spec);
                        o.config = Json{{"fn", fn}, {"region", region}};
                        o.results = to_json(rep);
                        o.summary = "UO = " + num(rep.uo) + ", MO = " + num(rep.mo);
                        if (!rep.converged) throw NumericalFailure("osc uo: quadrature did not converge");
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(osc, "harnack", "Harnack decomposition I1, I2, J1, J2 on a polydisc");
    a->add_option("--fn", fn, "Function spec")->required();
    a->add_option("--region", region, "Polydisc spec")->required();
    leaves.push_back({a, "osc harnack", [&] {
                        Outcome o;
                        auto f = parse_function_spec(fn);
                        auto d = harnack_decomposition(f, region_as_polydisc(region, f.dim()), spec);
                        o.config = Json{{"fn", fn}, {"region", region}};
                        o.results = to_json(d);
                        o.pass = d.i1_bound_holds(1e-8) && d.i2_bound_holds(1e-8);
                        o.summary = "I1 " + num(d.i1) + " vs 3^n J1 " + num(std::pow(3.0, d.n) * d.j1) + "; I2 " +
                                    num(d.i2) + " vs J2 " + num(d.j2);
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(osc, "lelong-class", "UO bound 3^n over a seeded random polydisc family");
    a->add_option("--fn", fn, "Function spec with a Lelong-class constant")->required();
    a->add_option("--count", count, "Family size")->default_val(50);
    a->add_option("--max-aspect", max_aspect, "Largest aspect ratio")->default_val(1e12);
    leaves.push_back({a, "osc lelong-class", [&] {
                        Outcome o;
                        auto f = parse_function_spec(fn);
                        if (count < 1) throw std::invalid_argument("--count must be positive");
                        auto fam = random_family(f.dim(), count, max_aspect, seed);
                        auto rep = lelong_class_check(f, fam, spec, seed);
                        o.config = Json{{"fn", fn}, {"count", count}, {"max_aspect", max_aspect}};
                        o.results = to_json(rep);
                        o.pass = rep.pass;
                        o.summary = "max UO " + num(rep.max_uo) + " against " + num(rep.bound);
                        CsvTable t{{"index", "uo", "uo_error"}, {}};
                        for (std::size_t i = 0; i < rep.uo.size(); ++i)
                          t.rows.push_back({std::to_string(i), num(rep.uo[i]), num(rep.uo_error[i])});
                        o.csv = t;
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(osc, "counterexample", "Gap, UO and MO lower bound of the BMO counterexample");
    a->add_option("--x", x_text, "x values")->default_val("-1;-2;-5;-10;-20;-50");
    leaves.push_back({a, "osc counterexample", [&] {
                        Outcome o;
                        auto xs = parse_real_list(x_text);
                        auto rows = counterexample_scan(xs, spec);
                        o.config = Json{{"x", x_text}};
                        o.results = Json::array();
                        CsvTable t{{"x", "gap", "UO", "MO_lower"}, {}};
                        double worst = 0.0, mo = 0.0;
                        for (const auto& r : rows) {
                          o.results.push_back(to_json(r));
                          t.rows.push_back({num(r.x), num(r.gap), num(r.uo), num(r.mo_lower)});
                          worst = std::max(worst, std::abs(r.gap - r.gap_closed_form));
                          mo = std::max(mo, r.mo_lower);
                        }
                        o.csv = t;
                        o.pass = worst <= 1e-12;
                        o.summary = "gap formula error " + num(worst) + ", largest MO lower bound " + num(mo);
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(osc, "lelong-number", "Directional Lelong number as a slope in log r");
    a->add_option("--fn", fn, "Function spec")->required();
    a->add_option("--a", a_text, "Exponents a_j (default all 1)");
    a->add_option("--rmax", rmax, "Largest r")->default_val(0.5);
    a->add_option("--ratio", ratio, "Grid ratio")->default_val(0.5);
    a->add_option("--count", count, "Grid points")->default_val(8);
    leaves.push_back({a, "osc lelong-number", [&] {
                        Outcome o;
                        auto f = parse_function_spec(fn);
                        auto av = a_text.empty() ? std::vector<double>(f.dim(), 1.0) : parse_real_list(a_text);
                        auto fit = directional_lelong(f, av, log_spaced(rmax, ratio, count), spec);
                        o.config = Json{{"fn", fn}, {"a", av}, {"rmax", rmax}, {"ratio", ratio}, {"count", count}};
                        o.results = to_json(fit);
                        o.summary = "slope " + num(fit.slope);
                        CsvTable t{{"r", "sup"}, {}};
                        for (std::size_t i = 0; i < fit.r_values.size(); ++i)
                          t.rows.push_back({num(fit.r_values[i]), num(fit.y_values[i])});
                        o.csv = t;
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(osc, "aspect-sweep", "UO of log|z| on the unit disc centered at x");
    a->add_option("--step", step, "Grid step")->default_val(1e-3);
    a->add_option("--xmax", xmax, "Largest x")->default_val(1.0);
    leaves.push_back({a, "osc aspect-sweep", [&] {
                        Outcome o;
                        if (!(step > 0) || !(xmax >= 0)) throw std::invalid_argument("--step must be > 0, --xmax >= 0");
                        const auto pts = static_cast<std::size_t>(std::floor(xmax / step + 1e-9)) + 1;
                        auto uo = parallel_map<double>(pts, [&](std::size_t k) { return disc_log_uo(k * step); });
                        const auto best = std::max_element(uo.begin(), uo.end()) - uo.begin();
                        o.config = Json{{"step", step}, {"xmax", xmax}};
                        o.results = Json{{"points", pts}, {"max_uo", uo[best]}, {"argmax", best * step}};
                        o.summary = "max UO " + num(uo[best]) + " at x = " + num(best * step);
                        CsvTable t{{"x", "UO"}, {}};
                        for (std::size_t k = 0; k < pts; ++k) t.rows.push_back({num(k * step), num(uo[k])});
                        o.csv = t;
                        return o;
                      }});
  }

  // ---- gamma / remez
  CLI::App* gamma = group("gamma", "The constant gamma with gamma + log(gamma - 1) = 0");
  {
    CLI::App* a = leaf(gamma, "solve", "Solve for gamma");
    a->add_option("--tol", tol, "Residual tolerance")->default_val(1e-12);
    leaves.push_back({a, "gamma solve", [&] {
                        Outcome o;
                        auto g = gamma_constant(tol);
                        o.config = Json{{"tol", tol}};
                        o.results = to_json(g);
                        o.pass = g.residual <= tol && g.gamma > 1.278 && g.gamma < 1.279;
                        char buf[64];
                        std::snprintf(buf, sizeof buf, "gamma = %.15f", g.gamma);
                        o.summary = buf;
                        return o;
                      }});
  }
  CLI::App* remez = group("remez", "Remez-type bound UO_A(log|p|) <= gamma deg p");
  auto remez_table = [](const std::vector<RemezReport>& reps, Outcome& o) {
    o.results = Json::array();
    CsvTable t{{"polynomial", "region", "degree", "uo", "uo_error", "ratio", "pass"}, {}};
    for (const auto& r : reps) {
      o.results.push_back(to_json(r));
      t.rows.push_back({r.polynomial_id, r.region_id, std::to_string(r.degree), num(r.uo), num(r.uo_error),
                        num(r.ratio), r.pass ? "true" : "false"});
    }
    o.csv = t;
  };
  {
    CLI::App* a = leaf(remez, "sweep", "Seeded random (polynomial, region) pairs");
    a->add_option("--count", count, "Pairs")->default_val(100);
    a->add_option("--deg-max", deg_max, "Largest total degree")->default_val(6);
    leaves.push_back({a, "remez sweep", [&] {
                        Outcome o;
                        auto reps = remez_sweep(count, seed, deg_max, spec);
                        remez_table(reps, o);
                        o.config = Json{{"count", count}, {"deg_max", deg_max}};
                        int bad = 0;
                        double worst = 0.0;
                        for (const auto& r : reps) {
                          bad += !r.pass;
                          worst = std::max(worst, r.ratio);
                        }
                        o.pass = bad == 0;
                        o.summary = std::to_string(bad) + " of " + std::to_string(reps.size()) +
                                    " pairs exceed gamma; max ratio " + num(worst);
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(remez, "sharpness", "Segment families approaching gamma");
    a->add_option("--grid", grid, "Grid points around a0")->default_val(41);
    leaves.push_back({a, "remez sharpness", [&] {
                        Outcome o;
                        auto reps = remez_sharpness(spec, grid);
                        remez_table(reps, o);
                        o.config = Json{{"grid", grid}};
                        double best = 0.0;
                        for (const auto& r : reps) best = std::max(best, r.ratio);
                        o.pass = best >= cached_gamma().gamma - 1e-3;
                        o.summary = "max ratio " + num(best) + " (gamma " + num(cached_gamma().gamma) + ")";
                        return o;
                      }});
  }

  // ---- bergman
  CLI::App* bergman = group("bergman", "Weighted Bergman kernels at the origin");
  auto weight_opts = [&](CLI::App* a) {
    a->add_option("--fn", fn, "Function spec for phi")->required();
    a->add_option("--eps", eps, "Weight e^{-eps phi}")->default_val(1.0);
  };
  {
    CLI::App* a = leaf(bergman, "kernel", "K_{eps phi, P}(0) on a polydisc centered at 0");
    weight_opts(a);
    a->add_option("--region", region, "Polydisc spec (default unit polydisc)");
    a->add_option("--method", method, "auto, circular or gram")->default_val("auto");
    leaves.push_back({a, "bergman kernel", [&] {
                        Outcome o;
                        auto w = make_weight(parse_function_spec(fn), eps, seed);
                        auto r = bergman_origin(w, region_as_polydisc(region, w.phi.dim()), spec, parse_method(method));
                        o.config = Json{{"fn", fn}, {"eps", eps}, {"region", region}, {"method", method}};
                        o.results = to_json(r);
                        if (r.flagged) throw NumericalFailure("bergman kernel: " + r.note);
                        o.summary = "K(0) = " + num(r.value) + " (" + method_name(r.method) + ")";
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(bergman, "ot", "Sharp Ohsawa-Takegoshi bound on the unit polydisc");
    weight_opts(a);
    a->add_option("--n", dim_n, "Dimension");
    leaves.push_back({a, "bergman ot", [&] {
                        Outcome o;
                        auto w = make_weight(function_with_dim(fn, dim_n), eps, seed);
                        auto r = ot_check(w, spec);
                        o.config = Json{{"fn", fn}, {"eps", eps}, {"n", w.phi.dim()}};
                        o.results = to_json(r);
                        o.pass = r.pass;
                        o.summary = "K(0) " + num(r.kernel) + " vs bound " + num(r.bound) + ", margin " + num(r.margin);
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(bergman, "sandwich", "e^{-eps sup} <= |P| K(0) / ... <= 1 sandwich");
    weight_opts(a);
    a->add_option("--region", region, "Polydisc spec (default unit polydisc)");
    leaves.push_back({a, "bergman sandwich", [&] {
                        Outcome o;
                        auto w = make_weight(parse_function_spec(fn), eps, seed);
                        auto r = sandwich_check(w, region_as_polydisc(region, w.phi.dim()), spec);
                        o.config = Json{{"fn", fn}, {"eps", eps}, {"region", region}};
                        o.results = to_json(r);
                        o.pass = r.pass;
                        o.summary = num(r.lower) + " <= " + num(r.middle) + " <= " + num(r.upper);
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(bergman, "hessian", "Finite-difference Hessian of F at t = 0");
    a->set_help_flag("--help", "Print this help message and exit");
    weight_opts(a);
    a->add_option("--h", h_text, "Steps (default 0.2;0.1;0.05)");
    a->add_option("--method", method, "auto, circular or gram")->default_val("auto");
    leaves.push_back({a, "bergman hessian", [&] {
                        Outcome o;
                        auto w = make_weight(parse_function_spec(fn), eps, seed);
                        auto h = h_text.empty() ? default_hessian_steps() : parse_real_list(h_text);
                        auto r = hessian_limit_check(w, h, spec, parse_method(method));
                        o.config = Json{{"fn", fn}, {"eps", eps}, {"h", h}, {"method", method}};
                        o.results = to_json(r);
                        o.summary = "max |extrapolated - target| = " + num(r.max_abs_dev);
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(bergman, "lelong-preserve", "Lelong numbers of F(eps phi) / eps against phi");
    a->add_option("--fn", fn, "Function spec for phi")->required();
    a->add_option("--a", a_text, "Exponents a_j (default all 1)");
    a->add_option("--eps", eps_text, "Decreasing eps values")->default_val("0.9;0.5;0.25");
    a->add_option("--rmax", rmax, "Largest r")->default_val(0.5);
    a->add_option("--ratio", ratio, "Grid ratio")->default_val(0.5);
    a->add_option("--count", count, "Grid points")->default_val(6);
    leaves.push_back({a, "bergman lelong-preserve", [&] {
                        Outcome o;
                        auto f = parse_function_spec(fn);
                        auto av = a_text.empty() ? std::vector<double>(f.dim(), 1.0) : parse_real_list(a_text);
                        auto ev = parse_real_list(eps_text);
                        auto r = lelong_preservation_check(f, av, ev, log_spaced(rmax, ratio, count), spec);
                        o.config = Json{{"fn", fn}, {"a", av}, {"eps", ev}, {"rmax", rmax}, {"ratio", ratio},
                                        {"count", count}};
                        o.results = to_json(r);
                        o.pass = r.eps_used.has_value();
                        o.summary = r.eps_used ? "slopes agree at eps = " + num(*r.eps_used) : "no admissible eps agrees";
                        CsvTable t{{"eps", "lhs_slope", "rhs_slope", "agrees"}, {}};
                        for (std::size_t i = 0; i < r.lhs.size(); ++i)
                          t.rows.push_back({num(r.eps_values[i]), num(r.lhs[i].slope), num(r.rhs.slope),
                                            r.agrees[i] ? "true" : "false"});
                        o.csv = t;
                        return o;
                      }});
  }

  // ---- jn
  CLI::App* jn = group("jn", "John-Nirenberg decay and exponential integrability");
  {
    CLI::App* a = leaf(jn, "decay", "Distribution of |phi - mean| on a box");
    a->add_option("--fn", fn, "Function spec")->required();
    a->add_option("--region", region, "Box or polydisc spec (default unit polydisc)");
    a->add_option("--samples", samples, "Sample count (default 10^6 per dimension)")->default_val(0);
    leaves.push_back({a, "jn decay", [&] {
                        Outcome o;
                        auto f = parse_function_spec(fn);
                        AnisotropicBox box(ComplexVector::zeros(f.dim()), 1.0, std::vector<double>(f.dim(), 1.0));
                        if (!region.empty()) {
                          Region r = parse_region_spec(region);
                          if (auto* b = std::get_if<AnisotropicBox>(&r)) {
                            box = *b;
                          } else if (auto* p = std::get_if<Polydisc>(&r)) {
                            // A polydisc is the box of scale 1 with its radii as exponents of e.
                            std::vector<double> ex;
                            for (double x : p->radii()) ex.push_back(-std::log(x));
                            box = AnisotropicBox(p->center(), std::exp(-1.0), ex);
                          } else {
                            throw std::invalid_argument("jn decay needs a box or polydisc region");
                          }
                        }
                        auto d = distribution_estimate(f, box, default_t_grid(), spec, seed, samples);
                        o.config = Json{{"fn", fn}, {"region", region}, {"samples", samples}};
                        o.results = to_json(d);
                        o.pass = std::isfinite(d.fitted_slope) ? d.fitted_slope < 0 : true;
                        o.summary = "fitted slope " + num(d.fitted_slope);
                        CsvTable t{{"t", "log_measure"}, {}};
                        for (std::size_t k = 0; k < d.t_values.size(); ++k)
                          t.rows.push_back({num(d.t_values[k]), num(d.log_measures[k])});
                        o.csv = t;
                        return o;
                      }});
  }
  {
    CLI::App* a = leaf(jn, "eps0", "Exponential means over a dyadic family of boxes");
    a->add_option("--fn", fn, "Function spec")->required();
    a->add_option("--center", center_text, "Family center (default 0)");
    a->add_option("--a", a_text, "Exponents a_j (default all 1)");
    a->add_option("--count", count, "Members r = 2^-k")->default_val(20);
    a->add_option("--eps", eps_text, "Increasing eps values")->default_val("0.5;1;1.5;1.9;2.5");
    a->add_option("--threshold", threshold, "Divergence threshold")->default_val(1e6);
    leaves.push_back({a, "jn eps0", [&] {
                        Outcome o;
                        auto f = parse_function_spec(fn);
                        auto av = a_text.empty() ? std::vector<double>(f.dim(), 1.0) : parse_real_list(a_text);
                        auto c = center_text.empty() ? std::vector<Complex>(f.dim()) : parse_complex_list(center_text);
                        auto ev = parse_real_list(eps_text);
                        auto r = epsilon0_search(f, dyadic_family(ComplexVector(c), av, count), ev, spec, threshold);
                        o.config = Json{{"fn", fn}, {"center", to_json(c)}, {"a", av}, {"count", count}, {"eps", ev},
                                        {"threshold", threshold}};
                        o.results = to_json(r);
                        o.summary = "eps0 estimate " + num(r.eps0_estimate);
                        CsvTable t{{"eps", "sup_mean", "divergent", "bounded"}, {}};
                        for (const auto& row : r.rows)
                          t.rows.push_back({num(row.eps), num(row.sup_mean), row.divergent ? "true" : "false",
                                            row.bounded ? "true" : "false"});
                        o.csv = t;
                        return o;
                      }});
  }

  // ---- verify-all
  {
    CLI::App* a = app.add_subcommand("verify-all", "Run the acceptance criteria");
    a->fallthrough();
    a->add_option("--only", only, "Criteria, e.g. 1,3,5-7")->default_val("1-13");
    leaves.push_back({a, "verify-all", [&] {
                        Outcome o;
                        AcceptanceOptions opt;
                        opt.seed = seed;
                        o.config = Json{{"only", only}};
                        o.results = Json::array();
                        CsvTable t{{"id", "title", "pass", "summary"}, {}};
                        int passed = 0;
                        const auto ids = parse_criterion_list(only);
                        for (int id : ids) {
                          CriterionResult r = run_criterion(id, opt);
                          std::fprintf(stderr, "[%s] criterion %d (%s): %s\n", r.pass ? "PASS" : "FAIL", id,
                                       r.title.c_str(), r.summary.c_str());
                          passed += r.pass;
                          o.results.push_back(to_json(r, timing));
                          t.rows.push_back({std::to_string(id), r.title, r.pass ? "true" : "false", r.summary});
                        }
                        o.csv = t;
                        o.pass = passed == static_cast<int>(ids.size());
                        o.summary = std::to_string(passed) + "/" + std::to_string(ids.size()) + " criteria pass";
                        return o;
                      }});
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const Leaf* chosen = nullptr;
  for (const auto& l : leaves)
    if (l.app->parsed()) chosen = &l;
  if (!chosen) {
    std::cerr << app.help();
    return kExitUsage;
  }

  Outcome outcome;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    spec = parse_quad_spec(quad_text, QuadratureSpec{});
    spec.seed = quad_text.find("seed=") == std::string::npos ? seed : spec.seed;
    set_worker_count(workers);
    outcome = chosen->run();
  } catch (const std::invalid_argument& e) {
    std::cerr << "pshosc: " << e.what() << "\nRun with --help for the grammar.\n";
    return kExitUsage;
  } catch (const NumericalFailure& e) {
    std::cerr << "pshosc: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const OracleViolation& e) {
    std::cerr << "pshosc: oracle violation: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "pshosc: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json report;
  report["artifact"] = Json{{"name", kArtifactName}, {"version", kArtifactVersion}};
  report["command"] = chosen->name;
  Json config = outcome.config;
  config["seed"] = seed;
  config["quadrature"] = to_json(spec);
  config["defaults"] = defaults_table();
  report["config"] = config;
  report["results"] = outcome.results;
  report["pass"] = outcome.pass;
  report["summary"] = outcome.summary;
  if (timing) report["wall_time_s"] = wall;

  const std::string json_text = report.dump(2) + "\n";
  const bool want_json = output != "csv", want_csv = output != "json";
  const CsvTable table = outcome.csv ? *outcome.csv : scalar_table(outcome.results);
  try {
    if (!out_path.empty()) {
      if (want_json) write_file(out_path + ".json", json_text);
      if (want_csv) write_file(out_path + ".csv", table.render());
    } else {
      if (want_json) std::cout << json_text;
      if (want_csv) std::cout << table.render();
    }
  } catch (const std::runtime_error& e) {
    std::cerr << "pshosc: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!outcome.pass) std::cerr << "pshosc: assertion failed: " << outcome.summary << "\n";
  return outcome.pass ? kExitPass : kExitAssertion;
}

}  // namespace pshosc
