#include "degenlab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "degenlab/coefficients.hpp"
#include "degenlab/counterexamples.hpp"
#include "degenlab/errors.hpp"
#include "degenlab/exponents.hpp"
#include "degenlab/harness.hpp"
#include "degenlab/kernel.hpp"
#include "degenlab/parallel.hpp"
#include "degenlab/quadrature.hpp"
#include "degenlab/solver.hpp"

namespace degenlab {

namespace {

using Handler = std::function<CommandResult(const Json&)>;

Number number_from(const Json& v) {
  if (v.is_string()) return Number::parse(v.get<std::string>());
  if (v.is_number_integer()) return Number::integer(v.get<long long>());
  return Number::parse(format_number(v.get<double>()));
}

Json number_json(const Number& x) {
  if (x.is_infinite()) return "inf";
  if (x.is_exact() && x.exact()->den() == 1) return x.exact()->num();
  return x.value();
}

Json derived_json(const DerivedValue& d) { return d.defined ? number_json(d.number) : Json("undefined"); }

Json maybe_divergent(bool divergent, double value) { return divergent ? Json("divergent") : Json(value); }

ProblemParams params_from(const Json& cfg) {
  const Json& p = cfg.at("params");
  ProblemParams out;
  out.n = p.at("n").get<int>();
  out.p = number_from(p.at("p"));
  out.q = number_from(p.at("q"));
  out.s = number_from(p.at("s"));
  out.gamma = number_from(p.at("gamma"));
  out.validate();
  return out;
}

ExampleSpec example_from(const Json& cfg) {
  const Json& e = cfg.at("example");
  const auto id = parse_example_id(e.at("id").get<std::string>());
  std::optional<double> theta;
  if (e.contains("theta")) theta = e.at("theta").get<double>();
  return ExampleSpec::make(*id, e.at("n").get<int>(), e.at("q").get<double>(), theta);
}

SourceForm form_from(const Json& cfg) {
  return cfg.at("example").at("form").get<std::string>() == "derived" ? SourceForm::kDerived : SourceForm::kVerbatim;
}

SolverConfig solver_from(const Json& cfg) {
  const Json& s = cfg.at("solver");
  SolverConfig out;
  out.r_min = s.at("r_min").get<double>();
  out.grading = s.at("grading").get<double>();
  out.linear_tolerance = s.at("linear_tolerance").get<double>();
  out.max_iterations = s.at("max_iterations").get<int>();
  out.inner_bc = *parse_inner_boundary(s.at("inner_bc").get<std::string>());
  out.cells = s.at("cells").get<int>();
  return out;
}

double tol(const Json& cfg, const char* key) { return cfg.at("tolerances").at(key).get<double>(); }

RadialCoefficient coefficient_from(const Json& opts, double R) {
  RadialCoefficient c;
  c.beta = opts.value("beta", 0.0);
  c.theta = opts.value("theta", 0.0);
  c.scale = opts.value("scale", 1.0);
  c.domain_radius = c.is_uniform() ? R : 0.5;
  c.validate();
  if (R > c.domain_radius) throw DomainError("a degenerate coefficient needs the domain inside |x| <= 1/2");
  return c;
}

// a_1 as a field; the uniform coefficient is also defined at the origin.
RadialField coefficient_field(const RadialCoefficient& coef) {
  if (coef.is_uniform()) return [scale = coef.scale](double) { return scale; };
  return [coef](double r) { return eval_a1(coef, r); };
}

std::vector<std::size_t> seeded_order(std::size_t count, const Json& cfg) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.at("seed").get<unsigned long long>());
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

Json solver_stats_json(const DiscreteSolution& s) {
  return {{"iterations", s.stats.iterations},
          {"final_residual", s.stats.final_residual},
          {"linear_tolerance", s.linear_tolerance},
          {"config_hash", s.config_hash}};
}

Json fit_json(double intercept, double slope, double r2) {
  return {{"intercept", intercept}, {"slope", slope}, {"fit_quality", r2}};
}

Json ladder_json(const quad::NormLadderTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"cutoff", r.cutoff},
                    {"partial", r.partial},
                    {"increment", r.increment},
                    {"relative_increment", r.relative_increment}});
  return {{"s", t.s},
          {"rows", rows},
          {"empirical", std::string(quad::to_string(t.empirical))},
          {"structural", t.has_structural ? Json(std::string(quad::to_string(t.structural))) : Json("none")},
          {"verdict", std::string(quad::to_string(t.verdict))}};
}

// ---------------------------------------------------------------- exponents

Json exponents_json(const ProblemParams& params) {
  const ExponentTable t = derive_exponents(params);
  const RegimeClassification c = classify_regime(params);
  Json exact = Json::object();
  auto add_exact = [&](const char* key, const DerivedValue& d) {
    exact[key] = d.defined ? Json(d.number.to_string()) : Json("undefined");
  };
  add_exact("p_star", t.p_star);
  add_exact("p_prime", t.p_prime);
  add_exact("s_prime", t.s_prime);
  add_exact("chi", t.chi);
  add_exact("delta", t.delta);
  add_exact("m_star", t.m_star);
  add_exact("s0", t.s0);
  add_exact("q_star", t.q_star);
  return {{"p_star", derived_json(t.p_star)},
          {"p_prime", derived_json(t.p_prime)},
          {"s_prime", derived_json(t.s_prime)},
          {"chi", derived_json(t.chi)},
          {"delta", derived_json(t.delta)},
          {"m_star", derived_json(t.m_star)},
          {"s0", derived_json(t.s0)},
          {"q_star", derived_json(t.q_star)},
          {"exact_path", t.exact},
          {"exact", exact},
          {"flags",
           {{"cond_structure", t.flags.cond_structure},
            {"cond_q_supercritical", t.flags.cond_q_supercritical},
            {"cond_s_admissible", t.flags.cond_s_admissible}}},
          {"regime",
           {{"regime", std::string(to_string(c.regime))},
            {"applicable_result", c.applicable_result},
            {"note", c.note}}},
          {"sharpness_status", t.sharpness_status}};
}

CommandResult cmd_exponents(const Json& cfg) { return {exponents_json(params_from(cfg)), std::nullopt}; }

// ------------------------------------------------------------- coefficients

CommandResult cmd_coefficients(const Json& cfg) {
  const ProblemParams params = params_from(cfg);
  const Json& o = cfg.at("options");
  const double R = o.at("R").get<double>();
  const RadialCoefficient coef = coefficient_from(o, R);
  const EllipticityReport rep = compute_Lambda(coef, coef, params, R, tol(cfg, "quadrature"));
  auto weighted = [](const WeightedIntegral& w) {
    return Json{{"divergent", w.divergent},
                {"integral", maybe_divergent(w.divergent, w.integral)},
                {"norm", maybe_divergent(w.divergent, w.norm)},
                {"error_estimate", w.error_estimate}};
  };
  Json result = {{"lambda_inv_Lq", weighted(rep.lambda_inv_Lq)},
                 {"mu_Lp", weighted(rep.mu_Lp)},
                 {"ball_radius", R},
                 {"Lambda_BR", rep.lambda_defined ? Json(rep.Lambda_BR) : Json("divergent")}};
  if (rep.lambda_defined) {
    result["mean_lambda_term"] = rep.mean_lambda_term;
    result["mean_mu_term"] = rep.mean_mu_term;
  }
  return {result, std::nullopt};
}

// ------------------------------------------------------------------- kernel

CommandResult cmd_kernel(const Json& cfg) {
  const Json& o = cfg.at("options");
  const double ktol = tol(cfg, "kernel");
  const auto xs = o.at("x").get<std::vector<double>>();
  const bool split = o.at("split").get<bool>();
  CsvTable csv;
  csv.columns = {"x", "K", "error_estimate", "nodes", "inner", "outer", "split_consistent"};
  csv.descriptions = {"|x|", "K_m(|x|) by direct quadrature", "quadrature error estimate plus tail bound",
                      "integrand evaluations", "integral over rho < sqrt|x| (empty without split)",
                      "integral over rho > sqrt|x| (empty without split)", "inner + outer matches the direct value"};
  Json entries = Json::array();
  for (double x : xs) {
    KernelSpec spec;
    spec.m = o.at("m").get<int>();
    spec.x_norm = x;
    spec.outer_radius = o.at("outer_radius").get<double>();
    Json e = {{"x", x}};
    std::vector<std::string> row{format_number(x)};
    if (split) {
      const KernelEvaluation ev = eval_kernel(spec, ktol);
      e["K"] = maybe_divergent(ev.direct.divergent(), ev.direct.value);
      e["error_estimate"] = ev.direct.error_estimate + ev.direct.tail_bound;
      e["nodes"] = ev.direct.nodes_used;
      e["inner"] = maybe_divergent(ev.inner.divergent(), ev.inner.value);
      e["outer"] = ev.outer.value;
      e["split_consistent"] = ev.split_consistent;
      if (ev.bounds) {
        e["inner_bound"] = ev.bounds->inner_bound;
        e["outer_bound"] = ev.bounds->outer_bound;
        e["bounds_respected"] = ev.bounds->respected;
      }
      row.insert(row.end(), {ev.direct.divergent() ? "divergent" : format_number(ev.direct.value),
                             format_number(e["error_estimate"].get<double>()), std::to_string(ev.direct.nodes_used),
                             ev.inner.divergent() ? "divergent" : format_number(ev.inner.value),
                             format_number(ev.outer.value), ev.split_consistent ? "true" : "false"});
    } else {
      spec.validate();
      const quad::QuadratureResult q = kernel_direct(spec.m, x, ktol, spec.outer_radius);
      e["K"] = maybe_divergent(q.divergent(), q.value);
      e["error_estimate"] = q.error_estimate + q.tail_bound;
      e["nodes"] = q.nodes_used;
      e["converged"] = q.converged;
      row.insert(row.end(), {q.divergent() ? "divergent" : format_number(q.value),
                             format_number(q.error_estimate + q.tail_bound), std::to_string(q.nodes_used), "", "", ""});
    }
    entries.push_back(e);
    csv.rows.push_back(row);
  }
  return {{{"m", o.at("m")}, {"tolerance", ktol}, {"values", entries}}, csv};
}

// --------------------------------------------------------------------- norm

CommandResult cmd_norm(const Json& cfg) {
  const Json& o = cfg.at("options");
  const double a = o.at("a").get<double>();
  const double b = o.at("b").get<double>();
  const double lo = o.at("r_lo").get<double>();
  const double hi = o.at("r_hi").get<double>();
  const double qtol = tol(cfg, "quadrature");
  const quad::QuadratureResult q = quad::integrate_radial_power_log(a, b, lo, hi, qtol);

  // Cutoff ladder int_{eps_k}^{r_hi}, eps_k = r_hi 10^{-k/2}, down to r_lo.
  CsvTable csv;
  csv.columns = {"cutoff", "partial", "increment", "relative_increment"};
  csv.descriptions = {"inner cutoff eps_k", "int_{eps_k}^{r_hi} r^a (log 1/r)^b dr", "partial_k - partial_{k-1}",
                      "increment / partial"};
  double previous = 0.0;
  for (int k = 1; k <= 16; ++k) {
    const double eps = hi * std::pow(10.0, -0.5 * k);
    if (eps <= lo) break;
    const quad::QuadratureResult piece = quad::integrate_radial_power_log(a, b, eps, hi, qtol);
    const double inc = k == 1 ? piece.value : piece.value - previous;
    csv.rows.push_back({format_number(eps), format_number(piece.value), format_number(inc),
                        format_number(piece.value != 0.0 ? inc / piece.value : 0.0)});
    previous = piece.value;
  }
  return {{{"integrand", "r^a (log 1/r)^b"},
           {"a", a},
           {"b", b},
           {"r_lo", lo},
           {"r_hi", hi},
           {"converges_at_origin", quad::power_log_converges_at_origin(a, b)},
           {"value", maybe_divergent(q.divergent(), q.value)},
           {"error_estimate", q.error_estimate},
           {"tail_bound", q.tail_bound},
           {"nodes", q.nodes_used},
           {"status", std::string(quad::to_string(q.status))}},
          csv};
}

// -------------------------------------------------------------------- solve

CommandResult cmd_solve(const Json& cfg) {
  const Json& o = cfg.at("options");
  const SolverConfig sc = solver_from(cfg);
  const double R = o.at("R").get<double>();
  const std::string source = o.at("source").get<std::string>();
  const double value = o.at("source_value").get<double>();
  const double plateau = o.at("plateau_radius").get<double>();
  const double qtol = tol(cfg, "kernel");
  const bool use_example = source == "example" || o.at("boundary").get<std::string>() == "example";
  std::optional<ExampleSpec> ex;
  if (use_example) ex = example_from(cfg);
  const SourceForm form = form_from(cfg);
  const bool planar = o.at("geometry").get<std::string>() == "planar";
  // The planar square [-R, R]^2 reaches |x| = sqrt(2) R.
  const double reach = planar ? std::sqrt(2.0) * R : R;
  const RadialCoefficient coef = ex ? ex->coefficient() : coefficient_from(o, reach);
  if (ex && reach > 0.5) throw DomainError("example solves need the domain inside |x| <= 1/2");
  RadialField a1 = coefficient_field(coef);
  RadialField f;
  std::vector<double> breaks;
  SourceSign sign = value > 0 ? SourceSign::kNonnegative : value < 0 ? SourceSign::kNonpositive : SourceSign::kZero;
  if (source == "constant") {
    f = [value](double) { return value; };
  } else if (source == "plateau") {
    f = [value, plateau](double r) { return r < plateau ? value : 0.0; };
    breaks.push_back(plateau);
  } else {
    const ExampleSpec spec = *ex;
    f = [spec, qtol, form](double r) { return eval_f(spec, r, qtol, form).value; };
    sign = SourceSign::kNonnegative;
  }
  CsvTable csv;
  CommandResult out;
  if (!planar) {
    RadialProblem p;
    p.a1 = a1;
    p.f = f;
    p.n = ex ? ex->n : cfg.at("params").at("n").get<int>();
    p.R = R;
    p.source_breakpoints = breaks;
    p.outer_value = o.at("outer_value").get<double>();
    if (o.at("boundary").get<std::string>() == "example") p.outer_value = eval_u(*ex, R, qtol).value;
    if (sc.inner_bc == InnerBoundary::kDirichletFromKernel) {
      if (!ex) throw DomainError("DIRICHLET_FROM_KERNEL needs an example (set boundary or source to example)");
      p.inner_value = eval_u(*ex, sc.r_min, qtol).value;
    }
    const DiscreteSolution sol = solve_radial(p, sc);
    const MaxPrincipleReport mp = max_principle_check(sol, sign);
    csv.columns = {"r", "u"};
    csv.descriptions = {"mesh radius", "nodal solution value"};
    const auto& r = sol.radial().nodes;
    for (std::size_t i = 0; i < r.size(); ++i) csv.rows.push_back({format_number(r[i]), format_number(sol.values[i])});
    out.result = {{"geometry", "radial"},
                  {"n", p.n},
                  {"R", R},
                  {"nodes", r.size()},
                  {"u_max", *std::max_element(sol.values.begin(), sol.values.end())},
                  {"u_min", *std::min_element(sol.values.begin(), sol.values.end())},
                  {"solver_stats", solver_stats_json(sol)},
                  {"max_principle", {{"holds", mp.holds}, {"violations", mp.violations.size()}}}};
  } else {
    // An even cell count puts a grid node at the origin, where a degenerate coefficient or the example
    // source has no finite value.
    if ((ex || !coef.is_uniform()) && sc.cells % 2 == 0)
      throw DomainError("planar solves with a degenerate coefficient need an odd cell count");
    PlanarProblem p;
    p.grid.x0 = -R;
    p.grid.y0 = -R;
    p.grid.side = 2 * R;
    p.grid.cells = sc.cells;
    p.a_x = [a1](double x, double y) { return a1(std::hypot(x, y)); };
    p.f = [f](double x, double y) { return f(std::hypot(x, y)); };
    const std::string bc = o.at("boundary").get<std::string>();
    const double outer = o.at("outer_value").get<double>();
    if (bc == "constant") {
      p.boundary = [outer](double, double) { return outer; };
    } else if (bc == "x1") {
      p.boundary = [](double x, double) { return x; };
    } else {
      const ExampleSpec spec = *ex;
      p.boundary = [spec, qtol](double x, double y) { return eval_u(spec, std::hypot(x, y), qtol).value; };
    }
    const DiscreteSolution sol = solve_2d_diagonal(p, sc);
    const MaxPrincipleReport mp = max_principle_check(sol, sign);
    csv.columns = {"x1", "x2", "u"};
    csv.descriptions = {"first coordinate", "second coordinate", "nodal solution value"};
    const Grid2D& g = sol.grid();
    for (int j = 0; j <= g.cells; ++j)
      for (int i = 0; i <= g.cells; ++i)
        csv.rows.push_back({format_number(g.x(i)), format_number(g.y(j)), format_number(sol.values[g.index(i, j)])});
    out.result = {{"geometry", "planar"},
                  {"half_width", R},
                  {"cells", g.cells},
                  {"u_max", *std::max_element(sol.values.begin(), sol.values.end())},
                  {"u_min", *std::min_element(sol.values.begin(), sol.values.end())},
                  {"solver_stats", solver_stats_json(sol)},
                  {"max_principle", {{"holds", mp.holds}, {"violations", mp.violations.size()}}}};
  }
  out.sweep = csv;
  return out;
}

// ----------------------------------------------------------------- examples

Json spec_json(const ExampleSpec& s, SourceForm form) {
  const SourceCoefficients c = s.source_coefficients(form);
  return {{"id", std::string(to_string(s.id))},
          {"n", s.n},
          {"q", s.q},
          {"beta", s.beta},
          {"theta", s.theta},
          {"extrapolated", s.extrapolated},
          {"form", std::string(to_string(form))},
          {"source_coefficients", {{"c_flux", c.c_flux}, {"c_log", c.c_log}, {"log_power", c.log_power}}}};
}

CommandResult cmd_example_eval(const Json& cfg) {
  const ExampleSpec spec = example_from(cfg);
  const SourceForm form = form_from(cfg);
  const double ktol = tol(cfg, "kernel");
  const auto radii = cfg.at("options").at("radii").get<std::vector<double>>();
  CsvTable csv;
  csv.columns = {"r", "u", "f"};
  csv.descriptions = {"radius", "u(r) = alpha_n K_1(r)", "source f(r) in the configured form"};
  Json values = Json::array();
  std::vector<quad::QuadratureResult> us(radii.size());
  std::vector<quad::QuadratureResult> fs(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    us[i] = eval_u(spec, radii[i], ktol);
    fs[i] = eval_f(spec, radii[i], ktol, form);
  });
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const Json u = maybe_divergent(us[i].divergent(), us[i].value);
    const Json f = maybe_divergent(fs[i].divergent(), fs[i].value);
    values.push_back({{"r", radii[i]}, {"u", u}, {"u_error", us[i].error_estimate}, {"f", f}});
    csv.rows.push_back({format_number(radii[i]), us[i].divergent() ? "divergent" : format_number(us[i].value),
                        fs[i].divergent() ? "divergent" : format_number(fs[i].value)});
  }
  return {{{"example", spec_json(spec, form)}, {"values", values}}, csv};
}

Json residual_json(const WeakResidualReport& r) {
  return {{"r_a", r.r_a},
          {"r_b", r.r_b},
          {"residual_sup", r.residual_sup},
          {"argmax_r", r.argmax_r},
          {"node_count", r.node_count},
          {"relative_step", r.relative_step},
          {"budget", r.budget},
          {"within_budget", r.within_budget},
          {"transcription_discrepancy", r.transcription_discrepancy}};
}

CommandResult cmd_example_residual(const Json& cfg) {
  const ExampleSpec spec = example_from(cfg);
  const SourceForm form = form_from(cfg);
  const Json& o = cfg.at("options");
  const WeakResidualReport r =
      residual_check(spec, o.at("r_a").get<double>(), o.at("r_b").get<double>(), o.at("nodes").get<int>(),
                     tol(cfg, "kernel"), form, o.at("relative_step").get<double>(), tol(cfg, "residual_budget"));
  return {{{"example", spec_json(spec, form)}, {"residual", residual_json(r)}}, std::nullopt};
}

CommandResult cmd_example_blowup(const Json& cfg) {
  const ExampleSpec spec = example_from(cfg);
  const Json& o = cfg.at("options");
  const DivergenceProfile p = blowup_profile(spec, o.at("kmax").get<int>(), tol(cfg, "kernel"),
                                             o.at("fit_lo").get<int>(), o.at("fit_hi").get<int>());
  CsvTable csv;
  csv.columns = {"k", "eps", "u"};
  csv.descriptions = {"dyadic level", "eps_k = 2^{-k}", "u(eps_k)"};
  for (std::size_t i = 0; i < p.ks.size(); ++i)
    csv.rows.push_back({std::to_string(p.ks[i]), format_number(p.radii[i]), format_number(p.values[i])});
  return {{{"example", spec_json(spec, form_from(cfg))},
           {"strictly_increasing", p.strictly_increasing},
           {"growth_model", std::string(p.growth_model)},
           {"fit", fit_json(p.intercept, p.slope, p.fit_quality)},
           {"fit_k_lo", p.fit_k_lo},
           {"fit_k_hi", p.fit_k_hi},
           {"values", p.values}},
          csv};
}

std::vector<double> decade_cutoffs(int first, int last, int per) {
  if (last < first) throw DomainError("last_decade must be >= first_decade");
  std::vector<double> out;
  for (int j = first * per; j <= last * per; ++j) out.push_back(std::pow(10.0, -static_cast<double>(j) / per));
  return out;
}

CommandResult cmd_example_membership(const Json& cfg) {
  const ExampleSpec spec = example_from(cfg);
  const SourceForm form = form_from(cfg);
  const Json& o = cfg.at("options");
  const std::vector<double> cutoffs =
      decade_cutoffs(o.at("first_decade").get<int>(), o.at("last_decade").get<int>(), o.at("per_decade").get<int>());
  quad::NormLadderOptions lo;
  lo.convergence_threshold = tol(cfg, "ladder_threshold");
  lo.tol = std::max(1e-12, tol(cfg, "quadrature"));
  const quad::NormLadderTable t = membership(spec, o.at("s").get<double>(), cutoffs, form, lo);
  CsvTable csv;
  csv.columns = {"cutoff", "partial", "increment", "relative_increment"};
  csv.descriptions = {"inner cutoff eps_k", "alpha_n int_{eps_k}^{R} |f|^s r^{n-1} dr", "partial_k - partial_{k-1}",
                      "increment / partial"};
  for (const auto& r : t.rows)
    csv.rows.push_back({format_number(r.cutoff), format_number(r.partial), format_number(r.increment),
                        format_number(r.relative_increment)});
  return {{{"example", spec_json(spec, form)}, {"ladder", ladder_json(t)}}, csv};
}

// ------------------------------------------------------------------- verify

DiscreteSolution solve_constant_source(const RadialCoefficient& coef, int n, double R, double value,
                                       const SolverConfig& sc) {
  RadialProblem p;
  p.a1 = coefficient_field(coef);
  p.f = [value](double) { return value; };
  p.n = n;
  p.R = R;
  SolverConfig c = sc;
  c.inner_bc = InnerBoundary::kNoFlux;
  return solve_radial(p, c);
}

Json bound_json(const BoundCheckReport& b) {
  Json j = {{"lhs", b.lhs},
            {"norm_u_gamma", b.norm_u_gamma},
            {"norm_f_s", b.norm_f_s},
            {"rhs_norm_term", b.rhs_norm_term},
            {"rhs_source_term", b.rhs_source_term},
            {"Lambda_BR", b.lambda},
            {"lambda_factor", b.lambda_factor},
            {"fitted_C", b.fitted_C},
            {"divergent", b.divergent}};
  if (b.lhs_refinement_delta) j["lhs_refinement_delta"] = *b.lhs_refinement_delta;
  if (b.divergent) j["divergence_note"] = b.divergence_note;
  return j;
}

CommandResult cmd_verify_sup_bound(const Json& cfg) {
  const ProblemParams params = params_from(cfg);
  const Json& o = cfg.at("options");
  const SolverConfig sc = solver_from(cfg);
  const bool truncated = o.at("source").get<std::string>() == "example_truncated";
  // Default ball: the unit ball, or the example domain B_{1/4}.
  const double R = o.contains("R") ? o.at("R").get<double>() : truncated ? 0.25 : 1.0;
  const double theta = o.at("ball_fraction").get<double>();
  CsvTable csv;
  Json rows = Json::array();
  if (!truncated) {
    const RadialCoefficient coef = coefficient_from(o, R);
    const double value = o.at("source_value").get<double>();
    const Field f = Field::radial_function(params.n, [value](double) { return value; });
    csv.columns = {"cells", "lhs", "fitted_C"};
    csv.descriptions = {"radial mesh cells", "sampled sup over B_{theta R}", "lhs / (Lambda factor * rhs)"};
    std::vector<double> cs;
    for (int level = 0; level < 3; ++level) {
      SolverConfig c = sc;
      c.cells = sc.cells << level;
      const DiscreteSolution sol = solve_constant_source(coef, params.n, R, value, c);
      SolverConfig cr = c;
      cr.cells *= 2;
      const DiscreteSolution fine = solve_constant_source(coef, params.n, R, value, cr);
      const Field u = Field::radial_mesh(sol);
      const Field uf = Field::radial_mesh(fine);
      const BoundCheckReport b = sup_bound_check(u, f, params, coef, theta, R, {0.0, 0.0}, &uf);
      Json j = bound_json(b);
      j["cells"] = c.cells;
      rows.push_back(j);
      cs.push_back(b.fitted_C);
      csv.rows.push_back({std::to_string(c.cells), format_number(b.lhs), format_number(b.fitted_C)});
    }
    const auto [mn, mx] = std::minmax_element(cs.begin(), cs.end());
    return {{{"source", "constant"}, {"checks", rows}, {"fitted_C_spread", *mx / *mn - 1.0}}, csv};
  }
  const ExampleSpec spec = example_from(cfg);
  const SourceForm form = form_from(cfg);
  const RadialCoefficient coef = spec.coefficient();
  if (R > spec.domain_radius) throw DomainError("truncated example family needs R <= 1/4");
  const double ktol = tol(cfg, "kernel");
  const auto ks = o.at("truncation_k").get<std::vector<int>>();
  csv.columns = {"k", "lhs", "norm_f_s", "fitted_C"};
  csv.descriptions = {"truncation level, f = 0 for r < 2^{-k}", "sup of u_k over B_{theta R}",
                      "||f_k||_{L^s(B_R)}", "lhs / (Lambda factor * rhs)"};
  std::vector<Json> results(ks.size());
  std::vector<std::vector<std::string>> csv_rows(ks.size());
  const double outer = eval_u(spec, R, ktol).value;
  for (std::size_t idx : seeded_order(ks.size(), cfg)) {
    const int k = ks[idx];
    const double cut = std::ldexp(1.0, -k);
    RadialField fk = [spec, ktol, form, cut](double r) { return r > cut ? eval_f(spec, r, ktol, form).value : 0.0; };
    RadialProblem p;
    p.a1 = [coef](double r) { return eval_a1(coef, r); };
    p.f = fk;
    p.n = spec.n;
    p.R = R;
    p.outer_value = outer;
    SolverConfig c = sc;
    c.inner_bc = InnerBoundary::kNoFlux;
    c.r_min = cut;
    const DiscreteSolution sol = solve_radial(p, c);
    c.cells *= 2;
    const DiscreteSolution fine = solve_radial(p, c);
    const Field u = Field::radial_mesh(sol);
    const Field uf = Field::radial_mesh(fine);
    const Field f = Field::radial_function(spec.n, fk, false, {cut});
    const BoundCheckReport b = sup_bound_check(u, f, params, coef, theta, R, {0.0, 0.0}, &uf);
    Json j = bound_json(b);
    j["k"] = k;
    results[idx] = j;
    csv_rows[idx] = {std::to_string(k), format_number(b.lhs), format_number(b.norm_f_s), format_number(b.fitted_C)};
  }
  bool growing = true;
  for (std::size_t i = 1; i < results.size(); ++i)
    growing = growing && results[i].at("fitted_C").get<double>() > results[i - 1].at("fitted_C").get<double>();
  csv.rows = csv_rows;
  return {{{"source", "example_truncated"},
           {"example", spec_json(spec, form)},
           {"checks", results},
           {"fitted_C_increasing", growing}},
          csv};
}

CommandResult cmd_verify_harnack(const Json& cfg) {
  const ProblemParams params = params_from(cfg);
  const Json& o = cfg.at("options");
  const SolverConfig sc = solver_from(cfg);
  const double R = o.at("R").get<double>();
  const double value = o.at("source_value").get<double>();
  const auto betas = o.at("betas").get<std::vector<double>>();
  const auto thetas = o.at("thetas").get<std::vector<double>>();
  struct Member {
    double beta;
    double theta;
  };
  std::vector<Member> members;
  for (double b : betas)
    for (double t : thetas) members.push_back({b, t});
  std::vector<Json> results(members.size());
  std::vector<double> quotients(members.size());
  const Field f = Field::radial_function(params.n, [value](double) { return value; });
  for (std::size_t idx : seeded_order(members.size(), cfg)) {
    RadialCoefficient coef;
    coef.beta = members[idx].beta;
    coef.theta = members[idx].theta;
    coef.domain_radius = 0.5;
    coef.validate();
    const DiscreteSolution sol = solve_constant_source(coef, params.n, R, value, sc);
    const HarnackReport h = harnack_quotient(Field::radial_mesh(sol), f, params.n, params.s, R);
    quotients[idx] = h.quotient;
    results[idx] = {{"beta", coef.beta},
                    {"theta", coef.theta},
                    {"sup_half", h.sup_half},
                    {"inf_half", h.inf_half},
                    {"source_term", h.source_term},
                    {"quotient", h.quotient},
                    {"nonnegative", h.nonnegative}};
  }
  CsvTable csv;
  csv.columns = {"beta", "theta", "sup_half", "inf_half", "source_term", "quotient"};
  csv.descriptions = {"coefficient power", "coefficient log power", "sup of u over B_{R/2}", "inf of u over B_{R/2}",
                      "R^{2-n/s} ||f||_{L^s(B_R)}", "sup_half / (inf_half + source_term)"};
  for (const Json& r : results)
    csv.rows.push_back({format_number(r.at("beta")), format_number(r.at("theta")), format_number(r.at("sup_half")),
                        format_number(r.at("inf_half")), format_number(r.at("source_term")),
                        format_number(r.at("quotient"))});
  const auto [mn, mx] = std::minmax_element(quotients.begin(), quotients.end());
  return {{{"members", results}, {"max_quotient", *mx}, {"min_quotient", *mn}, {"spread", *mx / *mn}}, csv};
}

Field smooth_solution(int n, const SolverConfig& sc) {
  const DiscreteSolution sol = solve_constant_source(RadialCoefficient{0.0, 0.0, 1.0, 1.0}, n, 1.0, 1.0, sc);
  return Field::radial_mesh(sol);
}

Field example_solution(const ExampleSpec& spec, double ktol) {
  return Field::radial_function(spec.n, [spec, ktol](double r) { return eval_u(spec, r, ktol).value; }, true);
}

CommandResult cmd_verify_holder(const Json& cfg) {
  const Json& o = cfg.at("options");
  const auto center_v = o.at("center").get<std::vector<double>>();
  if (center_v.size() != 2) throw DomainError("center must have two coordinates");
  const Point2 center{center_v[0], center_v[1]};
  const std::string kind = o.at("solution").get<std::string>();
  Field u = Field::planar_function([](double x, double) { return x; });
  if (kind == "smooth") u = smooth_solution(cfg.at("params").at("n").get<int>(), solver_from(cfg));
  if (kind == "example") u = example_solution(example_from(cfg), tol(cfg, "kernel"));
  const HolderReport h = holder_exponent(u, center, o.at("R").get<double>(), o.at("levels").get<int>());
  CsvTable csv;
  csv.columns = {"r", "oscillation"};
  csv.descriptions = {"ball radius r_j = R 2^{-j}", "sampled max - min over B_{r_j}(center)"};
  for (std::size_t i = 0; i < h.scales.size(); ++i)
    csv.rows.push_back({format_number(h.scales[i]), format_number(h.oscillations[i])});
  return {{{"solution", kind},
           {"scales", h.scales},
           {"oscillations", h.oscillations},
           {"fitted_alpha", h.fitted_alpha},
           {"fit_quality", h.fit_quality},
           {"usable_levels", h.usable_levels},
           {"flags", h.flags}},
          csv};
}

Json moser_json(const MoserChainReport& m) {
  return {{"gamma0", m.gamma0},
          {"delta", m.delta},
          {"exponents", m.exponents},
          {"radii", m.radii},
          {"chain_norms", m.chain_norms},
          {"mean_norms", m.mean_norms},
          {"sampled_sup", m.sup_divergent ? Json("divergent") : Json(m.sampled_sup)},
          {"limit_gap", m.sup_divergent ? Json("divergent") : Json(m.limit_gap)},
          {"relative_gap", m.sup_divergent ? Json("divergent") : Json(m.relative_gap)},
          {"increments_decaying", m.increments_decaying},
          {"stabilizing", m.stabilizing}};
}

CommandResult cmd_verify_moser(const Json& cfg) {
  const ProblemParams params = params_from(cfg);
  const Json& o = cfg.at("options");
  const std::string kind = o.at("solution").get<std::string>();
  const Field u = kind == "smooth" ? smooth_solution(params.n, solver_from(cfg))
                                   : example_solution(example_from(cfg), tol(cfg, "kernel"));
  const MoserChainReport m = moser_norm_chain(u, o.at("gamma0").get<double>(), derive_exponents(params),
                                              o.at("M").get<int>(), tol(cfg, "gap"));
  CsvTable csv;
  csv.columns = {"m", "exponent", "radius", "chain_norm", "mean_norm"};
  csv.descriptions = {"chain index", "gamma0 delta^m", "rho_m = 1/4 + 4^{-(m+1)}", "||u||_{L^t(B_rho)}",
                      "(mean of |u|^t over B_rho)^{1/t}"};
  for (std::size_t i = 0; i < m.exponents.size(); ++i)
    csv.rows.push_back({std::to_string(i), format_number(m.exponents[i]), format_number(m.radii[i]),
                        format_number(m.chain_norms[i]), format_number(m.mean_norms[i])});
  Json result = moser_json(m);
  result["solution"] = kind;
  return {result, csv};
}

Json log_bound_json(const LogBoundReport& r) {
  return {{"family_tag", r.family_tag},
          {"members", r.members},
          {"s0_norms", r.s0_norms},
          {"s_norms", r.s_norms},
          {"sup_norms", r.sup_norms},
          {"sup_deltas", r.sup_deltas},
          {"log_terms", r.log_terms},
          {"ratios", r.ratios},
          {"s0_spread", r.s0_spread},
          {"ratio_spread", r.ratio_spread},
          {"fit", fit_json(r.fit_intercept, r.fit_slope, r.fit_quality)},
          {"flags", r.flags}};
}

LogBoundReport run_log_bound(const Json& cfg) {
  const ProblemParams params = params_from(cfg);
  const Json& o = cfg.at("options");
  const ExponentTable t = derive_exponents(params);
  if (!t.s0.defined) throw DomainError("log bound needs q > n/2 so that s0 is defined");
  if (params.s.is_infinite()) throw DomainError("log bound needs a finite s");
  PlateauFamily fam;
  fam.n = params.n;
  fam.s0 = t.s0.value();
  fam.s = params.s.value();
  fam.c = o.at("c").get<double>();
  fam.R = o.at("R").get<double>();
  fam.members = o.at("members").get<std::vector<int>>();
  fam.coefficient = coefficient_from(o, fam.R);
  return log_bound_check(fam, solver_from(cfg));
}

CommandResult cmd_verify_log_bound(const Json& cfg) {
  const LogBoundReport r = run_log_bound(cfg);
  CsvTable csv;
  csv.columns = {"M", "s0_norm", "s_norm", "sup", "sup_delta", "log_term", "ratio"};
  csv.descriptions = {"family member", "||f_M||_{s0}", "||f_M||_s", "sup of u_M (refined mesh)",
                      "|sup(2N) - sup(N)|", "log(||f||_s/||f||_{s0} + 1)",
                      "sup / (||f||_{s0} (log term + 1))"};
  for (std::size_t i = 0; i < r.members.size(); ++i)
    csv.rows.push_back({std::to_string(r.members[i]), format_number(r.s0_norms[i]), format_number(r.s_norms[i]),
                        format_number(r.sup_norms[i]), format_number(r.sup_deltas[i]), format_number(r.log_terms[i]),
                        format_number(r.ratios[i])});
  return {log_bound_json(r), csv};
}

// ------------------------------------------------------------------- report

Json with(const Json& cfg, const char* command, const char* sub, const Json& options) {
  Json c = cfg;
  c["command"] = command;
  if (sub != nullptr) c["subcommand"] = sub;
  else c.erase("subcommand");
  c["options"] = options;
  return normalize_config(c);
}

CommandResult cmd_report(const Json& cfg) {
  Json sections = Json::object();
  sections["exponents"] = cmd_exponents(cfg).result;
  sections["example_blowup"] = cmd_example_blowup(with(cfg, "example", "blowup", Json::object())).result;
  sections["example_residual"] = cmd_example_residual(with(cfg, "example", "residual", Json::object())).result;
  const ExponentTable t = derive_exponents(params_from(cfg));
  if (t.s0.defined) {
    Json ladder = Json::object();
    for (double factor : {1.0, 1.2}) {
      const double s = factor * t.s0.value();
      ladder[format_number(s)] =
          cmd_example_membership(with(cfg, "example", "membership", {{"s", s}})).result.at("ladder");
    }
    sections["example_membership"] = ladder;
  }
  const ProblemParams params = params_from(cfg);
  if (!t.s0.defined) sections["verify_log_bound"] = "skipped: s0 undefined";
  else if (params.s.is_infinite()) sections["verify_log_bound"] = "skipped: needs finite s";
  else sections["verify_log_bound"] = log_bound_json(run_log_bound(with(cfg, "verify", "log-bound", Json::object())));
  sections["verify_harnack"] = cmd_verify_harnack(with(cfg, "verify", "harnack", Json::object())).result;
  Json smooth = with(cfg, "verify", "moser-chain", Json::object());
  sections["verify_moser_chain_smooth"] = cmd_verify_moser(smooth).result;
  sections["verify_moser_chain_example"] = cmd_verify_moser(with(cfg, "verify", "moser-chain", {{"solution", "example"}})).result;
  return {sections, std::nullopt};
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"exponents", cmd_exponents},
      {"coefficients", cmd_coefficients},
      {"kernel", cmd_kernel},
      {"norm", cmd_norm},
      {"solve", cmd_solve},
      {"example eval", cmd_example_eval},
      {"example residual", cmd_example_residual},
      {"example blowup", cmd_example_blowup},
      {"example membership", cmd_example_membership},
      {"verify sup-bound", cmd_verify_sup_bound},
      {"verify harnack", cmd_verify_harnack},
      {"verify holder", cmd_verify_holder},
      {"verify moser-chain", cmd_verify_moser},
      {"verify log-bound", cmd_verify_log_bound},
      {"report", cmd_report},
  };
  return table;
}

}  // namespace

CommandResult run_command(const Json& cfg) {
  std::string key = cfg.at("command").get<std::string>();
  if (cfg.contains("subcommand")) key += " " + cfg.at("subcommand").get<std::string>();
  const auto it = handlers().find(key);
  if (it == handlers().end()) throw DomainError("no handler for '" + key + "'");
  return it->second(cfg);
}

}  // namespace degenlab
