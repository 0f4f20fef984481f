#include "degenlab/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "degenlab/errors.hpp"
#include "degenlab/fit.hpp"
#include "degenlab/geometry.hpp"
#include "degenlab/parallel.hpp"

namespace degenlab {

using quad::QuadratureResult;

std::string_view to_string(ExampleId id) {
  switch (id) {
    case ExampleId::kEx1: return "EX1";
    case ExampleId::kEx2: return "EX2";
    case ExampleId::kEx3: return "EX3";
    case ExampleId::kBorderline: return "BORDERLINE";
  }
  return "UNKNOWN";
}

std::optional<ExampleId> parse_example_id(std::string_view text) {
  if (text == "EX1") return ExampleId::kEx1;
  if (text == "EX2") return ExampleId::kEx2;
  if (text == "EX3") return ExampleId::kEx3;
  if (text == "BORDERLINE") return ExampleId::kBorderline;
  return std::nullopt;
}

std::string_view to_string(SourceForm form) { return form == SourceForm::kVerbatim ? "verbatim" : "derived"; }

ExampleSpec ExampleSpec::make(ExampleId id, int n, double q, std::optional<double> theta_override) {
  if (n < 2) throw DomainError("example dimension must be >= 2");
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("example q must be positive and finite");
  if (theta_override && id != ExampleId::kEx3) throw DomainError("theta can only be chosen for EX3");
  constexpr double eq_tol = 1e-12;
  ExampleSpec spec;
  spec.id = id;
  spec.n = n;
  spec.q = q;
  switch (id) {
    case ExampleId::kEx1:
      if (!(q > 0.5 * n * (1 + eq_tol))) throw DomainError("EX1 needs q > n/2");
      spec.beta = n / q;
      spec.theta = 1.0 / q + 0.5 - 1.0 / n;
      break;
    case ExampleId::kEx2:
      if (std::abs(q - 0.5 * n) > eq_tol * n) throw DomainError("EX2 needs q = n/2");
      spec.q = 0.5 * n;
      spec.beta = 2.0;
      spec.theta = 5.0 / (2.0 * n);
      break;
    case ExampleId::kEx3:
      if (n < 3) throw DomainError("EX3 needs n >= 3");
      if (!(q > 0.5 * (n - 1) && q < 0.5 * n)) throw DomainError("EX3 needs (n-1)/2 < q < n/2");
      spec.beta = n / q;
      if (theta_override) {
        if (!(*theta_override > 1.0 / q)) throw DomainError("EX3 needs theta > 1/q");
        spec.theta = *theta_override;
        spec.extrapolated = true;
      } else {
        spec.theta = 2.0 / q;
      }
      break;
    case ExampleId::kBorderline:
      if (n < 3) throw DomainError("BORDERLINE needs n >= 3");
      if (std::abs(q - 0.5 * (n - 1)) > eq_tol * n) throw DomainError("BORDERLINE needs q = (n-1)/2");
      spec.q = 0.5 * (n - 1);
      spec.beta = n / spec.q;
      spec.theta = 2.0 / spec.q;
      break;
  }
  return spec;
}

RadialCoefficient ExampleSpec::coefficient() const {
  RadialCoefficient c;
  c.beta = beta;
  c.theta = theta;
  c.domain_radius = 0.5;
  return c;
}

SourceCoefficients ExampleSpec::source_coefficients(SourceForm form) const {
  if (form == SourceForm::kDerived) return {beta + n - 1.0, -theta, theta};
  switch (id) {
    case ExampleId::kEx1: return {n + 1.0, -theta, theta};
    case ExampleId::kEx2: return {n + 1.0, theta, theta};
    case ExampleId::kEx3:
      if (extrapolated) return {n + 1.0, -theta, theta};
      return {n + 1.0, -1.0, 1.0};
    case ExampleId::kBorderline: return {n + 1.0, -1.0, 1.0};
  }
  return {};
}

namespace {

QuadratureResult kernel_value(int m, double r, double tol, const KernelCache* cache) {
  if (cache == nullptr) return kernel_direct(m, r, tol);
  QuadratureResult q;
  q.value = cache->value(m, r);
  q.error_estimate = cache->achieved_accuracy() * std::abs(q.value);
  q.converged = cache->meets_budget();
  q.status = q.converged ? quad::Status::kConverged : quad::Status::kNotConverged;
  return q;
}

QuadratureResult scaled(QuadratureResult q, double factor) {
  q.value *= factor;
  q.error_estimate *= std::abs(factor);
  q.tail_bound *= std::abs(factor);
  return q;
}

void check_radius(double r, const char* what) {
  if (!(r >= 0.0 && r <= 0.5)) throw DomainError(std::string(what) + ": r must lie in [0, 1/2]");
}

}  // namespace

QuadratureResult eval_u(const ExampleSpec& spec, double r, double tol, const KernelCache* cache) {
  check_radius(r, "eval_u");
  if (r == 0.0) return QuadratureResult::divergence();
  return scaled(kernel_value(1, r, tol, cache), sphere_area(spec.n));
}

QuadratureResult eval_du(const ExampleSpec& spec, double r, double tol, const KernelCache* cache) {
  check_radius(r, "eval_du");
  if (r == 0.0) return QuadratureResult::divergence();
  return scaled(kernel_value(2, r, tol, cache), -sphere_area(spec.n));
}

QuadratureResult eval_f(const ExampleSpec& spec, double r, double tol, SourceForm form, const KernelCache* cache) {
  check_radius(r, "eval_f");
  if (r == 0.0) return QuadratureResult::divergence();
  const SourceCoefficients c = spec.source_coefficients(form);
  const QuadratureResult k2 = kernel_value(2, r, tol, cache);
  const QuadratureResult k3 = kernel_value(3, r, tol, cache);
  const double L = std::log(1.0 / r);
  const double rb1 = std::pow(r, spec.beta - 1.0);
  const double lt = std::pow(L, c.log_power);
  const double w2 = c.c_flux * rb1 * lt + c.c_log * rb1 * lt / L;
  const double w3 = -2.0 * rb1 * r * lt;
  const double area = sphere_area(spec.n);
  QuadratureResult out = quad::combine(scaled(k2, w2 * area), scaled(k3, w3 * area));
  // Magnitudes of the individual terms bound the cancellation error.
  out.error_estimate = area * (std::abs(w2) * (k2.error_estimate + k2.tail_bound) +
                               std::abs(w3) * (k3.error_estimate + k3.tail_bound));
  return out;
}

WeakResidualReport radial_residual(const RadialTriple& triple, double r_a, double r_b, int node_count,
                                   double relative_step, double budget) {
  if (!(r_a > 0.0)) throw DomainError("residual window must stay away from the origin (r_a > 0)");
  if (!(r_b > r_a)) throw DomainError("residual window must satisfy r_a < r_b");
  if (node_count < 16) throw DomainError("residual check needs at least 16 nodes");
  if (!(relative_step > 0.0 && relative_step < 0.1)) throw DomainError("relative differencing step must lie in (0, 0.1)");
  WeakResidualReport report;
  report.r_a = r_a;
  report.r_b = r_b;
  report.node_count = node_count;
  report.relative_step = relative_step;
  report.budget = budget;
  const int n = triple.n;
  auto flux = [&](double r) { return std::pow(r, n - 1) * triple.a1(r) * triple.du(r); };
  std::vector<double> residual(static_cast<std::size_t>(node_count));
  std::vector<double> nodes(residual.size());
  const double ratio = std::log(r_b / r_a);
  for (int i = 0; i < node_count; ++i) nodes[i] = r_a * std::exp(ratio * i / (node_count - 1));
  nodes.back() = r_b;
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double r = nodes[i];
    const double h = relative_step * r;
    const double div = (flux(r + h) - flux(r - h)) / (2.0 * h) / std::pow(r, n - 1);
    const double f = triple.f(r);
    residual[i] = std::abs(-div - f) / (1.0 + std::abs(f));
  });
  for (std::size_t i = 0; i < residual.size(); ++i) {
    if (!(residual[i] <= report.residual_sup)) {
      report.residual_sup = residual[i];
      report.argmax_r = nodes[i];
    }
  }
  report.within_budget = report.residual_sup < budget;
  return report;
}

WeakResidualReport residual_check(const ExampleSpec& spec, double r_a, double r_b, int node_count, double tol,
                                  SourceForm form, double relative_step, double budget) {
  if (!(r_b * (1.0 + relative_step) <= 0.5)) throw DomainError("residual window must stay inside (0, 1/2]");
  const RadialCoefficient coef = spec.coefficient();
  RadialTriple triple;
  triple.n = spec.n;
  triple.a1 = [coef](double r) { return eval_a1(coef, r); };
  triple.du = [&spec, tol](double r) { return eval_du(spec, r, tol).value; };
  triple.f = [&spec, tol, form](double r) { return eval_f(spec, r, tol, form).value; };
  WeakResidualReport report = radial_residual(triple, r_a, r_b, node_count, relative_step, budget);
  report.transcription_discrepancy = !report.within_budget;
  return report;
}

DivergenceProfile blowup_profile(const ExampleSpec& spec, int k_max, double tol, int fit_lo, int fit_hi) {
  if (k_max < 4) throw DomainError("blowup profile needs k_max >= 4");
  DivergenceProfile profile;
  for (int k = 2; k <= k_max; ++k) {
    profile.ks.push_back(k);
    profile.radii.push_back(std::ldexp(1.0, -k));
  }
  profile.values.resize(profile.ks.size());
  parallel_for(profile.ks.size(), [&](std::size_t i) { profile.values[i] = eval_u(spec, profile.radii[i], tol).value; });
  profile.strictly_increasing = true;
  for (std::size_t i = 1; i < profile.values.size(); ++i)
    profile.strictly_increasing = profile.strictly_increasing && profile.values[i] > profile.values[i - 1];

  profile.fit_k_lo = std::max(2, fit_lo);
  profile.fit_k_hi = std::min(k_max, fit_hi);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < profile.ks.size(); ++i) {
    if (profile.ks[i] < profile.fit_k_lo || profile.ks[i] > profile.fit_k_hi) continue;
    xs.push_back(std::log(std::log(1.0 / profile.radii[i])));
    ys.push_back(profile.values[i]);
  }
  if (xs.size() >= 3) {
    const LinearFit fit = least_squares(xs, ys);
    profile.intercept = fit.intercept;
    profile.slope = fit.slope;
    profile.fit_quality = fit.r_squared;
  }
  return profile;
}

SourceProfile source_profile(const ExampleSpec& spec, int k_max, SourceForm form, double tol,
                             double stabilization_tol) {
  if (k_max < 4) throw DomainError("source profile needs k_max >= 4");
  SourceProfile profile;
  const int per_octave = 4;
  for (int j = 2 * per_octave; j <= k_max * per_octave; ++j)
    profile.radii.push_back(std::exp2(-static_cast<double>(j) / per_octave));
  profile.values.resize(profile.radii.size());
  parallel_for(profile.radii.size(),
               [&](std::size_t i) { profile.values[i] = std::abs(eval_f(spec, profile.radii[i], tol, form).value); });
  const double coarse_floor = std::exp2(-0.5 * k_max);
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    profile.sup_fine = std::max(profile.sup_fine, profile.values[i]);
    if (profile.radii[i] >= coarse_floor) profile.sup_coarse = std::max(profile.sup_coarse, profile.values[i]);
  }
  profile.stabilized = std::abs(profile.sup_fine - profile.sup_coarse) <= stabilization_tol * profile.sup_fine;
  return profile;
}

quad::AsymptoticExponents source_asymptotics(const ExampleSpec& spec, double s, SourceForm form) {
  const SourceCoefficients c = spec.source_coefficients(form);
  return {s * (spec.beta - 2.0) + spec.n - 1.0, s * (c.log_power - 1.0)};
}

quad::NormLadderTable membership(const ExampleSpec& spec, double s, std::span<const double> cutoffs, SourceForm form,
                                 const quad::NormLadderOptions& options, const KernelCache* cache) {
  const double tol = std::max(1e-13, 0.1 * options.tol);
  auto f = [&](double r) { return eval_f(spec, r, tol, form, cache).value; };
  const quad::AsymptoticExponents hint = source_asymptotics(spec, s, form);
  return quad::nested_norm_integral(f, s, spec.n, spec.domain_radius, cutoffs, options, &hint);
}

}  // namespace degenlab
