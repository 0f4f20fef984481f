#include "degenlab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "degenlab/errors.hpp"
#include "degenlab/geometry.hpp"
#include "degenlab/quadrature.hpp"

namespace degenlab {

void RadialCoefficient::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("coefficient beta must be finite and >= 0");
  if (!std::isfinite(theta)) throw DomainError("coefficient theta must be finite");
  if (!(domain_radius > 0.0) || !std::isfinite(domain_radius)) throw DomainError("coefficient domain radius must be positive");
  if (!is_uniform() && domain_radius > 0.5) throw DomainError("a degenerate coefficient needs domain radius <= 1/2");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("coefficient scale must be positive");
}

double eval_a1(const RadialCoefficient& coef, double r) {
  if (!(r > 0.0 && r <= coef.domain_radius))
    throw DomainError("eval_a1: r = " + std::to_string(r) + " outside (0, " + std::to_string(coef.domain_radius) + "]");
  if (coef.is_uniform()) return coef.scale;
  const double log_inv = std::log(1.0 / r);
  const double exponent = coef.beta * std::log(r) + coef.theta * std::log(log_inv);
  return coef.scale * std::exp(exponent);
}

namespace {

void check_ball(const RadialCoefficient& coef, int n, double R) {
  coef.validate();
  if (n < 1) throw DomainError("dimension must be >= 1");
  if (!(R > 0.0 && R <= coef.domain_radius)) throw DomainError("ball radius must lie in (0, domain_radius]");
}

WeightedIntegral from_quadrature(const quad::QuadratureResult& q, double factor, double exponent) {
  WeightedIntegral w;
  if (q.divergent()) {
    w.divergent = true;
    return w;
  }
  w.integral = factor * q.value;
  w.error_estimate = factor * (q.error_estimate + q.tail_bound);
  w.norm = std::pow(w.integral, 1.0 / exponent);
  return w;
}

}  // namespace

WeightedIntegral lambda_inv_Lq_norm(const RadialCoefficient& coef, double q, int n, double R, double tol) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw DomainError("lambda_inv_Lq_norm: q must be finite and >= 1");
  check_ball(coef, n, R);
  if (coef.is_uniform()) {
    const double volume = ball_volume(n, R);
    return {false, std::pow(coef.scale, -q) * volume, std::pow(volume, 1.0 / q) / coef.scale, 0.0};
  }
  const double a = n - 1 - coef.beta * q;
  const double b = -coef.theta * q;
  const auto result = quad::integrate_radial_power_log(a, b, 0.0, R, tol);
  return from_quadrature(result, sphere_area(n) * std::pow(coef.scale, -q), q);
}

WeightedIntegral mu_Lp_norm(const RadialCoefficient& coef, const Number& p, int n, double R, double tol) {
  check_ball(coef, n, R);
  if (p.is_infinite()) {
    WeightedIntegral w;
    // Candidates for the sup of r^beta L^theta on (0, R]: the endpoint R and
    // the interior critical point exp(-theta/beta).
    if (coef.beta == 0.0 && coef.theta > 0.0) {
      w.divergent = true;
      return w;
    }
    double sup = eval_a1(coef, R);
    if (coef.beta > 0.0 && coef.theta > 0.0) {
      const double r_star = std::exp(-coef.theta / coef.beta);
      if (r_star < R) sup = std::max(sup, eval_a1(coef, r_star));
    }
    w.integral = sup;
    w.norm = sup;
    return w;
  }
  const double pv = p.value();
  if (!(pv >= 1.0)) throw DomainError("mu_Lp_norm: p must be >= 1");
  if (coef.is_uniform()) {
    const double volume = ball_volume(n, R);
    return {false, std::pow(coef.scale, pv) * volume, coef.scale * std::pow(volume, 1.0 / pv), 0.0};
  }
  const auto result = quad::integrate_radial_power_log(n - 1 + coef.beta * pv, coef.theta * pv, 0.0, R, tol);
  return from_quadrature(result, sphere_area(n) * std::pow(coef.scale, pv), pv);
}

EllipticityReport compute_Lambda(const RadialCoefficient& lambda, const RadialCoefficient& mu,
                                 const ProblemParams& params, double R, double tol) {
  params.validate();
  EllipticityReport report;
  report.ball_radius = R;
  const double q = params.q.value();
  report.lambda_inv_Lq = lambda_inv_Lq_norm(lambda, q, params.n, R, tol);
  report.mu_Lp = mu_Lp_norm(mu, params.p, params.n, R, tol);
  if (report.lambda_inv_Lq.divergent || report.mu_Lp.divergent) return report;
  const double volume = ball_volume(params.n, R);
  report.mean_lambda_term = std::pow(report.lambda_inv_Lq.integral / volume, 1.0 / q);
  report.mean_mu_term = params.p.is_infinite()
                            ? report.mu_Lp.norm
                            : std::pow(report.mu_Lp.integral / volume, 1.0 / params.p.value());
  report.Lambda_BR = report.mean_lambda_term * report.mean_mu_term + report.mean_lambda_term * report.mean_lambda_term;
  report.lambda_defined = true;
  return report;
}

}  // namespace degenlab
