#pragma once

#include "degenlab/exponents.hpp"

namespace degenlab {

/// Scalar diagonal coefficient a_1(r) = scale * r^beta * (log 1/r)^theta,
/// valid on (0, domain_radius]. A degenerate coefficient needs domain_radius <= 1/2
/// so that log(1/r) > 0; the uniform one (beta = theta = 0) takes any radius.
struct RadialCoefficient {
  double beta = 0.0;
  double theta = 0.0;
  double domain_radius = 0.25;
  double scale = 1.0;

  void validate() const;
  bool is_uniform() const noexcept { return beta == 0.0 && theta == 0.0; }
};

/// a_1(r), evaluated as exp(beta log r + theta log log(1/r)).
/// Throws DomainError for r outside (0, domain_radius].
double eval_a1(const RadialCoefficient& coef, double r);

/// An integral of a power of the coefficient over B_R, or a divergence marker.
struct WeightedIntegral {
  bool divergent = false;
  double integral = 0.0;  ///< int_{B_R} w dx (the sup itself for an L^inf norm)
  double norm = 0.0;      ///< integral^{1/exponent}
  double error_estimate = 0.0;
};

/// int_{B_R} a_1^{-q} dx = alpha_n int_0^R r^{n-1-beta q} (log 1/r)^{-theta q} dr and its q-th root.
WeightedIntegral lambda_inv_Lq_norm(const RadialCoefficient& coef, double q, int n, double R, double tol = 1e-12);

/// int_{B_R} a_1^p dx and its p-th root; p = infinity gives the essential sup.
WeightedIntegral mu_Lp_norm(const RadialCoefficient& coef, const Number& p, int n, double R, double tol = 1e-12);

struct EllipticityReport {
  WeightedIntegral lambda_inv_Lq;  ///< ||lambda^{-1}||_{L^q(B_R)}
  WeightedIntegral mu_Lp;          ///< ||mu||_{L^p(B_R)}
  bool lambda_defined = false;
  double mean_lambda_term = 0.0;   ///< (mean of lambda^{-q})^{1/q}
  double mean_mu_term = 0.0;       ///< (mean of mu^p)^{1/p}
  double Lambda_BR = 0.0;
  double ball_radius = 0.0;
};

/// Lambda(B_R) = (mean lambda^{-q})^{1/q} (mean mu^p)^{1/p} + (mean lambda^{-q})^{2/q}.
EllipticityReport compute_Lambda(const RadialCoefficient& lambda, const RadialCoefficient& mu,
                                 const ProblemParams& params, double R, double tol = 1e-12);

}  // namespace degenlab
