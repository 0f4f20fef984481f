#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "degenlab/coefficients.hpp"
#include "degenlab/errors.hpp"
#include "degenlab/geometry.hpp"
#include "degenlab/kernel.hpp"

using namespace degenlab;
namespace bq = boost::math::quadrature;

namespace {

RadialCoefficient coef(double beta, double theta, double radius = 0.5) {
  RadialCoefficient c;
  c.beta = beta;
  c.theta = theta;
  c.domain_radius = radius;
  return c;
}

ProblemParams params(int n, const char* p, const char* q) {
  ProblemParams out;
  out.n = n;
  out.p = Number::parse(p);
  out.q = Number::parse(q);
  return out;
}

// K_m(x) by tanh-sinh on three panels split at x and sqrt(x).
double kernel_oracle(int m, double x) {
  bq::tanh_sinh<double> ts;
  auto g = [m, x](double rho) { return std::pow(x + rho, -m) / std::log(1.0 / rho); };
  const double a = std::min(x, 0.5);
  const double b = std::min(std::sqrt(x), 0.5);
  double total = ts.integrate(g, 0.0, a);
  if (b > a) total += ts.integrate(g, a, b);
  if (0.5 > b) total += ts.integrate(g, b, 0.5);
  return total;
}

}  // namespace

TEST(Coefficient, IdentityAndUnitLog) {
  EXPECT_DOUBLE_EQ(eval_a1(coef(0, 0), 0.1), 1.0);
  EXPECT_NEAR(eval_a1(coef(1.5, 2.0 / 3.0), std::exp(-1.0)), std::exp(-1.5), 1e-15);
}

TEST(Coefficient, HighPrecisionOracle) {
  using boost::multiprecision::cpp_bin_float_50;
  const cpp_bin_float_50 r("0.01");
  const cpp_bin_float_50 expect = pow(r, 2) * pow(log(1 / r), cpp_bin_float_50(5) / 6);
  const double got = eval_a1(coef(2.0, 5.0 / 6.0), 0.01);
  EXPECT_NEAR(got, expect.convert_to<double>(), 1e-14 * got);
}

TEST(Coefficient, RejectsBadInput) {
  EXPECT_THROW(eval_a1(coef(1, 1, 0.5), 0.0), DomainError);
  EXPECT_THROW(eval_a1(coef(1, 1, 0.5), 0.6), DomainError);
  EXPECT_THROW(coef(1, 1, 0.7).validate(), DomainError);
  RadialCoefficient uniform = coef(0, 0, 3.0);
  EXPECT_NO_THROW(uniform.validate());
}

TEST(Coefficient, InverseNormWithLogFactorIsFinite) {
  // beta = n/q, theta q > 1: alpha_n int_0^R r^{-1} L^{-theta q} dr = alpha_n (log 1/R)^{1-theta q}/(theta q - 1).
  const int n = 3;
  const double q = 2.0;
  const double theta = 0.9;
  const double R = 0.25;
  const WeightedIntegral w = lambda_inv_Lq_norm(coef(n / q, theta), q, n, R, 1e-12);
  ASSERT_FALSE(w.divergent);
  const double exact = sphere_area(n) * std::pow(std::log(1.0 / R), 1.0 - theta * q) / (theta * q - 1.0);
  EXPECT_NEAR(w.integral, exact, 1e-9 * exact);
  EXPECT_NEAR(w.norm, std::pow(exact, 1.0 / q), 1e-9);
}

TEST(Coefficient, UniformNormIsBallVolume) {
  for (int n : {2, 3, 5}) {
    const WeightedIntegral w = lambda_inv_Lq_norm(coef(0, 0), 2.5, n, 0.25, 1e-12);
    EXPECT_NEAR(w.integral, sphere_area(n) * std::pow(0.25, n) / n, 1e-13);
  }
}

TEST(Coefficient, BorderlineLogPowerDiverges) {
  const double q = 2.0;
  EXPECT_TRUE(lambda_inv_Lq_norm(coef(3 / q, 1 / q), q, 3, 0.25).divergent);
  EXPECT_TRUE(lambda_inv_Lq_norm(coef(2.0, 0.0), q, 3, 0.25).divergent);
}

TEST(Coefficient, LambdaOfUnitWeightsIsTwo) {
  const EllipticityReport r = compute_Lambda(coef(0, 0, 1.0), coef(0, 0, 1.0), params(3, "inf", "2"), 1.0);
  ASSERT_TRUE(r.lambda_defined);
  EXPECT_NEAR(r.Lambda_BR, 2.0, 1e-14);
}

TEST(Coefficient, LambdaForCounterexampleIsFiniteAndStable) {
  const RadialCoefficient c = coef(1.5, 2.0 / 3.0);
  const ProblemParams p = params(3, "inf", "2");
  for (double R : {0.25, 0.05}) {
    const EllipticityReport a = compute_Lambda(c, c, p, R, 1e-12);
    const EllipticityReport b = compute_Lambda(c, c, p, R, 1e-13);
    ASSERT_TRUE(a.lambda_defined);
    EXPECT_GT(a.Lambda_BR, 0.0);
    EXPECT_TRUE(std::isfinite(a.Lambda_BR));
    EXPECT_NEAR(a.Lambda_BR, b.Lambda_BR, 1e-8 * a.Lambda_BR);
  }
}

TEST(Coefficient, MuNormMatchesDirectIntegral) {
  // p = 4, beta = 1, theta = 0: alpha_n int_0^R r^{4+n-1} dr.
  const WeightedIntegral w = mu_Lp_norm(coef(1.0, 0.0), Number::integer(4), 3, 0.25, 1e-12);
  const double exact = sphere_area(3) * std::pow(0.25, 7) / 7.0;
  EXPECT_NEAR(w.integral, exact, 1e-10 * exact);
}

TEST(Kernel, MatchesTanhSinhOracle) {
  for (int m : {1, 2, 3}) {
    for (double x : {0.4, 0.1, 1e-2, 1e-4}) {
      SCOPED_TRACE(std::to_string(m) + " " + std::to_string(x));
      const double oracle = kernel_oracle(m, x);
      const quad::QuadratureResult r = kernel_direct(m, x, 1e-11);
      EXPECT_TRUE(r.converged);
      EXPECT_NEAR(r.value, oracle, 1e-9 * oracle);
    }
  }
}

TEST(Kernel, ReproducibleAcrossNodeBudgets) {
  const quad::QuadratureResult a = kernel_direct(1, 0.5, 1e-10);
  const quad::QuadratureResult b = kernel_direct(1, 0.5, 1e-13);
  EXPECT_GT(a.value, 0.0);
  EXPECT_NE(a.nodes_used, b.nodes_used);
  EXPECT_NEAR(a.value, b.value, 1e-10 * b.value);
}

TEST(Kernel, SplitBoundsHoldForSmallArgument) {
  KernelSpec spec;
  spec.m = 3;
  spec.x_norm = 1e-4;
  const KernelEvaluation e = eval_kernel(spec, 1e-10);
  ASSERT_TRUE(e.bounds.has_value());
  EXPECT_TRUE(e.split_consistent);
  EXPECT_TRUE(e.bounds->respected);
  EXPECT_LE(e.direct.value, e.bounds->inner_bound + e.bounds->outer_bound);
  EXPECT_LE(e.inner.value, e.bounds->inner_bound);
  EXPECT_LE(e.outer.value, e.bounds->outer_bound);
}

TEST(Kernel, OriginIsDivergent) {
  KernelSpec spec;
  spec.m = 1;
  spec.x_norm = 0.0;
  EXPECT_TRUE(eval_kernel(spec, 1e-10).direct.divergent());
}

TEST(Kernel, AsymptoticsOfHigherKernels) {
  // K_2 ~ 1/(x L), K_3 ~ 1/(2 x^2 L) with L = log(1/x).
  const double x = 1e-12;
  const double L = std::log(1.0 / x);
  EXPECT_NEAR(kernel_direct(2, x, 1e-11).value * x * L, 1.0, 0.1);
  EXPECT_NEAR(kernel_direct(3, x, 1e-11).value * 2 * x * x * L, 1.0, 0.1);
}

TEST(KernelCache, MatchesDirectEvaluation) {
  const auto cache = KernelCache::build();
  EXPECT_TRUE(cache->meets_budget());
  for (int m : {1, 2, 3}) {
    for (double x : {0.3, 0.05, 1e-3, 1e-7, 1e-15}) {
      const double direct = kernel_direct(m, x, 1e-12).value;
      EXPECT_NEAR(cache->value(m, x), direct, 2e-10 * direct);
    }
  }
}
