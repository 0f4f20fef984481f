#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "degenlab/errors.hpp"
#include "degenlab/fit.hpp"
#include "degenlab/geometry.hpp"
#include "degenlab/quadrature.hpp"

using namespace degenlab;
namespace bq = boost::math::quadrature;

namespace {

// int_{lo}^{hi} r^a L^b dr by tanh-sinh in t = -log r.
double oracle_power_log(double a, double b, double lo, double hi) {
  bq::tanh_sinh<double> ts;
  auto g = [&](double t) { return std::exp(-(a + 1.0) * t) * std::pow(t, b); };
  return ts.integrate(g, -std::log(hi), -std::log(lo));
}

}  // namespace

TEST(Geometry, SphereAreaAndBallVolume) {
  EXPECT_NEAR(sphere_area(2), 2 * M_PI, 1e-14);
  EXPECT_NEAR(sphere_area(3), 4 * M_PI, 1e-13);
  EXPECT_NEAR(ball_volume(3, 0.5), 4.0 / 3.0 * M_PI / 8.0, 1e-14);
  EXPECT_NEAR(ball_volume(4, 1.0), M_PI * M_PI / 2.0, 1e-13);
}

TEST(Quadrature, AdaptiveMatchesGaussKronrodOracle) {
  auto g = [](double x) { return std::exp(-x) * std::cos(5 * x) / (1 + x * x); };
  const double oracle = bq::gauss_kronrod<double, 61>::integrate(g, 0.0, 3.0, 15, 1e-14);
  const quad::QuadratureResult r = quad::integrate_adaptive(g, 0.0, 3.0, {1e-12, 0.0, 4000});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, oracle, 1e-12 * std::abs(oracle));
  EXPECT_LE(r.error_estimate, 1e-12 * std::abs(r.value));
}

TEST(Quadrature, BreakpointsHandleJumps) {
  auto g = [](double x) { return x < 0.3 ? 1.0 : 2.0; };
  const std::vector<double> bp = {0.3};
  const quad::QuadratureResult r = quad::integrate_adaptive(g, 0.0, 1.0, {1e-12, 0.0, 4000}, bp);
  EXPECT_NEAR(r.value, 0.3 + 1.4, 1e-13);
}

TEST(Quadrature, InfiniteRangeMatchesExpSinh) {
  auto g = [](double t) { return std::pow(t, -2.5); };
  bq::exp_sinh<double> es;
  const double oracle = es.integrate(g, 1.0, INFINITY);
  const quad::QuadratureResult r =
      quad::integrate_to_infinity(g, 1.0, [](double T) { return std::pow(T, -1.5) / 1.5; }, {1e-11, 0.0, 4000});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, oracle, 1e-10 * oracle);
}

TEST(Quadrature, LogSingularityAnalyticValue) {
  const quad::QuadratureResult r = quad::integrate_radial_power_log(-1.0, -2.0, 0.0, 0.5, 1e-10);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0 / std::log(2.0), 1e-10 / std::log(2.0));
}

TEST(Quadrature, ConstantIntegrand) {
  const quad::QuadratureResult r = quad::integrate_radial_power_log(0.0, 0.0, 0.0, 0.5, 1e-10);
  EXPECT_NEAR(r.value, 0.5, 1e-12);
}

TEST(Quadrature, BorderlineLogLogDiverges) {
  EXPECT_FALSE(quad::power_log_converges_at_origin(-1.0, -1.0));
  EXPECT_TRUE(quad::power_log_converges_at_origin(-1.0, -1.0001));
  EXPECT_FALSE(quad::power_log_converges_at_origin(-1.0001, -5.0));
  EXPECT_TRUE(quad::power_log_converges_at_origin(-0.9999, 50.0));
  const quad::QuadratureResult r = quad::integrate_radial_power_log(-1.0, -1.0, 0.0, 0.5, 1e-10);
  EXPECT_TRUE(r.divergent());
  // Partial sums of the oracle keep growing like log log(1/eps).
  double previous = 0.0;
  for (double eps : {1e-4, 1e-16, 1e-64, 1e-256}) {
    const double partial = oracle_power_log(-1.0, -1.0, eps, 0.5);
    EXPECT_GT(partial, previous + 0.5);
    previous = partial;
  }
}

TEST(Quadrature, PowerLogSweepAgainstTanhSinh) {
  const double as[] = {-1.0, -0.5, 0.0, 1.5, 2.0};
  const double bs[] = {-3.0, -1.5, 0.0, 0.7, 2.0};
  for (double a : as) {
    for (double b : bs) {
      for (double lo : {1e-9, 1e-3, 0.01}) {
        SCOPED_TRACE(std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(lo));
        const double oracle = oracle_power_log(a, b, lo, 0.4);
        const quad::QuadratureResult r = quad::integrate_radial_power_log(a, b, lo, 0.4, 1e-10);
        EXPECT_TRUE(r.converged);
        EXPECT_NEAR(r.value, oracle, 1e-9 * std::abs(oracle));
      }
    }
  }
}

TEST(Quadrature, RadialIntegrandWithTail) {
  // int_0^{1/4} r^{-1/2} dr = 2 sqrt(1/4) = 1; tail of e^{-t/2} is 2 e^{-T/2}.
  auto g = [](double r) { return 1.0 / std::sqrt(r); };
  const quad::QuadratureResult r =
      quad::integrate_radial(g, 0.0, 0.25, 1e-11, [](double T) { return 2.0 * std::exp(-T / 2.0); });
  EXPECT_NEAR(r.value, 1.0, 1e-10);
}

TEST(Quadrature, RejectsBadRanges) {
  EXPECT_THROW(quad::integrate_radial_power_log(0.0, 0.0, 0.0, 0.7, 1e-10), DomainError);
  EXPECT_THROW(quad::integrate_radial_power_log(0.0, 0.0, 0.3, 0.2, 1e-10), DomainError);
}

TEST(NormLadder, ConstantSourceHasClosedForm) {
  const std::vector<double> cutoffs = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const quad::NormLadderTable t =
      quad::nested_norm_integral([](double) { return 1.0; }, 2.0, 3, 0.25, cutoffs);
  const double exact = sphere_area(3) * std::pow(0.25, 3) / 3.0;
  EXPECT_NEAR(t.rows.back().partial, exact, 1e-9 * exact);
  EXPECT_LT(t.rows.back().relative_increment, 1e-9);
  EXPECT_EQ(t.empirical, quad::Verdict::kConvergent);
}

TEST(NormLadder, GrowingIncrementsAreDivergent) {
  // |f|^s r^2 = r^{-1.2}: increments grow by a constant factor per cutoff.
  std::vector<double> cutoffs;
  for (int k = 2; k <= 16; ++k) cutoffs.push_back(std::pow(10.0, -0.5 * k));
  const quad::NormLadderTable t =
      quad::nested_norm_integral([](double r) { return std::pow(r, -1.6); }, 2.0, 3, 0.25, cutoffs);
  EXPECT_EQ(t.empirical, quad::Verdict::kDivergent);
  EXPECT_EQ(t.verdict, quad::Verdict::kDivergent);
}

TEST(NormLadder, StructuralHintDecidesVerdict) {
  std::vector<double> cutoffs = {1e-1, 1e-2, 1e-3};
  const quad::AsymptoticExponents hint{-1.0, -1.0};
  const quad::NormLadderTable t = quad::nested_norm_integral(
      [](double r) { return std::pow(r, -1.0) / std::log(1.0 / r); }, 1.0, 2, 0.25, cutoffs, {}, &hint);
  EXPECT_TRUE(t.has_structural);
  EXPECT_EQ(t.structural, quad::Verdict::kDivergent);
  EXPECT_EQ(t.verdict, quad::Verdict::kDivergent);
}

TEST(NormLadder, RejectsUnorderedCutoffs) {
  const std::vector<double> cutoffs = {1e-3, 1e-2};
  EXPECT_THROW(quad::nested_norm_integral([](double) { return 1.0; }, 2.0, 3, 0.25, cutoffs), DomainError);
}

TEST(Fit, LeastSquaresRecoversLine) {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 - 0.5 * v);
  const LinearFit f = least_squares(x, y);
  EXPECT_NEAR(f.intercept, 2.0, 1e-14);
  EXPECT_NEAR(f.slope, -0.5, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
  const std::vector<double> one = {1.0};
  EXPECT_THROW(least_squares(one, one), InsufficientData);
}
