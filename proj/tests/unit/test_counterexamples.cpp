#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "degenlab/counterexamples.hpp"
#include "degenlab/errors.hpp"
#include "degenlab/geometry.hpp"

using namespace degenlab;
namespace bq = boost::math::quadrature;

namespace {

ExampleSpec ex(ExampleId id, int n, double q) { return ExampleSpec::make(id, n, q); }

double u_oracle(int n, double r) {
  bq::tanh_sinh<double> ts;
  auto g = [r](double rho) { return 1.0 / ((r + rho) * std::log(1.0 / rho)); };
  return sphere_area(n) * (ts.integrate(g, 0.0, r) + ts.integrate(g, r, 0.5));
}

std::vector<double> decades(int last, int per = 2) {
  std::vector<double> out;
  for (int j = per; j <= last * per; ++j) out.push_back(std::pow(10.0, -static_cast<double>(j) / per));
  return out;
}

}  // namespace

TEST(ExampleSpec, DerivedParameters) {
  const ExampleSpec e1 = ex(ExampleId::kEx1, 3, 2.0);
  EXPECT_DOUBLE_EQ(e1.beta, 1.5);
  EXPECT_NEAR(e1.theta, 0.5 + 0.5 - 1.0 / 3.0, 1e-15);
  const ExampleSpec e2 = ex(ExampleId::kEx2, 4, 2.0);
  EXPECT_DOUBLE_EQ(e2.beta, 2.0);
  EXPECT_DOUBLE_EQ(e2.theta, 5.0 / 8.0);
  const ExampleSpec e3 = ex(ExampleId::kEx3, 4, 1.7);
  EXPECT_NEAR(e3.beta, 4 / 1.7, 1e-15);
  EXPECT_NEAR(e3.theta, 2 / 1.7, 1e-15);
  EXPECT_FALSE(e3.extrapolated);
  const ExampleSpec b = ex(ExampleId::kBorderline, 4, 1.5);
  EXPECT_NEAR(b.beta, 4 / 1.5, 1e-15);
}

TEST(ExampleSpec, RejectsParametersOutsideTheExample) {
  EXPECT_THROW(ex(ExampleId::kEx1, 3, 1.5), DomainError);
  EXPECT_THROW(ex(ExampleId::kEx2, 3, 2.0), DomainError);
  EXPECT_THROW(ex(ExampleId::kEx3, 3, 1.0), DomainError);
  EXPECT_THROW(ex(ExampleId::kEx3, 2, 0.8), DomainError);
  EXPECT_THROW(ex(ExampleId::kBorderline, 4, 2.0), DomainError);
  EXPECT_THROW(ExampleSpec::make(ExampleId::kEx1, 3, 2.0, 0.7), DomainError);
  EXPECT_THROW(ExampleSpec::make(ExampleId::kEx3, 4, 1.7, 0.5), DomainError);
  const ExampleSpec e = ExampleSpec::make(ExampleId::kEx3, 4, 1.7, 1.0);
  EXPECT_TRUE(e.extrapolated);
  EXPECT_DOUBLE_EQ(e.theta, 1.0);
}

TEST(ExampleSpec, ParsesIds) {
  EXPECT_EQ(*parse_example_id("EX2"), ExampleId::kEx2);
  EXPECT_EQ(*parse_example_id("BORDERLINE"), ExampleId::kBorderline);
  EXPECT_FALSE(parse_example_id("EX4").has_value());
  EXPECT_EQ(to_string(ExampleId::kEx3), "EX3");
}

TEST(Solution, MatchesTanhSinhOracle) {
  const ExampleSpec e = ex(ExampleId::kEx1, 3, 2.0);
  for (double r : {0.5, 0.25, 0.01, 1e-5}) {
    const double oracle = u_oracle(3, r);
    EXPECT_NEAR(eval_u(e, r, 1e-11).value, oracle, 1e-9 * oracle);
  }
}

TEST(Solution, DecreasingInRadius) {
  const ExampleSpec e = ex(ExampleId::kEx1, 3, 2.0);
  EXPECT_GT(eval_u(e, 0.125, 1e-10).value, eval_u(e, 0.25, 1e-10).value);
  EXPECT_TRUE(eval_u(e, 0.0, 1e-10).divergent());
  EXPECT_THROW(eval_u(e, 0.6, 1e-10), DomainError);
}

TEST(Solution, GrowsLikeLogLog) {
  const ExampleSpec e = ex(ExampleId::kEx1, 3, 2.0);
  const double u3 = eval_u(e, 1e-3, 1e-12).value;
  const double u6 = eval_u(e, 1e-6, 1e-12).value;
  const double u9 = eval_u(e, 1e-9, 1e-12).value;
  auto ll = [](double r) { return std::log(std::log(1.0 / r)); };
  const double alpha = sphere_area(3);
  EXPECT_NEAR((u6 - u3) / (alpha * (ll(1e-6) - ll(1e-3))), 1.0, 0.1);
  EXPECT_NEAR((u9 - u6) / (alpha * (ll(1e-9) - ll(1e-6))), 1.0, 0.1);
}

TEST(Solution, ReproducibleAcrossBudgets) {
  const ExampleSpec e = ex(ExampleId::kEx2, 4, 2.0);
  const double a = eval_u(e, 0.5, 1e-10).value;
  const double b = eval_u(e, 0.5, 1e-13).value;
  EXPECT_NEAR(a, b, 1e-10 * b);
}

TEST(Derivative, MatchesCenteredDifference) {
  const ExampleSpec e = ex(ExampleId::kEx1, 3, 2.0);
  for (double r : {0.2, 0.02, 0.002}) {
    const double h = 1e-4 * r;
    const double fd = (eval_u(e, r + h, 1e-13).value - eval_u(e, r - h, 1e-13).value) / (2 * h);
    EXPECT_NEAR(eval_du(e, r, 1e-12).value, fd, 1e-6 * std::abs(fd));
  }
}

TEST(Residual, ManufacturedPoissonPair) {
  RadialTriple t;
  t.n = 3;
  t.a1 = [](double) { return 1.0; };
  t.du = [](double r) { return -r / 3.0; };
  t.f = [](double) { return 1.0; };
  const WeakResidualReport r = radial_residual(t, 1e-2, 0.25, 64);
  EXPECT_LT(r.residual_sup, 1e-8);
  EXPECT_TRUE(r.within_budget);
}

TEST(Residual, DerivedSourceSolvesTheEquation) {
  const WeakResidualReport r1 = residual_check(ex(ExampleId::kEx1, 3, 2.0), 1e-2, 0.25, 64, 1e-10,
                                               SourceForm::kDerived);
  EXPECT_LT(r1.residual_sup, 1e-4);
  EXPECT_FALSE(r1.transcription_discrepancy);
  const WeakResidualReport r2 = residual_check(ex(ExampleId::kEx2, 3, 1.5), 1e-3, 0.25, 64, 1e-10,
                                               SourceForm::kDerived);
  EXPECT_LT(r2.residual_sup, 1e-4);
}

TEST(Residual, VerbatimSourceIsFlagged) {
  // The verbatim three-term source differs from the flux derivative of u in its
  // leading coefficient; the check reports the mismatch instead of passing.
  const WeakResidualReport r =
      residual_check(ex(ExampleId::kEx1, 3, 2.0), 1e-2, 0.25, 64, 1e-10, SourceForm::kVerbatim);
  EXPECT_GT(r.residual_sup, 1e-2);
  EXPECT_FALSE(r.within_budget);
  EXPECT_TRUE(r.transcription_discrepancy);
}

TEST(Residual, RejectsBadWindows) {
  const ExampleSpec e = ex(ExampleId::kEx1, 3, 2.0);
  EXPECT_THROW(residual_check(e, 0.2, 0.1, 64, 1e-10), DomainError);
  EXPECT_THROW(residual_check(e, 0.01, 0.25, 4, 1e-10), DomainError);
}

TEST(Blowup, ProfilesIncreaseAndFitLogLog) {
  const ExampleSpec specs[] = {ex(ExampleId::kEx1, 3, 2.0), ex(ExampleId::kEx2, 3, 1.5), ex(ExampleId::kEx3, 4, 1.7)};
  for (const ExampleSpec& e : specs) {
    SCOPED_TRACE(std::string(to_string(e.id)));
    const DivergenceProfile p = blowup_profile(e, 30, 1e-11);
    EXPECT_TRUE(p.strictly_increasing);
    EXPECT_GE(p.fit_quality, 0.95);
    EXPECT_GT(p.slope, 0.0);
    EXPECT_EQ(p.fit_k_lo, 10);
    EXPECT_EQ(p.fit_k_hi, 30);
    EXPECT_EQ(p.ks.front(), 2);
  }
}

TEST(SourceProfile, BoundedSourcesStabilize) {
  EXPECT_TRUE(source_profile(ex(ExampleId::kEx2, 3, 1.5), 40).stabilized);
  EXPECT_TRUE(source_profile(ex(ExampleId::kEx3, 4, 1.7), 40).stabilized);
  const SourceProfile p1 = source_profile(ex(ExampleId::kEx1, 3, 2.0), 40);
  EXPECT_FALSE(p1.stabilized);
  EXPECT_GT(p1.sup_fine, p1.sup_coarse);
}

TEST(SourceProfile, BoundedSourceIsFiniteOnSweep) {
  const ExampleSpec e = ex(ExampleId::kEx2, 3, 1.5);
  double sup = 0.0;
  for (int k = 2; k <= 40; ++k) sup = std::max(sup, std::abs(eval_f(e, std::ldexp(1.0, -k), 1e-10).value));
  EXPECT_TRUE(std::isfinite(sup));
  EXPECT_LT(sup, 1e3);
}

TEST(Membership, CriticalExponentSplit) {
  const ExampleSpec e = ex(ExampleId::kEx1, 3, 2.0);
  const std::vector<double> cutoffs = decades(8);
  const quad::NormLadderTable at_s0 = membership(e, 6.0, cutoffs);
  EXPECT_EQ(at_s0.verdict, quad::Verdict::kConvergent);
  EXPECT_LT(at_s0.rows.back().relative_increment, 0.01);
  const quad::NormLadderTable above = membership(e, 7.2, cutoffs);
  EXPECT_EQ(above.verdict, quad::Verdict::kDivergent);
  EXPECT_EQ(above.empirical, quad::Verdict::kDivergent);
}

TEST(Membership, AsymptoticExponents) {
  const ExampleSpec e = ex(ExampleId::kEx1, 3, 2.0);
  const quad::AsymptoticExponents a = source_asymptotics(e, 6.0, SourceForm::kVerbatim);
  EXPECT_NEAR(a.a, -1.0, 1e-14);
  EXPECT_NEAR(a.b, 6.0 * (2.0 / 3.0 - 1.0), 1e-14);
}
