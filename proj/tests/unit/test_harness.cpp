#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "degenlab/counterexamples.hpp"
#include "degenlab/errors.hpp"
#include "degenlab/geometry.hpp"
#include "degenlab/harness.hpp"

using namespace degenlab;

namespace {

ProblemParams params(int n, const char* p, const char* q, const char* s, const char* gamma = "2") {
  ProblemParams out;
  out.n = n;
  out.p = Number::parse(p);
  out.q = Number::parse(q);
  out.s = Number::parse(s);
  out.gamma = Number::parse(gamma);
  return out;
}

RadialCoefficient coef(double beta, double theta, double radius) {
  RadialCoefficient c;
  c.beta = beta;
  c.theta = theta;
  c.domain_radius = radius;
  return c;
}

DiscreteSolution solve_const(const RadialCoefficient& c, int n, double R, double f, int cells, double r_min = 1e-6) {
  RadialProblem p;
  p.a1 = c.is_uniform() ? RadialField([](double) { return 1.0; }) : RadialField([c](double r) { return eval_a1(c, r); });
  p.f = [f](double) { return f; };
  p.n = n;
  p.R = R;
  SolverConfig cfg;
  cfg.cells = cells;
  cfg.r_min = r_min;
  return solve_radial(p, cfg);
}

Field constant(int n, double c) { return Field::radial_function(n, [c](double) { return c; }); }

Field example_u(const ExampleSpec& e) {
  return Field::radial_function(e.n, [e](double r) { return eval_u(e, r, 1e-10).value; }, true);
}

}  // namespace

TEST(LebesgueNorm, ConstantOnBall) {
  const Field u = constant(3, 2.0);
  for (double t : {1.0, 2.0, 6.5}) {
    const NormValue v = lebesgue_norm(u, Number::from_double(t), 0.5);
    EXPECT_NEAR(v.value, 2.0 * std::pow(ball_volume(3, 0.5), 1.0 / t), 1e-9);
  }
  EXPECT_NEAR(lebesgue_norm(u, Number::infinity(), 0.5).value, 2.0, 1e-15);
}

TEST(LebesgueNorm, PowerFunctionClosedForm) {
  // ||r^{-1/2}||_{L^2(B_R)}^2 in R^3 = alpha_3 R^2 / 2.
  const Field u = Field::radial_function(3, [](double r) { return 1.0 / std::sqrt(r); }, true)
                      .with_origin_behavior(-1.0, 0.0);
  const NormValue v = lebesgue_norm(u, Number::integer(2), 0.25);
  ASSERT_FALSE(v.divergent);
  EXPECT_NEAR(v.value * v.value, sphere_area(3) * 0.0625 / 2.0, 1e-8);
  // |u|^t r^2 = r^{2 - t/2}: t = 6 is the first divergent exponent.
  EXPECT_TRUE(lebesgue_norm(u.with_origin_behavior(-3.0, 0.0), Number::integer(6), 0.25).divergent);
}

TEST(LebesgueNorm, MeshAndPlanarFields) {
  const DiscreteSolution s = solve_const(coef(0, 0, 1), 3, 1.0, 1.0, 1024);
  const Field u = Field::radial_mesh(s);
  // int_{B_1} ((1 - r^2)/6)^2 = alpha_3/36 * int (1 - r^2)^2 r^2 dr = alpha_3/36 * 8/105.
  const double exact = std::sqrt(sphere_area(3) / 36.0 * 8.0 / 105.0);
  EXPECT_NEAR(lebesgue_norm(u, Number::integer(2), 1.0).value, exact, 1e-5);
  const Field p = Field::planar_function([](double, double) { return 3.0; });
  EXPECT_NEAR(lebesgue_norm(p, Number::integer(2), 0.5, {0.1, 0.2}).value, 3.0 * std::sqrt(M_PI * 0.25), 1e-7);
}

TEST(SupBound, UniformCaseIsStableUnderRefinement) {
  const ProblemParams p = params(3, "inf", "2", "inf");
  const RadialCoefficient c = coef(0, 0, 1.0);
  const Field f = constant(3, 1.0);
  std::vector<double> cs;
  for (int N : {256, 512, 1024}) {
    const Field u = Field::radial_mesh(solve_const(c, 3, 1.0, 1.0, N));
    const Field uf = Field::radial_mesh(solve_const(c, 3, 1.0, 1.0, 2 * N));
    const BoundCheckReport r = sup_bound_check(u, f, p, c, 0.5, 1.0, {0.0, 0.0}, &uf);
    EXPECT_TRUE(std::isfinite(r.fitted_C));
    EXPECT_GT(r.fitted_C, 0.0);
    EXPECT_NEAR(r.lambda, 2.0, 1e-12);
    ASSERT_TRUE(r.lhs_refinement_delta.has_value());
    cs.push_back(r.fitted_C);
  }
  const auto [mn, mx] = std::minmax_element(cs.begin(), cs.end());
  EXPECT_LT(*mx / *mn, 1.2);
}

TEST(SupBound, ZeroDataGivesZero) {
  const BoundCheckReport r =
      sup_bound_check(constant(3, 0.0), constant(3, 0.0), params(3, "inf", "2", "inf"), coef(0, 0, 1.0), 0.5, 1.0);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.fitted_C, 0.0);
}

TEST(SupBound, CounterexampleCoefficientsAboveCriticalExponent) {
  const ExampleSpec e = ExampleSpec::make(ExampleId::kEx1, 3, 2.0);
  const RadialCoefficient c = e.coefficient();
  const Field u = Field::radial_mesh(solve_const(c, 3, 0.25, 1.0, 1024));
  const BoundCheckReport r = sup_bound_check(u, constant(3, 1.0), params(3, "inf", "2", "6.5"), c, 0.5, 0.25);
  EXPECT_FALSE(r.divergent);
  EXPECT_TRUE(std::isfinite(r.fitted_C));
  EXPECT_GT(r.fitted_C, 0.0);
}

TEST(SupBound, UnboundedSolutionIsDivergent) {
  const ExampleSpec e = ExampleSpec::make(ExampleId::kEx1, 3, 2.0);
  const BoundCheckReport r =
      sup_bound_check(example_u(e), constant(3, 1.0), params(3, "inf", "2", "6"), e.coefficient(), 0.5, 0.25);
  EXPECT_TRUE(r.divergent);
  EXPECT_FALSE(r.divergence_note.empty());
}

TEST(Harnack, ConstantsGiveOne) {
  const HarnackReport h = harnack_quotient(constant(3, 7.0), constant(3, 0.0), 3, Number::infinity(), 0.25);
  EXPECT_DOUBLE_EQ(h.quotient, 1.0);
  EXPECT_TRUE(h.nonnegative);
}

TEST(Harnack, ScalingInvariance) {
  const Field u = Field::radial_mesh(solve_const(coef(1.0, 0.5, 0.5), 3, 0.25, 1.0, 512));
  const Field f = constant(3, 1.0);
  const HarnackReport base = harnack_quotient(u, f, 3, Number::integer(8), 0.25);
  for (double c : {1e-3, 0.7, 42.0}) {
    const HarnackReport h = harnack_quotient(u.scaled(c), f.scaled(c), 3, Number::integer(8), 0.25);
    EXPECT_NEAR(h.quotient, base.quotient, 1e-12 * base.quotient);
  }
}

TEST(Harnack, SweepIsBoundedAndStable) {
  std::vector<double> coarse;
  std::vector<double> fine;
  for (double beta : {0.5, 1.0, 1.4}) {
    for (double theta : {0.0, 0.5, 1.0}) {
      const RadialCoefficient c = coef(beta, theta, 0.5);
      for (int N : {1024, 2048}) {
        const Field u = Field::radial_mesh(solve_const(c, 3, 0.25, 1.0, N, 1e-8));
        const double q = harnack_quotient(u, constant(3, 1.0), 3, Number::integer(8), 0.25).quotient;
        (N == 1024 ? coarse : fine).push_back(q);
      }
    }
  }
  const auto [mn, mx] = std::minmax_element(fine.begin(), fine.end());
  EXPECT_LT(*mx / *mn, 10.0);
  for (std::size_t i = 0; i < fine.size(); ++i) EXPECT_NEAR(coarse[i], fine[i], 1e-2 * fine[i]);
}

TEST(Harnack, NegativeSolutionIsReported) {
  const HarnackReport h = harnack_quotient(constant(3, -1.0), constant(3, 0.0), 3, Number::infinity(), 0.25);
  EXPECT_FALSE(h.nonnegative);
}

TEST(Holder, AffineFunctionHasExponentOne) {
  const Field u = Field::planar_function([](double x, double y) { return 2.0 * x - y; });
  const HolderReport h = holder_exponent(u, {0.1, -0.2}, 0.25, 8);
  EXPECT_NEAR(h.fitted_alpha, 1.0, 0.02);
}

TEST(Holder, SmoothSolveAtInteriorCenter) {
  const Field u = Field::radial_mesh(solve_const(coef(0, 0, 1.0), 3, 1.0, 1.0, 1024));
  const HolderReport h = holder_exponent(u, {0.3, 0.2}, 0.125, 6);
  EXPECT_GE(h.fitted_alpha, 0.9);
}

TEST(Holder, CounterexampleIsIrregularAtOrigin) {
  const HolderReport h = holder_exponent(example_u(ExampleSpec::make(ExampleId::kEx1, 3, 2.0)), {0, 0}, 0.125, 6);
  EXPECT_LE(h.fitted_alpha, 0.0);
  EXPECT_TRUE(h.irregular_at_center);
  EXPECT_NE(std::find(h.flags.begin(), h.flags.end(), "IRREGULAR_AT_CENTER"), h.flags.end());
}

TEST(Holder, TooFewLevels) {
  const Field u = Field::planar_function([](double x, double) { return x; });
  EXPECT_THROW(holder_exponent(u, {0, 0}, 0.25, 1), InsufficientData);
}

TEST(Moser, ConstantChainHasClosedForm) {
  const ExponentTable t = derive_exponents(params(3, "4", "2", "8"));
  const MoserChainReport m = moser_norm_chain(constant(3, 3.0), 2.0, t, 6);
  for (std::size_t i = 0; i < m.chain_norms.size(); ++i)
    EXPECT_NEAR(m.chain_norms[i], 3.0 * std::pow(ball_volume(3, m.radii[i]), 1.0 / m.exponents[i]), 1e-8);
  EXPECT_NEAR(m.mean_norms.back(), 3.0, 1e-8);
  EXPECT_NEAR(m.sampled_sup, 3.0, 1e-15);
}

TEST(Moser, SmoothSolveApproachesSup) {
  const ExponentTable t = derive_exponents(params(3, "4", "2", "8"));
  const Field u = Field::radial_mesh(solve_const(coef(0, 0, 1.0), 3, 1.0, 1.0, 1024));
  const MoserChainReport m = moser_norm_chain(u, 2.0, t, 10);
  EXPECT_LT(m.relative_gap, 0.05);
  EXPECT_TRUE(m.stabilizing);
}

TEST(Moser, CounterexampleDoesNotStabilize) {
  const ExponentTable t = derive_exponents(params(3, "4", "2", "8"));
  const MoserChainReport m = moser_norm_chain(example_u(ExampleSpec::make(ExampleId::kEx1, 3, 2.0)), 2.0, t, 10);
  EXPECT_TRUE(m.sup_divergent);
  EXPECT_FALSE(m.stabilizing);
  for (std::size_t i = 1; i < m.mean_norms.size(); ++i) EXPECT_GT(m.mean_norms[i], m.mean_norms[i - 1]);
}

TEST(Moser, RejectsLongChains) {
  const ExponentTable t = derive_exponents(params(3, "4", "2", "8"));
  EXPECT_THROW(moser_norm_chain(constant(3, 1.0), 2.0, t, 13), DomainError);
}

TEST(LogBound, SingleMemberIsInsufficient) {
  PlateauFamily fam;
  fam.members = {8};
  fam.coefficient = coef(0, 0, 0.25);
  SolverConfig cfg;
  cfg.cells = 256;
  const LogBoundReport r = log_bound_check(fam, cfg);
  EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "INSUFFICIENT_FAMILY"), r.flags.end());
}

TEST(LogBound, PlateauNormalization) {
  PlateauFamily fam;
  fam.members = {8, 64};
  fam.coefficient = coef(0, 0, 0.25);
  SolverConfig cfg;
  cfg.cells = 512;
  cfg.r_min = 1e-8;
  const LogBoundReport r = log_bound_check(fam, cfg);
  for (double v : r.s0_norms) EXPECT_NEAR(v, 1.0, 1e-6);
  EXPECT_GT(r.s_norms[1], r.s_norms[0]);
}

TEST(LogBound, AtMostLogarithmicGrowth) {
  // Uniform coefficient with (s0, s) = (3/2, 2), counterexample coefficients with (6, 8).
  // The uniform family decays too slowly for a clean linear fit; only the band is checked.
  for (const RadialCoefficient& c : {coef(0, 0, 0.25), coef(1.5, 2.0 / 3.0, 0.5)}) {
    PlateauFamily fam;
    fam.s0 = c.is_uniform() ? 1.5 : 6.0;
    fam.s = c.is_uniform() ? 2.0 : 8.0;
    fam.members = {8, 16, 32, 64, 128, 256, 512, 1024};
    fam.coefficient = c;
    SolverConfig cfg;
    cfg.cells = 2048;
    cfg.r_min = 1e-10;
    const LogBoundReport r = log_bound_check(fam, cfg);
    EXPECT_LT(r.s0_spread, 0.02);
    EXPECT_LT(r.ratio_spread, 3.0);
    if (!c.is_uniform()) {
      EXPECT_GE(r.fit_quality, 0.9);
    }
  }
}

TEST(SourceShift, ConstantSource) {
  const NormValue k = source_shift(constant(3, 2.0), Number::integer(2));
  EXPECT_NEAR(k.value, 2.0 * std::sqrt(ball_volume(3, 1.0)), 1e-9);
}
