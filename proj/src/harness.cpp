#include "degenlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>

#include "degenlab/errors.hpp"
#include "degenlab/fit.hpp"
#include "degenlab/geometry.hpp"
#include "degenlab/parallel.hpp"

namespace degenlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool at_origin(const Point2& c) { return c[0] == 0.0 && c[1] == 0.0; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Field Field::radial_function(int n, RadialField u, bool singular_at_origin, std::vector<double> breakpoints) {
  if (n < 1) throw DomainError("field dimension must be >= 1");
  if (!u) throw DomainError("radial field needs a function");
  Field f;
  f.radial_ = true;
  f.n_ = n;
  f.singular_ = singular_at_origin;
  f.radial_fn_ = std::move(u);
  std::sort(breakpoints.begin(), breakpoints.end());
  f.breakpoints_ = std::move(breakpoints);
  return f;
}

Field Field::radial_mesh(const DiscreteSolution& solution) {
  if (!solution.is_radial()) throw DomainError("radial_mesh needs a radial solution");
  const RadialMesh& mesh = solution.radial();
  if (mesh.nodes.size() != solution.values.size() || mesh.nodes.size() < 2)
    throw DomainError("radial solution does not match its mesh");
  auto nodes = std::make_shared<std::vector<double>>(mesh.nodes);
  auto values = std::make_shared<std::vector<double>>(solution.values);
  Field f;
  f.radial_ = true;
  f.n_ = mesh.n;
  f.nodes_ = mesh.nodes;
  f.radial_fn_ = [nodes, values](double r) {
    const auto& x = *nodes;
    const auto& v = *values;
    if (r <= x.front()) return v.front();
    if (r > x.back() * (1.0 + 1e-14)) throw DomainError("radius " + fmt(r) + " lies outside the mesh");
    if (r >= x.back()) return v.back();
    const auto it = std::upper_bound(x.begin(), x.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double w = (r - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - w) * v[i] + w * v[i + 1];
  };
  return f;
}

Field Field::planar_function(PlanarField u) {
  if (!u) throw DomainError("planar field needs a function");
  Field f;
  f.radial_ = false;
  f.n_ = 2;
  f.planar_fn_ = std::move(u);
  return f;
}

Field Field::planar_grid(const DiscreteSolution& solution) {
  if (solution.is_radial()) throw DomainError("planar_grid needs a planar solution");
  const Grid2D g = solution.grid();
  auto values = std::make_shared<std::vector<double>>(solution.values);
  Field f;
  f.radial_ = false;
  f.n_ = 2;
  f.planar_fn_ = [g, values](double x, double y) {
    const double h = g.spacing();
    const double px = (x - g.x0) / h;
    const double py = (y - g.y0) / h;
    const double eps = 1e-9;
    if (px < -eps || py < -eps || px > g.cells + eps || py > g.cells + eps)
      throw DomainError("point (" + fmt(x) + ", " + fmt(y) + ") lies outside the grid");
    const int i = std::clamp(static_cast<int>(std::floor(px)), 0, g.cells - 1);
    const int j = std::clamp(static_cast<int>(std::floor(py)), 0, g.cells - 1);
    const double sx = std::clamp(px - i, 0.0, 1.0);
    const double sy = std::clamp(py - j, 0.0, 1.0);
    const auto& v = *values;
    return (1 - sx) * (1 - sy) * v[g.index(i, j)] + sx * (1 - sy) * v[g.index(i + 1, j)] +
           (1 - sx) * sy * v[g.index(i, j + 1)] + sx * sy * v[g.index(i + 1, j + 1)];
  };
  for (int j = 0; j <= g.cells; ++j) {
    for (int i = 0; i <= g.cells; ++i) {
      f.grid_points_.push_back({g.x(i), g.y(j)});
    }
  }
  return f;
}

double Field::at_radius(double r) const {
  if (!radial_) throw DomainError("at_radius needs a radial field");
  return scale_ * radial_fn_(r);
}

double Field::at(const Point2& x) const {
  if (radial_) return at_radius(std::hypot(x[0], x[1]));
  return scale_ * planar_fn_(x[0], x[1]);
}

Field Field::scaled(double c) const {
  Field f = *this;
  f.scale_ *= c;
  return f;
}

Field Field::with_origin_behavior(double a, double b) const {
  Field f = *this;
  f.origin_ = {a, b};
  return f;
}

namespace {

struct Samples {
  std::vector<double> values;
  bool divergent = false;
};

Samples collect(const Field& u, double radius, const Point2& center) {
  if (!(radius > 0.0)) throw DomainError("sampling radius must be positive");
  Samples out;
  std::vector<double> radii;
  if (u.is_radial() && at_origin(center)) {
    if (u.singular_at_origin()) out.divergent = true;
    const int linear = 2000;
    for (int k = 1; k <= linear; ++k) radii.push_back(radius * k / linear);
    for (int k = 1; k <= 160; ++k) radii.push_back(radius * std::exp2(-0.25 * k));
    for (double r : u.nodes())
      if (r <= radius) radii.push_back(r);
    for (double b : u.breakpoints()) {
      if (b < radius) {
        radii.push_back(b * (1.0 - 1e-12));
        radii.push_back(b * (1.0 + 1e-12));
      }
    }
    if (!u.nodes().empty()) radii.push_back(0.0);
    std::sort(radii.begin(), radii.end());
    out.values.resize(radii.size());
    parallel_for(radii.size(), [&](std::size_t i) { out.values[i] = u.at_radius(radii[i]); });
    return out;
  }
  std::vector<Point2> pts{center};
  const int rings = 48;
  const int angles = 96;
  for (int k = 1; k <= rings; ++k) {
    const double rho = radius * k / rings;
    for (int a = 0; a < angles; ++a) {
      const double phi = 2.0 * std::numbers::pi * a / angles;
      pts.push_back({center[0] + rho * std::cos(phi), center[1] + rho * std::sin(phi)});
    }
  }
  const double dist = std::hypot(center[0], center[1]);
  if (u.is_radial()) {
    if (dist <= radius) {
      if (u.singular_at_origin()) out.divergent = true;
      else pts.push_back({0.0, 0.0});
    } else {
      const double s = (dist - radius) / dist;
      pts.push_back({center[0] * s, center[1] * s});
    }
    const double s = (dist + radius) / std::max(dist, 1e-300);
    if (dist > 0.0) pts.push_back({center[0] * s, center[1] * s});
  }
  for (const Point2& p : u.grid_points())
    if (std::hypot(p[0] - center[0], p[1] - center[1]) <= radius * (1.0 + 1e-12)) pts.push_back(p);
  out.values.resize(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const Point2& p = pts[i];
    if (u.is_radial() && u.singular_at_origin() && p[0] == 0.0 && p[1] == 0.0) {
      out.values[i] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    out.values[i] = u.at(p);
  });
  std::erase_if(out.values, [](double v) { return std::isnan(v); });
  return out;
}

double finite_sup_abs(const Samples& s) {
  double m = 0.0;
  for (double v : s.values)
    if (std::isfinite(v)) m = std::max(m, std::abs(v));
  return m;
}

// Tail of int_T^inf h(t) dt for h(t) ~ C e^{-c t} t^d, matched to h at T.
double model_tail(double hT, double T, double c, double d) {
  if (c > 0.0) return 2.0 * std::abs(hT) / c;
  return 2.0 * std::abs(hT) * T / (-d - 1.0);
}

}  // namespace

BallSample sample_ball(const Field& u, double radius, const Point2& center) {
  const Samples s = collect(u, radius, center);
  BallSample out;
  out.divergent = s.divergent;
  out.max_value = -kInf;
  out.min_value = kInf;
  for (double v : s.values) {
    out.max_value = std::max(out.max_value, v);
    out.min_value = std::min(out.min_value, v);
    out.sup_abs = std::max(out.sup_abs, std::abs(v));
  }
  if (s.values.empty()) out.max_value = out.min_value = 0.0;
  if (out.divergent) {
    out.sup_abs = kInf;
    out.max_value = kInf;
  }
  return out;
}

NormValue lebesgue_norm(const Field& u, const Number& t, double R, const Point2& center, double tol) {
  if (!(R > 0.0)) throw DomainError("norm radius must be positive");
  if (t.is_infinite()) {
    const BallSample s = sample_ball(u, R, center);
    return {s.divergent, s.sup_abs};
  }
  const double p = t.value();
  if (!(p >= 1.0)) throw DomainError("norm exponent must be >= 1");
  const Samples samples = collect(u, R, center);
  const double U = finite_sup_abs(samples);
  if (U == 0.0 && !samples.divergent) return {false, 0.0};
  auto power = [&](double v) { return std::pow(std::abs(v) / U, p); };

  double integral = 0.0;
  if (u.is_radial() && at_origin(center)) {
    const int n = u.dimension();
    if (!u.nodes().empty()) {
      const auto& x = u.nodes();
      static constexpr double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                       0.8611363115940526};
      static constexpr double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                       0.3478548451374538};
      const double inner = std::min(R, x.front());
      integral = power(u.at_radius(0.0)) * std::pow(inner, n) / n;
      for (std::size_t i = 0; i + 1 < x.size() && x[i] < R; ++i) {
        const double lo = x[i];
        const double hi = std::min(R, x[i + 1]);
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        for (int k = 0; k < 4; ++k) {
          const double r = mid + half * gx[k];
          integral += half * gw[k] * power(u.at_radius(r)) * std::pow(r, n - 1);
        }
      }
    } else {
      const quad::AsymptoticExponents& ob = u.origin_behavior();
      const double c = p * ob.a + n;
      const double d = p * ob.b;
      if (!quad::power_log_converges_at_origin(c - 1.0, d)) return {true, kInf};
      auto g = [&](double r) { return power(u.at_radius(r)) * std::pow(r, n - 1); };
      auto tail = [&](double T) {
        const double r = std::exp(-T);
        return model_tail(g(r) * r, T, c, d);
      };
      const quad::QuadratureResult q = quad::integrate_radial(g, 0.0, R, tol, tail, u.breakpoints());
      integral = q.value;
    }
    integral *= sphere_area(n);
  } else {
    if (u.dimension() != 2 && !(u.is_radial() && at_origin(center)))
      throw DomainError("off-center norms need a planar field");
    const int angles = 128;
    auto ring = [&](double rho) {
      double s = 0.0;
      for (int a = 0; a < angles; ++a) {
        const double phi = 2.0 * std::numbers::pi * a / angles;
        s += power(u.at({center[0] + rho * std::cos(phi), center[1] + rho * std::sin(phi)}));
      }
      return s * 2.0 * std::numbers::pi / angles * rho;
    };
    quad::AdaptiveOptions opts;
    opts.rel_tol = tol;
    integral = quad::integrate_adaptive(ring, 0.0, R, opts).value;
  }
  return {false, U * std::pow(integral, 1.0 / p)};
}

BoundCheckReport sup_bound_check(const Field& u, const Field& f, const ProblemParams& params,
                                 const RadialCoefficient& coefficient, double theta, double R, const Point2& center,
                                 const Field* refined) {
  params.validate();
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("ball fraction theta must lie in (0, 1)");
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
  if (u.dimension() != params.n) throw DomainError("solution dimension differs from params.n");
  if (!at_origin(center) && !coefficient.is_uniform())
    throw DomainError("off-center balls need a translation-invariant (uniform) coefficient");
  const ExponentTable table = derive_exponents(params);
  if (!table.m_star.defined) throw DomainError("m* is undefined for these parameters");
  const int n = params.n;
  const double gamma = params.gamma.value();
  const double m_star = table.m_star.value();
  const double delta = table.delta.value();
  const double p_prime = table.p_prime.value();

  BoundCheckReport rep;
  const BallSample lhs = sample_ball(u, theta * R, center);
  rep.lhs = lhs.sup_abs;
  if (refined != nullptr) rep.lhs_refinement_delta = std::abs(sample_ball(*refined, theta * R, center).sup_abs - rep.lhs);
  const NormValue nu = lebesgue_norm(u, params.gamma, R, center);
  const NormValue nf = lebesgue_norm(f, params.s, R, center);
  rep.norm_u_gamma = nu.value;
  rep.norm_f_s = nf.value;

  const EllipticityReport lam = compute_Lambda(coefficient, coefficient, params, R);
  rep.lambda = lam.Lambda_BR;
  const double s_inv = params.s.reciprocal().value();
  const double base = (1.0 - theta) * R;
  rep.rhs_norm_term = std::pow(base, -(n / gamma) * (m_star + 1.0)) * rep.norm_u_gamma;
  rep.rhs_source_term = std::pow(base, -(n / gamma) * m_star - n * s_inv + 2.0) * rep.norm_f_s;

  if (lhs.divergent || nu.divergent || nf.divergent || !lam.lambda_defined) {
    rep.divergent = true;
    if (lhs.divergent) rep.divergence_note += "sup of u is infinite; ";
    if (nu.divergent) rep.divergence_note += "L^gamma norm of u diverges; ";
    if (nf.divergent) rep.divergence_note += "L^s norm of f diverges; ";
    if (!lam.lambda_defined) rep.divergence_note += "Lambda(B_R) diverges; ";
    rep.fitted_C = lhs.divergent && !nu.divergent && !nf.divergent && lam.lambda_defined ? kInf : 0.0;
    return rep;
  }
  rep.lambda_factor = std::pow(rep.lambda, delta * p_prime / (gamma * (delta - 1.0)));
  const double denom = rep.lambda_factor * (rep.rhs_norm_term + rep.rhs_source_term);
  rep.fitted_C = rep.lhs == 0.0 ? 0.0 : rep.lhs / denom;
  return rep;
}

HarnackReport harnack_quotient(const Field& u, const Field& f, int n, const Number& s, double R, const Point2& center,
                               double negative_tolerance) {
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
  if (u.dimension() != n) throw DomainError("solution dimension differs from n");
  HarnackReport rep;
  const BallSample whole = sample_ball(u, R, center);
  const BallSample half = sample_ball(u, 0.5 * R, center);
  rep.min_sample = whole.min_value;
  rep.nonnegative = whole.min_value >= -negative_tolerance * std::max(1.0, std::abs(whole.max_value));
  rep.sup_half = half.max_value;
  rep.inf_half = half.min_value;
  const NormValue nf = lebesgue_norm(f, s, R, center);
  rep.divergent = half.divergent || nf.divergent;
  rep.source_term = std::pow(R, 2.0 - n * s.reciprocal().value()) * nf.value;
  const double denom = rep.inf_half + rep.source_term;
  rep.quotient = rep.sup_half == 0.0 && denom == 0.0 ? std::numeric_limits<double>::quiet_NaN() : rep.sup_half / denom;
  return rep;
}

HolderReport holder_exponent(const Field& u, const Point2& center, double R, int levels) {
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
  if (levels < 0) throw DomainError("levels must be >= 0");
  HolderReport rep;
  const std::size_t count = static_cast<std::size_t>(levels) + 1;
  rep.scales.resize(count);
  std::vector<BallSample> balls(count);
  for (std::size_t j = 0; j < count; ++j) {
    rep.scales[j] = R * std::exp2(-static_cast<double>(j));
    balls[j] = sample_ball(u, rep.scales[j], center);
  }
  // Oscillations over nested balls include every finer sample set.
  rep.oscillations.resize(count);
  double hi = -kInf;
  double lo = kInf;
  bool divergent = false;
  for (std::size_t j = count; j-- > 0;) {
    hi = std::max(hi, balls[j].max_value);
    lo = std::min(lo, balls[j].min_value);
    divergent = divergent || balls[j].divergent;
    rep.oscillations[j] = divergent ? kInf : hi - lo;
  }
  if (balls.back().divergent) {
    rep.irregular_at_center = true;
    rep.flags.push_back("IRREGULAR_AT_CENTER");
    rep.fitted_alpha = 0.0;
    rep.fit_quality = 0.0;
    return rep;
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t j = 0; j < count; ++j) {
    if (std::isfinite(rep.oscillations[j]) && rep.oscillations[j] > 0.0) {
      xs.push_back(std::log(rep.scales[j]));
      ys.push_back(std::log(rep.oscillations[j]));
    }
  }
  rep.usable_levels = static_cast<int>(xs.size());
  if (xs.size() < 3) throw InsufficientData("holder_exponent needs at least 3 levels with positive oscillation");
  const LinearFit fit = least_squares(xs, ys);
  rep.fitted_alpha = fit.slope;
  rep.fit_quality = fit.r_squared;
  if (rep.fitted_alpha <= 0.0) rep.flags.push_back("NONDECAYING");
  return rep;
}

MoserChainReport moser_norm_chain(const Field& u, double gamma0, const ExponentTable& exponents, int M,
                                  double gap_tolerance) {
  if (M < 1 || M > 12) throw DomainError("moser chain length M must lie in [1, 12]");
  if (!(gamma0 > 0.0)) throw DomainError("gamma0 must be positive");
  if (!exponents.delta.defined || !(exponents.delta.value() > 1.0)) throw DomainError("chain ratio delta must exceed 1");
  MoserChainReport rep;
  rep.gamma0 = gamma0;
  rep.delta = exponents.delta.value();
  const int n = u.dimension();
  const std::size_t count = static_cast<std::size_t>(M) + 1;
  rep.exponents.resize(count);
  rep.radii.resize(count);
  rep.chain_norms.resize(count);
  rep.mean_norms.resize(count);
  for (std::size_t m = 0; m < count; ++m) {
    rep.exponents[m] = gamma0 * std::pow(rep.delta, static_cast<double>(m));
    rep.radii[m] = 0.25 + std::pow(0.25, static_cast<double>(m + 1));
  }
  parallel_for(count, [&](std::size_t m) {
    const double t = rep.exponents[m];
    const NormValue v = lebesgue_norm(u, Number::from_double(t), rep.radii[m]);
    rep.chain_norms[m] = v.divergent ? kInf : v.value;
    rep.mean_norms[m] = rep.chain_norms[m] * std::pow(ball_volume(n, rep.radii[m]), -1.0 / t);
  });
  const BallSample sup = sample_ball(u, 0.25);
  rep.sup_divergent = sup.divergent;
  rep.sampled_sup = sup.sup_abs;
  if (rep.sup_divergent) {
    rep.limit_gap = kInf;
    rep.relative_gap = kInf;
  } else {
    rep.limit_gap = std::abs(rep.mean_norms.back() - rep.sampled_sup);
    rep.relative_gap = rep.sampled_sup > 0.0 ? rep.limit_gap / rep.sampled_sup : 0.0;
  }
  const double first = std::abs(rep.mean_norms[1] - rep.mean_norms[0]);
  const double last = std::abs(rep.mean_norms[count - 1] - rep.mean_norms[count - 2]);
  rep.increments_decaying = M == 1 || last <= 0.5 * first;
  rep.stabilizing = !rep.sup_divergent && rep.increments_decaying && rep.relative_gap <= gap_tolerance;
  return rep;
}

std::string PlateauFamily::tag() const {
  return "plateau(n=" + fmt(n) + ",s0=" + fmt(s0) + ",s=" + fmt(s) + ",c=" + fmt(c) + ",R=" + fmt(R) +
         ",beta=" + fmt(coefficient.beta) + ",theta=" + fmt(coefficient.theta) + ")";
}

double PlateauFamily::amplitude(int M) const { return std::pow(ball_volume(n, c / M), -1.0 / s0); }

LogBoundReport log_bound_check(const PlateauFamily& family, const SolverConfig& config, double s0_tolerance) {
  if (family.members.empty()) throw DomainError("plateau family has no members");
  if (!(family.s > family.s0)) throw DomainError("plateau family needs s > s0");
  if (!(family.c > 0.0 && family.c <= family.R)) throw DomainError("plateau constant c must lie in (0, R]");
  family.coefficient.validate();
  if (family.R > family.coefficient.domain_radius) throw DomainError("family radius exceeds the coefficient domain");
  for (int M : family.members) {
    if (M < 1) throw DomainError("plateau members must be >= 1");
    if (!(family.c / M > config.r_min)) throw DomainError("plateau radius c/M must exceed r_min");
  }
  config.validate(family.R);
  LogBoundReport rep;
  rep.family_tag = family.tag();
  rep.members = family.members;
  const std::size_t count = family.members.size();
  rep.s0_norms.resize(count);
  rep.s_norms.resize(count);
  rep.sup_norms.resize(count);
  rep.sup_deltas.resize(count);
  rep.log_terms.resize(count);
  rep.ratios.resize(count);
  const RadialCoefficient coef = family.coefficient;
  parallel_for(count, [&](std::size_t k) {
    const int M = family.members[k];
    const double edge = family.c / M;
    const double A = family.amplitude(M);
    RadialField f = [A, edge](double r) { return r < edge ? A : 0.0; };
    const Field field = Field::radial_function(family.n, f, false, {edge});
    rep.s0_norms[k] = lebesgue_norm(field, Number::from_double(family.s0), family.R).value;
    rep.s_norms[k] = lebesgue_norm(field, Number::from_double(family.s), family.R).value;
    RadialProblem problem;
    problem.a1 = [coef](double r) { return eval_a1(coef, r); };
    problem.f = f;
    problem.n = family.n;
    problem.R = family.R;
    problem.source_breakpoints = {edge};
    SolverConfig cfg = config;
    cfg.inner_bc = InnerBoundary::kNoFlux;
    const DiscreteSolution coarse = solve_radial(problem, cfg);
    cfg.cells *= 2;
    const DiscreteSolution fine = solve_radial(problem, cfg);
    const double sup_c = *std::max_element(coarse.values.begin(), coarse.values.end());
    const double sup_f = *std::max_element(fine.values.begin(), fine.values.end());
    rep.sup_norms[k] = sup_f;
    rep.sup_deltas[k] = std::abs(sup_f - sup_c);
    rep.log_terms[k] = std::log(rep.s_norms[k] / rep.s0_norms[k] + 1.0);
    rep.ratios[k] = sup_f / (rep.s0_norms[k] * (rep.log_terms[k] + 1.0));
  });
  const auto [s0_min, s0_max] = std::minmax_element(rep.s0_norms.begin(), rep.s0_norms.end());
  rep.s0_spread = *s0_max / *s0_min - 1.0;
  if (rep.s0_spread > s0_tolerance)
    throw DomainError("family-construction error: L^{s0} norms spread by " + fmt(rep.s0_spread));
  const auto [r_min, r_max] = std::minmax_element(rep.ratios.begin(), rep.ratios.end());
  rep.ratio_spread = *r_max / *r_min;
  std::vector<double> distinct = rep.log_terms;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    rep.flags.push_back("INSUFFICIENT_FAMILY");
    return rep;
  }
  const LinearFit fit = least_squares(rep.log_terms, rep.sup_norms);
  rep.fit_intercept = fit.intercept;
  rep.fit_slope = fit.slope;
  rep.fit_quality = fit.r_squared;
  return rep;
}

NormValue source_shift(const Field& f, const Number& s) { return lebesgue_norm(f, s, 1.0); }

}  // namespace degenlab
