#include "degenlab/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>

#include "degenlab/digest.hpp"
#include "degenlab/errors.hpp"
#include "degenlab/parallel.hpp"

namespace degenlab {

std::string_view to_string(InnerBoundary bc) {
  return bc == InnerBoundary::kNoFlux ? "NO_FLUX" : "DIRICHLET_FROM_KERNEL";
}

std::optional<InnerBoundary> parse_inner_boundary(std::string_view text) {
  if (text == "NO_FLUX") return InnerBoundary::kNoFlux;
  if (text == "DIRICHLET_FROM_KERNEL") return InnerBoundary::kDirichletFromKernel;
  return std::nullopt;
}

namespace {

void check_common(const SolverConfig& c) {
  if (!(c.linear_tolerance > 0.0 && c.linear_tolerance <= 1e-4))
    throw DomainError("linear_tolerance must lie in (0, 1e-4]");
  if (c.max_iterations < 1) throw DomainError("max_iterations must be >= 1");
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr std::array<double, 4> kGaussX = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                           0.8611363115940526};
constexpr std::array<double, 4> kGaussW = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                           0.3478548451374538};

// int_lo^hi g(r) dr with 4-point Gauss in s = log r, so power-law integrands over
// intervals with a large ratio hi/lo are integrated accurately.
template <class G>
double gauss_log(const G& g, double lo, double hi) {
  const double a = std::log(lo);
  const double b = std::log(hi);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double r = std::exp(mid + half * kGaussX[k]);
    sum += kGaussW[k] * g(r) * r;
  }
  return half * sum;
}

double checked_coefficient(const RadialField& a1, double r) {
  const double a = a1(r);
  if (!(a > 0.0) || !std::isfinite(a))
    throw EllipticityError("coefficient a_1(" + fmt17(r) + ") = " + fmt17(a) + " is not positive and finite");
  return a;
}

double source_integral(const RadialProblem& p, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts{lo};
  for (double b : p.source_breakpoints)
    if (b > lo && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  const int n = p.n;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    sum += gauss_log([&](double r) { return std::pow(r, n - 1) * p.f(r); }, cuts[k], cuts[k + 1]);
  return sum;
}

}  // namespace

void SolverConfig::validate(double R) const {
  check_common(*this);
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("outer radius must be positive");
  if (!(r_min > 0.0 && r_min <= R / 10.0)) throw DomainError("r_min must lie in (0, R/10]");
  if (!(grading >= 1.0) || !std::isfinite(grading)) throw DomainError("grading must be >= 1");
  if (cells < 2) throw DomainError("radial mesh needs at least 2 cells");
}

void SolverConfig::validate_planar() const {
  check_common(*this);
  if (cells < 16) throw DomainError("planar grid resolution must be >= 16");
}

std::string SolverConfig::canonical() const {
  std::ostringstream out;
  out << "cells=" << cells << '\n'
      << "grading=" << fmt17(grading) << '\n'
      << "inner_bc=" << to_string(inner_bc) << '\n'
      << "linear_tolerance=" << fmt17(linear_tolerance) << '\n'
      << "max_iterations=" << max_iterations << '\n'
      << "r_min=" << fmt17(r_min) << '\n';
  return out.str();
}

std::string SolverConfig::digest() const { return sha256_hex(canonical()); }

RadialMesh RadialMesh::graded(double r_min, double R, int cells, double grading, int n) {
  if (!(r_min > 0.0 && r_min < R)) throw DomainError("mesh needs 0 < r_min < R");
  if (cells < 1) throw DomainError("mesh needs at least one cell");
  if (!(grading >= 1.0)) throw DomainError("mesh grading must be >= 1");
  RadialMesh mesh;
  mesh.grading = grading;
  mesh.n = n;
  mesh.nodes.resize(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i)
    mesh.nodes[i] = r_min + (R - r_min) * std::pow(static_cast<double>(i) / cells, grading);
  mesh.nodes.front() = r_min;
  mesh.nodes.back() = R;
  for (std::size_t i = 1; i < mesh.nodes.size(); ++i)
    if (!(mesh.nodes[i] > mesh.nodes[i - 1])) throw DomainError("mesh nodes collapse; reduce cells or grading");
  return mesh;
}

TridiagonalSystem assemble_radial(const RadialProblem& p, const RadialMesh& mesh, InnerBoundary inner_bc) {
  const auto& r = mesh.nodes;
  const std::size_t N = r.size() - 1;
  if (N < 1) throw DomainError("mesh needs at least one cell");
  if (!p.a1 || !p.f) throw DomainError("radial problem needs a coefficient and a source");
  if (inner_bc == InnerBoundary::kDirichletFromKernel && !p.inner_value)
    throw DomainError("DIRICHLET_FROM_KERNEL needs an inner boundary value");
  const int n = p.n;

  // Transmissibility of cell [r_i, r_{i+1}]: 1 / int dr / (r^{n-1} a_1).
  std::vector<double> trans(N);
  parallel_for(N, [&](std::size_t i) {
    const double resistance =
        gauss_log([&](double x) { return 1.0 / (std::pow(x, n - 1) * checked_coefficient(p.a1, x)); }, r[i], r[i + 1]);
    trans[i] = 1.0 / resistance;
  });
  for (double node : r) checked_coefficient(p.a1, node);

  TridiagonalSystem sys;
  sys.lower.assign(N + 1, 0.0);
  sys.diag.assign(N + 1, 0.0);
  sys.upper.assign(N + 1, 0.0);
  sys.rhs.assign(N + 1, 0.0);
  parallel_for(N + 1, [&](std::size_t i) {
    if (i == N) {
      sys.diag[i] = 1.0;
      sys.rhs[i] = p.outer_value;
      return;
    }
    if (i == 0 && inner_bc == InnerBoundary::kDirichletFromKernel) {
      sys.diag[i] = 1.0;
      sys.rhs[i] = *p.inner_value;
      return;
    }
    const double left_face = i == 0 ? r[0] : 0.5 * (r[i - 1] + r[i]);
    const double right_face = 0.5 * (r[i] + r[i + 1]);
    if (i > 0) sys.lower[i] = -trans[i - 1];
    sys.upper[i] = -trans[i];
    sys.diag[i] = -sys.lower[i] - sys.upper[i];
    sys.rhs[i] = source_integral(p, left_face, r[i]) + source_integral(p, r[i], right_face);
  });
  return sys;
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& s) {
  const std::size_t n = s.diag.size();
  std::vector<double> c(n, 0.0);
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double pivot = s.diag[i] - (i > 0 ? s.lower[i] * c[i - 1] : 0.0);
    if (!(std::abs(pivot) > std::numeric_limits<double>::min() * 16) || !std::isfinite(pivot))
      throw SolverFailure("singular tridiagonal system: pivot " + fmt17(pivot) + " at row " + std::to_string(i));
    c[i] = s.upper[i] / pivot;
    d[i] = (s.rhs[i] - (i > 0 ? s.lower[i] * d[i - 1] : 0.0)) / pivot;
  }
  std::vector<double> u(n);
  u[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) u[i] = d[i] - c[i] * u[i + 1];
  return u;
}

double relative_residual(const TridiagonalSystem& s, const std::vector<double>& u) {
  const std::size_t n = s.diag.size();
  double res = 0.0;
  double a_norm = 0.0;
  double u_norm = 0.0;
  double b_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double au = s.diag[i] * u[i];
    if (i > 0) au += s.lower[i] * u[i - 1];
    if (i + 1 < n) au += s.upper[i] * u[i + 1];
    res = std::max(res, std::abs(s.rhs[i] - au));
    a_norm = std::max(a_norm, std::abs(s.lower[i]) + std::abs(s.diag[i]) + std::abs(s.upper[i]));
    u_norm = std::max(u_norm, std::abs(u[i]));
    b_norm = std::max(b_norm, std::abs(s.rhs[i]));
  }
  const double scale = a_norm * u_norm + b_norm;
  return scale > 0.0 ? res / scale : 0.0;
}

DiscreteSolution solve_radial(const RadialProblem& problem, const SolverConfig& config) {
  config.validate(problem.R);
  if (problem.n < 1) throw DomainError("dimension must be >= 1");
  RadialMesh mesh = RadialMesh::graded(config.r_min, problem.R, config.cells, config.grading, problem.n);
  const TridiagonalSystem sys = assemble_radial(problem, mesh, config.inner_bc);
  std::vector<double> u = solve_tridiagonal(sys);
  double residual = relative_residual(sys, u);
  int iterations = 1;
  std::vector<double> history{residual};
  if (residual > config.linear_tolerance) {
    // One step of iterative refinement.
    TridiagonalSystem correction = sys;
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
      double au = sys.diag[i] * u[i];
      if (i > 0) au += sys.lower[i] * u[i - 1];
      if (i + 1 < n) au += sys.upper[i] * u[i + 1];
      correction.rhs[i] = sys.rhs[i] - au;
    }
    const std::vector<double> du = solve_tridiagonal(correction);
    for (std::size_t i = 0; i < n; ++i) u[i] += du[i];
    residual = relative_residual(sys, u);
    history.push_back(residual);
    ++iterations;
    if (residual > config.linear_tolerance)
      throw SolverFailure("tridiagonal solve missed linear_tolerance: residual " + fmt17(residual), history);
  }
  DiscreteSolution sol;
  sol.values = std::move(u);
  sol.boundary_nodes.push_back(sol.values.size() - 1);
  if (config.inner_bc == InnerBoundary::kDirichletFromKernel) sol.boundary_nodes.insert(sol.boundary_nodes.begin(), 0);
  sol.mesh = std::move(mesh);
  sol.stats.iterations = iterations;
  sol.stats.final_residual = residual;
  sol.stats.residual_history = std::move(history);
  sol.linear_tolerance = config.linear_tolerance;
  sol.config_hash = config.digest();
  return sol;
}

DiscreteSolution solve_2d_diagonal(const PlanarProblem& p, const SolverConfig& config) {
  config.validate_planar();
  if (p.grid.cells != config.cells) throw DomainError("grid resolution must match SolverConfig.cells");
  if (!(p.grid.side > 0.0)) throw DomainError("grid side must be positive");
  if (!p.a_x || !p.f || !p.boundary) throw DomainError("planar problem needs a coefficient, a source and a trace");
  const Grid2D& g = p.grid;
  const int C = g.cells;
  const std::size_t nodes = static_cast<std::size_t>(C + 1) * static_cast<std::size_t>(C + 1);
  const double h = g.spacing();

  auto sample = [&](const PlanarField& field, double x, double y) {
    const double a = field(x, y);
    if (!(a > 0.0) || !std::isfinite(a))
      throw EllipticityError("coefficient at (" + fmt17(x) + ", " + fmt17(y) + ") = " + fmt17(a) +
                             " is not positive and finite");
    return a;
  };
  const PlanarField& ay_field = p.a_y ? p.a_y : p.a_x;
  std::vector<double> ax(nodes);
  std::vector<double> ay(nodes);
  for (int j = 0; j <= C; ++j)
    for (int i = 0; i <= C; ++i) {
      ax[g.index(i, j)] = sample(p.a_x, g.x(i), g.y(j));
      ay[g.index(i, j)] = sample(ay_field, g.x(i), g.y(j));
    }
  auto harmonic = [](double a, double b) { return 2.0 * a * b / (a + b); };
  // East and north face coefficients divided by h^2.
  std::vector<double> east(nodes, 0.0);
  std::vector<double> north(nodes, 0.0);
  for (int j = 0; j <= C; ++j)
    for (int i = 0; i <= C; ++i) {
      if (i < C) east[g.index(i, j)] = harmonic(ax[g.index(i, j)], ax[g.index(i + 1, j)]) / (h * h);
      if (j < C) north[g.index(i, j)] = harmonic(ay[g.index(i, j)], ay[g.index(i, j + 1)]) / (h * h);
    }

  std::vector<double> u(nodes, 0.0);
  std::vector<char> is_boundary(nodes, 0);
  DiscreteSolution sol;
  for (int j = 0; j <= C; ++j)
    for (int i = 0; i <= C; ++i) {
      if (i == 0 || j == 0 || i == C || j == C) {
        const std::size_t k = g.index(i, j);
        is_boundary[k] = 1;
        u[k] = p.boundary(g.x(i), g.y(j));
        sol.boundary_nodes.push_back(k);
      }
    }

  auto diag_at = [&](int i, int j) {
    return east[g.index(i, j)] + east[g.index(i - 1, j)] + north[g.index(i, j)] + north[g.index(i, j - 1)];
  };
  // A acting on interior unknowns only (boundary entries of v are ignored).
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int j = 1; j < C; ++j)
      for (int i = 1; i < C; ++i) {
        double s = diag_at(i, j) * v[g.index(i, j)];
        if (i + 1 < C) s -= east[g.index(i, j)] * v[g.index(i + 1, j)];
        if (i - 1 > 0) s -= east[g.index(i - 1, j)] * v[g.index(i - 1, j)];
        if (j + 1 < C) s -= north[g.index(i, j)] * v[g.index(i, j + 1)];
        if (j - 1 > 0) s -= north[g.index(i, j - 1)] * v[g.index(i, j - 1)];
        out[g.index(i, j)] = s;
      }
  };
  std::vector<double> b(nodes, 0.0);
  for (int j = 1; j < C; ++j)
    for (int i = 1; i < C; ++i) {
      double s = p.f(g.x(i), g.y(j));
      if (i + 1 == C) s += east[g.index(i, j)] * u[g.index(i + 1, j)];
      if (i - 1 == 0) s += east[g.index(i - 1, j)] * u[g.index(i - 1, j)];
      if (j + 1 == C) s += north[g.index(i, j)] * u[g.index(i, j + 1)];
      if (j - 1 == 0) s += north[g.index(i, j - 1)] * u[g.index(i, j - 1)];
      b[g.index(i, j)] = s;
    }
  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (int j = 1; j < C; ++j)
      for (int i = 1; i < C; ++i) s += x[g.index(i, j)] * y[g.index(i, j)];
    return s;
  };

  const double b_norm = std::sqrt(dot(b, b));
  std::vector<double> x(nodes, 0.0);
  std::vector<double> r = b;
  std::vector<double> z(nodes, 0.0);
  std::vector<double> d(nodes, 0.0);
  std::vector<double> q(nodes, 0.0);
  auto precondition = [&] {
    for (int j = 1; j < C; ++j)
      for (int i = 1; i < C; ++i) z[g.index(i, j)] = r[g.index(i, j)] / diag_at(i, j);
  };
  precondition();
  d = z;
  double rz = dot(r, z);
  double rel = b_norm > 0.0 ? 1.0 : 0.0;
  sol.stats.residual_history.push_back(rel);
  int it = 0;
  while (rel > config.linear_tolerance) {
    if (it >= config.max_iterations)
      throw SolverFailure("CG stagnated after " + std::to_string(it) + " iterations, relative residual " + fmt17(rel),
                          sol.stats.residual_history);
    apply(d, q);
    const double alpha = rz / dot(d, q);
    for (int j = 1; j < C; ++j)
      for (int i = 1; i < C; ++i) {
        const std::size_t k = g.index(i, j);
        x[k] += alpha * d[k];
        r[k] -= alpha * q[k];
      }
    ++it;
    rel = std::sqrt(dot(r, r)) / b_norm;
    sol.stats.residual_history.push_back(rel);
    precondition();
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (int j = 1; j < C; ++j)
      for (int i = 1; i < C; ++i) {
        const std::size_t k = g.index(i, j);
        d[k] = z[k] + beta * d[k];
      }
  }
  // Recompute the true residual to guard against drift of the recurrence.
  apply(x, q);
  double true_res = 0.0;
  for (int j = 1; j < C; ++j)
    for (int i = 1; i < C; ++i) {
      const std::size_t k = g.index(i, j);
      true_res += (b[k] - q[k]) * (b[k] - q[k]);
    }
  rel = b_norm > 0.0 ? std::sqrt(true_res) / b_norm : 0.0;
  for (std::size_t k = 0; k < nodes; ++k)
    if (!is_boundary[k]) u[k] = x[k];
  sol.values = std::move(u);
  sol.mesh = g;
  sol.stats.iterations = it;
  sol.stats.final_residual = rel;
  sol.linear_tolerance = config.linear_tolerance;
  sol.config_hash = config.digest();
  return sol;
}

MaxPrincipleReport max_principle_check(const DiscreteSolution& sol, SourceSign f_sign) {
  MaxPrincipleReport rep;
  if (sol.values.empty()) return rep;
  rep.min_value = *std::min_element(sol.values.begin(), sol.values.end());
  rep.max_value = *std::max_element(sol.values.begin(), sol.values.end());
  rep.boundary_min = std::numeric_limits<double>::infinity();
  rep.boundary_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k : sol.boundary_nodes) {
    rep.boundary_min = std::min(rep.boundary_min, sol.values[k]);
    rep.boundary_max = std::max(rep.boundary_max, sol.values[k]);
  }
  const double scale = std::max({1.0, std::abs(rep.min_value), std::abs(rep.max_value)});
  rep.threshold = sol.linear_tolerance * scale;
  const bool check_low = f_sign != SourceSign::kNonpositive;
  const bool check_high = f_sign != SourceSign::kNonnegative;
  for (std::size_t k = 0; k < sol.values.size(); ++k) {
    const double v = sol.values[k];
    if ((check_low && v < rep.boundary_min - rep.threshold) || (check_high && v > rep.boundary_max + rep.threshold))
      rep.violations.push_back(k);
  }
  rep.holds = rep.violations.empty();
  return rep;
}

}  // namespace degenlab
