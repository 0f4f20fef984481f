#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace degenlab {

enum class InnerBoundary {
  kNoFlux,               ///< r^{n-1} a_1 u' = 0 at r_min
  kDirichletFromKernel,  ///< u(r_min) prescribed (eval_u for the examples)
};

std::string_view to_string(InnerBoundary bc);
std::optional<InnerBoundary> parse_inner_boundary(std::string_view text);

struct SolverConfig {
  double r_min = 1e-6;
  double grading = 3.0;
  double linear_tolerance = 1e-10;
  int max_iterations = 20000;
  InnerBoundary inner_bc = InnerBoundary::kNoFlux;
  int cells = 1024;

  /// Radial solves: linear_tolerance in (0, 1e-4], r_min in (0, R/10], grading >= 1, cells >= 2.
  void validate(double R) const;
  /// Planar solves: linear_tolerance in (0, 1e-4], cells >= 16, max_iterations >= 1.
  void validate_planar() const;
  /// key=value lines with 17 significant digits; input of the config digest.
  std::string canonical() const;
  std::string digest() const;
};

struct RadialMesh {
  std::vector<double> nodes;  ///< r_0 = r_min < ... < r_N = R
  double grading = 1.0;
  int n = 3;

  /// r_i = r_min + (R - r_min) (i/N)^g.
  static RadialMesh graded(double r_min, double R, int cells, double grading, int n);
};

/// Square [x0, x0 + side] x [y0, y0 + side] with (cells + 1)^2 nodes.
struct Grid2D {
  double x0 = 0.0;
  double y0 = 0.0;
  double side = 1.0;
  int cells = 16;

  double spacing() const noexcept { return side / cells; }
  double x(int i) const noexcept { return x0 + side * i / cells; }
  double y(int j) const noexcept { return y0 + side * j / cells; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(cells + 1) + static_cast<std::size_t>(i);
  }
};

struct SolverStats {
  int iterations = 0;
  double final_residual = 0.0;  ///< relative residual of the linear system
  std::vector<double> residual_history;
};

struct DiscreteSolution {
  std::variant<RadialMesh, Grid2D> mesh;
  std::vector<double> values;
  std::vector<std::size_t> boundary_nodes;
  SolverStats stats;
  double linear_tolerance = 0.0;
  std::string config_hash;

  bool is_radial() const noexcept { return std::holds_alternative<RadialMesh>(mesh); }
  const RadialMesh& radial() const { return std::get<RadialMesh>(mesh); }
  const Grid2D& grid() const { return std::get<Grid2D>(mesh); }
};

using RadialField = std::function<double(double)>;
using PlanarField = std::function<double(double, double)>;

struct RadialProblem {
  RadialField a1;
  RadialField f;
  int n = 3;
  double R = 1.0;
  double outer_value = 0.0;
  std::optional<double> inner_value;      ///< required for kDirichletFromKernel
  std::vector<double> source_breakpoints; ///< jumps of f, honored by the source quadrature
};

/// Full-size tridiagonal system; Dirichlet rows are identity rows.
struct TridiagonalSystem {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
  std::vector<double> rhs;
};

/// Finite-volume assembly of -(r^{n-1} a_1 u')' = r^{n-1} f. Face transmissibilities
/// are 1 / int dr/(r^{n-1} a_1) over each cell (the integral harmonic mean).
/// Throws EllipticityError on a non-positive or non-finite coefficient sample.
TridiagonalSystem assemble_radial(const RadialProblem& problem, const RadialMesh& mesh, InnerBoundary inner_bc);

/// Thomas algorithm; throws SolverFailure on a vanishing pivot.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

/// max_i |b - A u|_i / (|A|_inf |u|_inf + |b|_inf).
double relative_residual(const TridiagonalSystem& system, const std::vector<double>& u);

DiscreteSolution solve_radial(const RadialProblem& problem, const SolverConfig& config);

struct PlanarProblem {
  PlanarField a_x;         ///< diagonal entry acting on d/dx
  PlanarField a_y;         ///< diagonal entry acting on d/dy; empty means a_y = a_x
  PlanarField f;
  PlanarField boundary;    ///< Dirichlet trace
  Grid2D grid;
};

/// Five-point scheme with harmonic face averages, solved by Jacobi-preconditioned CG
/// to ||b - Au||_2 <= linear_tolerance ||b||_2. Throws SolverFailure with the residual
/// history when max_iterations is exhausted.
DiscreteSolution solve_2d_diagonal(const PlanarProblem& problem, const SolverConfig& config);

enum class SourceSign { kNonnegative, kZero, kNonpositive };

struct MaxPrincipleReport {
  bool holds = true;
  double min_value = 0.0;
  double max_value = 0.0;
  double boundary_min = 0.0;
  double boundary_max = 0.0;
  double threshold = 0.0;  ///< linear_tolerance * max(1, |u|_inf)
  std::vector<std::size_t> violations;
};

/// f >= 0: min u >= boundary min - threshold; f <= 0: the mirrored bound;
/// f = 0: boundary min - threshold <= u <= boundary max + threshold.
MaxPrincipleReport max_principle_check(const DiscreteSolution& solution, SourceSign f_sign);

}  // namespace degenlab
