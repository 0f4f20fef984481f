#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "degenlab/coefficients.hpp"
#include "degenlab/exponents.hpp"
#include "degenlab/quadrature.hpp"
#include "degenlab/solver.hpp"

namespace degenlab {

using Point2 = std::array<double, 2>;

/// A solution or source field to be probed by the checks: radial (a function of
/// |x| in R^n) or planar (a function on R^2, n = 2).
class Field {
 public:
  /// Radial function. `singular_at_origin` marks a field that is unbounded at 0.
  /// Breakpoints are radii where the field jumps.
  static Field radial_function(int n, RadialField u, bool singular_at_origin = false,
                               std::vector<double> breakpoints = {});
  /// Piecewise-linear interpolant of a radial solve, constant below r_min.
  static Field radial_mesh(const DiscreteSolution& solution);
  static Field planar_function(PlanarField u);
  /// Bilinear interpolant of a planar solve; points outside the grid throw.
  static Field planar_grid(const DiscreteSolution& solution);

  bool is_radial() const noexcept { return radial_; }
  int dimension() const noexcept { return n_; }
  bool singular_at_origin() const noexcept { return singular_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  /// Mesh radii (radial mesh) used as dense sampling points.
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  /// Grid nodes (planar grid) used as dense sampling points.
  const std::vector<Point2>& grid_points() const noexcept { return grid_points_; }

  double at_radius(double r) const;
  double at(const Point2& x) const;

  /// c * field, sharing the underlying data.
  Field scaled(double c) const;

  /// Declares |field| ~ C r^a (log 1/r)^b at the origin, which sets the tail of norm
  /// integrals to the origin. The default (a, b) = (0, 0) describes a bounded field.
  Field with_origin_behavior(double a, double b) const;
  const quad::AsymptoticExponents& origin_behavior() const noexcept { return origin_; }

 private:
  bool radial_ = true;
  int n_ = 2;
  bool singular_ = false;
  double scale_ = 1.0;
  RadialField radial_fn_;
  PlanarField planar_fn_;
  std::vector<double> breakpoints_;
  std::vector<double> nodes_;
  std::vector<Point2> grid_points_;
  quad::AsymptoticExponents origin_;
};

/// A norm value or a divergence marker.
struct NormValue {
  bool divergent = false;
  double value = 0.0;
};

/// ||u||_{L^t(B_R(center))}; t = inf gives the sampled sup of |u|. A radial field
/// requires center = 0. Computed as U (int |u/U|^t)^{1/t} with U the sampled sup,
/// so large exponents do not overflow.
NormValue lebesgue_norm(const Field& u, const Number& t, double R, const Point2& center = {0.0, 0.0},
                        double tol = 1e-9);

/// Sampled sup |u| and inf u over the closed ball. A radial field off the origin
/// is sampled in a plane through the center and the origin.
struct BallSample {
  double sup_abs = 0.0;
  double max_value = 0.0;
  double min_value = 0.0;
  bool divergent = false;  ///< field singular at a point of the ball
};
BallSample sample_ball(const Field& u, double radius, const Point2& center = {0.0, 0.0});

struct BoundCheckReport {
  double lhs = 0.0;                ///< sup_{B_{theta R}} |u|
  std::optional<double> lhs_refinement_delta;
  double norm_u_gamma = 0.0;       ///< ||u||_{L^gamma(B_R)}
  double norm_f_s = 0.0;           ///< ||f||_{L^s(B_R)}
  double rhs_norm_term = 0.0;
  double rhs_source_term = 0.0;
  double lambda = 0.0;             ///< Lambda(B_R)
  double lambda_factor = 0.0;
  double fitted_C = 0.0;
  bool divergent = false;
  std::string divergence_note;
};

/// Sup-bound quantities on B_R(center) for -div(a_1 grad u) = f with lambda = mu = a_1.
/// `refined` is the same solution on a mesh refined once; its sup gives lhs_refinement_delta.
BoundCheckReport sup_bound_check(const Field& u, const Field& f, const ProblemParams& params,
                                 const RadialCoefficient& coefficient, double theta, double R,
                                 const Point2& center = {0.0, 0.0}, const Field* refined = nullptr);

struct HarnackReport {
  double sup_half = 0.0;
  double inf_half = 0.0;
  double source_term = 0.0;  ///< R^{2-n/s} ||f||_{L^s(B_R)}
  double quotient = 0.0;     ///< sup_half / (inf_half + source_term); NaN when 0/0
  bool nonnegative = true;   ///< precondition u >= 0 on B_R
  double min_sample = 0.0;
  bool divergent = false;
};

/// `negative_tolerance` is the slack below zero accepted as rounding.
HarnackReport harnack_quotient(const Field& u, const Field& f, int n, const Number& s, double R,
                               const Point2& center = {0.0, 0.0}, double negative_tolerance = 1e-12);

struct HolderReport {
  std::vector<double> scales;        ///< r_j = R 2^{-j}
  std::vector<double> oscillations;  ///< osc over B_{r_j}(center), nonincreasing in j
  double fitted_alpha = 0.0;
  double fit_quality = 0.0;
  int usable_levels = 0;
  bool irregular_at_center = false;
  std::vector<std::string> flags;
};

/// Throws InsufficientData when fewer than 3 levels have a finite positive oscillation
/// (unless the field is singular at the center, which is reported instead).
HolderReport holder_exponent(const Field& u, const Point2& center, double R, int levels);

struct MoserChainReport {
  double gamma0 = 0.0;
  double delta = 0.0;
  std::vector<double> exponents;    ///< gamma0 delta^m
  std::vector<double> radii;        ///< rho_m = 1/4 + (1/4)^{m+1}
  std::vector<double> chain_norms;  ///< ||u||_{L^{t_m}(B_{rho_m})}
  std::vector<double> mean_norms;   ///< (mean over B_{rho_m} of |u|^{t_m})^{1/t_m}
  double sampled_sup = 0.0;         ///< sup over B_{1/4}
  bool sup_divergent = false;
  double limit_gap = 0.0;           ///< |mean_norms[M] - sampled_sup|
  double relative_gap = 0.0;        ///< limit_gap / sampled_sup
  bool increments_decaying = false; ///< last increment <= half the first one
  bool stabilizing = false;
};

/// M <= 12. Stabilizing means a finite sup, decaying increments and relative_gap <= gap_tolerance.
MoserChainReport moser_norm_chain(const Field& u, double gamma0, const ExponentTable& exponents, int M,
                                  double gap_tolerance = 0.05);

/// Radial plateau family f_M = A_M 1{r < c/M} with A_M fixed by ||f_M||_{L^{s0}(B_R)} = 1.
struct PlateauFamily {
  int n = 3;
  double s0 = 6.0;
  double s = 8.0;
  double c = 0.25;
  double R = 0.25;
  std::vector<int> members;  ///< the M values
  RadialCoefficient coefficient;

  std::string tag() const;
  double amplitude(int M) const;
};

struct LogBoundReport {
  std::string family_tag;
  std::vector<int> members;
  std::vector<double> s0_norms;
  std::vector<double> s_norms;
  std::vector<double> sup_norms;
  std::vector<double> sup_deltas;   ///< |sup(2N) - sup(N)|
  std::vector<double> log_terms;    ///< log(||f||_s/||f||_{s0} + 1)
  std::vector<double> ratios;       ///< sup / (||f||_{s0} (log term + 1))
  double s0_spread = 0.0;           ///< max/min of s0_norms - 1
  double ratio_spread = 0.0;        ///< max/min of ratios
  double fit_intercept = 0.0;
  double fit_slope = 0.0;
  double fit_quality = 0.0;
  std::vector<std::string> flags;
};

/// Solves every member on B_R with u(R) = 0 and NO_FLUX at config.r_min, at config.cells
/// and twice as many. Throws DomainError when the s0 norms spread by more than s0_tolerance.
LogBoundReport log_bound_check(const PlateauFamily& family, const SolverConfig& config,
                               double s0_tolerance = 0.02);

/// The constant shift k = ||f||_{L^s(B_1)} used by the iteration arguments.
NormValue source_shift(const Field& f, const Number& s);

}  // namespace degenlab
