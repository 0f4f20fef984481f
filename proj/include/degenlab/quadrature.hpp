#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace degenlab::quad {

enum class Status {
  kConverged,
  kNotConverged,
  kDivergent,
};

std::string_view to_string(Status status);

/// Outcome of a controlled-accuracy integration. Tolerances are relative:
/// converged implies error_estimate + tail_bound <= tol * |value|.
struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int nodes_used = 0;
  double tail_bound = 0.0;
  bool converged = false;
  Status status = Status::kNotConverged;

  bool divergent() const noexcept { return status == Status::kDivergent; }
  static QuadratureResult divergence();
};

/// Sum of two independent results; status is the weaker of the two.
QuadratureResult combine(const QuadratureResult& a, const QuadratureResult& b);

struct AdaptiveOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 4000;
};

/// Global adaptive 15-point Gauss-Kronrod integration of g over [a, b] with
/// an embedded 7-point Gauss error estimate. Breakpoints inside (a, b) seed
/// the initial panels.
QuadratureResult integrate_adaptive(const std::function<double(double)>& g, double a, double b,
                                    const AdaptiveOptions& options, std::span<const double> breakpoints = {});

/// Bound on the discarded tail of a semi-infinite integral: tail(T) >= |int_T^inf g|.
using TailBound = std::function<double(double)>;

/// Integrates g over [a, inf) by extending a truncation point T until the
/// analytic tail bound drops below a tenth of the budget.
QuadratureResult integrate_to_infinity(const std::function<double(double)>& g, double a, const TailBound& tail,
                                       const AdaptiveOptions& options, std::span<const double> breakpoints = {});

/// Whether int_0 r^a (log 1/r)^b dr converges at the origin.
bool power_log_converges_at_origin(double a, double b);

/// int_{r_lo}^{r_hi} r^a (log 1/r)^b dr with r = e^{-t}; r_hi <= 1/2.
/// Returns a divergence marker when r_lo = 0 and the exponent pair fails the
/// convergence test. Throws DomainError for r_hi > 1/2 or an inverted range.
QuadratureResult integrate_radial_power_log(double a, double b, double r_lo, double r_hi, double tol);

/// int_{r_lo}^{r_hi} g(r) dr evaluated in t = -log r. When r_lo = 0 the
/// caller must provide a tail bound in t (bound of int_T^inf g(e^-t) e^-t dt).
QuadratureResult integrate_radial(const std::function<double(double)>& g, double r_lo, double r_hi, double tol,
                                  const TailBound& tail_in_t = nullptr, std::span<const double> radial_breakpoints = {});

/// Verdict of a cutoff-ladder study.
enum class Verdict {
  kConvergent,
  kDivergent,
  kInconclusive,
};

std::string_view to_string(Verdict verdict);

/// Asymptotic form |f(r)|^s r^{n-1} ~ C r^a (log 1/r)^b as r -> 0.
struct AsymptoticExponents {
  double a = 0.0;
  double b = 0.0;
};

struct NormLadderRow {
  double cutoff = 0.0;
  double partial = 0.0;            ///< alpha_n * int_{cutoff}^R |f|^s r^{n-1} dr
  double increment = 0.0;          ///< partial_k - partial_{k-1}
  double relative_increment = 0.0; ///< increment / partial
  double piece_error = 0.0;
};

struct NormLadderOptions {
  double convergence_threshold = 0.01;  ///< relative Cauchy increment at the last cutoff
  int growth_window = 4;                ///< trailing increments that must grow for a divergence verdict
  double tol = 1e-8;
};

struct NormLadderTable {
  double s = 0.0;
  int n = 0;
  double R = 0.0;
  std::vector<NormLadderRow> rows;
  Verdict empirical = Verdict::kInconclusive;
  bool has_structural = false;
  Verdict structural = Verdict::kInconclusive;
  Verdict verdict = Verdict::kInconclusive;  ///< structural when available, else empirical
};

/// Partial L^s norms (s-th powers) of a radial f over the annuli {eps_k < |x| < R}.
/// Cutoffs must be strictly decreasing, positive and below R; throws DomainError otherwise.
NormLadderTable nested_norm_integral(const std::function<double(double)>& f, double s, int n, double R,
                                     std::span<const double> cutoffs, const NormLadderOptions& options = {},
                                     const AsymptoticExponents* structural_hint = nullptr);

}  // namespace degenlab::quad
