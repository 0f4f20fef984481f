#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "degenlab/coefficients.hpp"
#include "degenlab/kernel.hpp"
#include "degenlab/quadrature.hpp"

namespace degenlab {

enum class ExampleId {
  kEx1,        ///< q > n/2, source in the critical space L^{s0}
  kEx2,        ///< q = n/2, bounded source
  kEx3,        ///< (n-1)/2 < q < n/2, bounded source
  kBorderline, ///< 1/p + 1/q = 2/(n-1) with p = inf, i.e. q = (n-1)/2
};

std::string_view to_string(ExampleId id);
std::optional<ExampleId> parse_example_id(std::string_view text);

/// Which three-term source to use. kVerbatim keeps the conventional
/// coefficient pattern for each example; kDerived takes the coefficients from
/// differentiating the flux of u exactly, (n-1+beta, -theta, -2).
enum class SourceForm { kVerbatim, kDerived };

std::string_view to_string(SourceForm form);

/// f = alpha_n [ c_flux r^{beta-1} L^{t} K_2 + c_log r^{beta-1} L^{t-1} K_2 - 2 r^beta L^{t} K_3 ],
/// L = log(1/r), t = log_power.
struct SourceCoefficients {
  double c_flux = 0.0;
  double c_log = 0.0;
  double log_power = 0.0;
};

struct ExampleSpec {
  ExampleId id = ExampleId::kEx1;
  int n = 3;
  double q = 2.0;
  double beta = 1.5;
  double theta = 0.0;           ///< log power of the coefficient a_1
  double domain_radius = 0.25;  ///< the example domain B_{1/4}
  bool extrapolated = false;    ///< EX3 with a non-default theta

  /// Builds a spec with the derived beta/theta of each example. `theta_override`
  /// is accepted only for EX3 (must exceed 1/q). Throws DomainError when (n, q)
  /// violate the example's conditions.
  static ExampleSpec make(ExampleId id, int n, double q, std::optional<double> theta_override = std::nullopt);

  /// a_1 = r^beta (log 1/r)^theta, valid up to r = 1/2.
  RadialCoefficient coefficient() const;
  SourceCoefficients source_coefficients(SourceForm form) const;
};

/// u(r) = alpha_n K_1(r), shared by every example. r = 0 gives a divergence marker.
quad::QuadratureResult eval_u(const ExampleSpec& spec, double r, double tol,
                              const KernelCache* cache = nullptr);

/// u'(r) = -alpha_n K_2(r).
quad::QuadratureResult eval_du(const ExampleSpec& spec, double r, double tol, const KernelCache* cache = nullptr);

/// The example's source at radius r in (0, 1/2]; r = 0 gives a divergence marker.
quad::QuadratureResult eval_f(const ExampleSpec& spec, double r, double tol, SourceForm form = SourceForm::kVerbatim,
                              const KernelCache* cache = nullptr);

/// Radial triple for the strong-form residual -(r^{n-1} a u')' / r^{n-1} - f.
struct RadialTriple {
  int n = 3;
  std::function<double(double)> a1;
  std::function<double(double)> du;
  std::function<double(double)> f;
};

struct WeakResidualReport {
  double r_a = 0.0;
  double r_b = 0.0;
  double residual_sup = 0.0;  ///< sup |-(r^{n-1} a u')'/r^{n-1} - f| / (1 + |f|)
  double argmax_r = 0.0;
  int node_count = 0;
  double relative_step = 0.0;
  double budget = 0.0;
  bool within_budget = false;
  /// Set for example runs whose residual exceeds the budget: the source does
  /// not match the solution it is paired with.
  bool transcription_discrepancy = false;
};

/// Centered difference of the flux at log-spaced nodes of [r_a, r_b] with step h = c r.
WeakResidualReport radial_residual(const RadialTriple& triple, double r_a, double r_b, int node_count,
                                   double relative_step = 1e-5, double budget = 1e-4);

/// Residual of an example's (u, f) pair. The flux uses u' = -alpha_n K_2
/// (the derivative of the integral representation), differenced once.
WeakResidualReport residual_check(const ExampleSpec& spec, double r_a, double r_b, int node_count, double tol,
                                  SourceForm form = SourceForm::kVerbatim, double relative_step = 1e-5,
                                  double budget = 1e-4);

struct DivergenceProfile {
  std::vector<int> ks;
  std::vector<double> radii;   ///< eps_k = 2^{-k}
  std::vector<double> values;  ///< u(eps_k)
  bool strictly_increasing = false;
  std::string_view growth_model = "u = c0 + c1 log log(1/eps)";
  double intercept = 0.0;
  double slope = 0.0;
  double fit_quality = 0.0;  ///< R^2 over the fit window
  int fit_k_lo = 0;
  int fit_k_hi = 0;
};

/// u(2^{-k}) for k = 2..k_max, monotonicity check and log-log fit over [fit_lo, fit_hi] ∩ [2, k_max].
DivergenceProfile blowup_profile(const ExampleSpec& spec, int k_max, double tol = 1e-12, int fit_lo = 10,
                                 int fit_hi = 30);

struct SourceProfile {
  std::vector<double> radii;
  std::vector<double> values;    ///< |f| sampled four times per octave
  double sup_coarse = 0.0;       ///< sup over radii >= 2^{-k_max/2}
  double sup_fine = 0.0;         ///< sup over all radii >= 2^{-k_max}
  bool stabilized = false;       ///< |sup_fine - sup_coarse| <= stabilization_tol * sup_fine
};

SourceProfile source_profile(const ExampleSpec& spec, int k_max, SourceForm form = SourceForm::kVerbatim,
                             double tol = 1e-12, double stabilization_tol = 1e-3);

/// Leading behavior |f|^s r^{n-1} ~ r^{s(beta-2)+n-1} L^{s(t-1)} near the origin.
quad::AsymptoticExponents source_asymptotics(const ExampleSpec& spec, double s, SourceForm form);

/// Cutoff-ladder L^s membership study of the example source over B_{1/4}.
quad::NormLadderTable membership(const ExampleSpec& spec, double s, std::span<const double> cutoffs,
                                 SourceForm form = SourceForm::kVerbatim, const quad::NormLadderOptions& options = {},
                                 const KernelCache* cache = nullptr);

}  // namespace degenlab
