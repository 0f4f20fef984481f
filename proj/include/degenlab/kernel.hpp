#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "degenlab/quadrature.hpp"

namespace degenlab {

/// Radial reduction of the counterexample integrals,
///   K_m(|x|) = int_0^{outer} (|x| + r)^{-m} (log 1/r)^{-1} dr,
/// which equals int_{B_outer} |y|^{1-n} (|x|+|y|)^{-m} (log 1/|y|)^{-1} dy / alpha_n.
struct KernelSpec {
  int m = 1;
  double x_norm = 0.0;
  double outer_radius = 0.5;

  void validate() const;
};

/// A priori bounds for the two halves of K_3 (alpha_n divided out).
struct KernelSplitBounds {
  double inner_bound = 0.0;  ///< |x|^{-2} / log(1/|x|)
  double outer_bound = 0.0;  ///< |x|^{-3/2} / (2 log 2)
  bool respected = false;
};

struct KernelEvaluation {
  quad::QuadratureResult direct;
  quad::QuadratureResult inner;  ///< r < |x|^{1/2}
  quad::QuadratureResult outer;  ///< r >= |x|^{1/2}
  bool split_consistent = false; ///< |direct - (inner+outer)| <= 2 (sum of error estimates)
  std::optional<KernelSplitBounds> bounds;  ///< present for m = 3 with |x| < 1/4
};

/// K_m to relative tolerance `tol`, cross-validated against the split at
/// r = |x|^{1/2}. |x| = 0 yields a divergence marker (K_m(0) = +inf for m >= 1).
KernelEvaluation eval_kernel(const KernelSpec& spec, double tol);

/// Direct evaluation only; m may be any positive integer. Used by the cache
/// (derivatives need K_{m+1}) and by hot loops that do not want the split.
quad::QuadratureResult kernel_direct(int m, double x_norm, double tol, double outer_radius = 0.5);

/// Tabulated log K_m on a uniform grid in u = log(1/|x|) with cubic Hermite
/// interpolation. Node derivatives are exact, d log K_m / du = m |x| K_{m+1} / K_m,
/// and pass through a Fritsch-Carlson limiter so the interpolant stays monotone.
/// Immutable after build; safe for concurrent reads.
class KernelCache {
 public:
  struct Options {
    double u_max = 60.0;          ///< smallest tabulated radius is e^{-u_max}
    double spacing = 0.02;        ///< initial grid spacing in u
    double rel_accuracy = 1e-10;  ///< interpolation budget checked at interval midpoints
    int max_refinements = 3;
  };

  static std::shared_ptr<const KernelCache> build(const Options& options);
  static std::shared_ptr<const KernelCache> build() { return build(Options{}); }

  /// K_m(x) for m in {1, 2, 3}; x outside the table falls back to direct evaluation.
  double value(int m, double x) const;

  double achieved_accuracy() const noexcept { return achieved_; }
  bool meets_budget() const noexcept { return achieved_ <= options_.rel_accuracy; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return u_.size(); }
  const Options& options() const noexcept { return options_; }

 private:
  KernelCache() = default;
  void tabulate(double spacing);
  double interpolate(int m, double u) const;
  double measure_accuracy() const;

  Options options_;
  double u0_ = 0.0;
  double h_ = 0.0;
  std::vector<double> u_;
  std::array<std::vector<double>, 3> log_k_;
  std::array<std::vector<double>, 3> slope_;
  double achieved_ = 0.0;
};

}  // namespace degenlab
