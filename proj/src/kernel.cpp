#include "degenlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "degenlab/errors.hpp"
#include "degenlab/parallel.hpp"

namespace degenlab {

using quad::QuadratureResult;

void KernelSpec::validate() const {
  if (m < 1 || m > 3) throw DomainError("kernel power m must be 1, 2 or 3, got " + std::to_string(m));
  if (!(x_norm >= 0.0) || !std::isfinite(x_norm)) throw DomainError("kernel radius |x| must be finite and >= 0");
  if (!(outer_radius > 0.0 && outer_radius <= 0.5)) throw DomainError("kernel outer radius must lie in (0, 1/2]");
}

namespace {

// Integrand in t = log(1/r): e^{-t} (x + e^{-t})^{-m} / t.
auto kernel_integrand(int m, double x) {
  return [m, x](double t) {
    const double r = std::exp(-t);
    return r * std::pow(x + r, -m) / t;
  };
}

quad::TailBound kernel_tail(int m, double x) {
  return [m, x](double T) { return std::pow(x, -m) * std::exp(-T) / T; };
}

std::vector<double> kernel_breakpoints(double x, double t_lo) {
  std::vector<double> cuts;
  const double tx = -std::log(x);
  for (double c : {tx - 4.0, tx, tx + 4.0})
    if (c > t_lo) cuts.push_back(c);
  return cuts;
}

}  // namespace

QuadratureResult kernel_direct(int m, double x_norm, double tol, double outer_radius) {
  if (m < 1) throw DomainError("kernel power must be positive");
  if (!(outer_radius > 0.0 && outer_radius <= 0.5)) throw DomainError("kernel outer radius must lie in (0, 1/2]");
  if (!(x_norm >= 0.0)) throw DomainError("kernel radius must be >= 0");
  if (x_norm == 0.0) return QuadratureResult::divergence();
  quad::AdaptiveOptions opts;
  opts.rel_tol = tol;
  const double t_lo = -std::log(outer_radius);
  return quad::integrate_to_infinity(kernel_integrand(m, x_norm), t_lo, kernel_tail(m, x_norm), opts,
                                     kernel_breakpoints(x_norm, t_lo));
}

KernelEvaluation eval_kernel(const KernelSpec& spec, double tol) {
  spec.validate();
  if (!(tol > 0.0)) throw DomainError("kernel tolerance must be positive");
  KernelEvaluation out;
  if (spec.x_norm == 0.0) {
    out.direct = out.inner = out.outer = QuadratureResult::divergence();
    return out;
  }
  const int m = spec.m;
  const double x = spec.x_norm;
  out.direct = kernel_direct(m, x, tol, spec.outer_radius);

  quad::AdaptiveOptions opts;
  opts.rel_tol = tol;
  const double t_lo = -std::log(spec.outer_radius);
  const double t_split = 0.5 * -std::log(x);
  auto g = kernel_integrand(m, x);
  if (t_split > t_lo) {
    out.outer = quad::integrate_adaptive(g, t_lo, t_split, opts);
    auto cuts = kernel_breakpoints(x, t_split);
    out.inner = quad::integrate_to_infinity(g, t_split, kernel_tail(m, x), opts, cuts);
  } else {
    out.outer = QuadratureResult{};
    out.outer.converged = true;
    out.outer.status = quad::Status::kConverged;
    out.inner = out.direct;
  }
  const double gap = std::abs(out.direct.value - (out.inner.value + out.outer.value));
  const double budget = 2.0 * (out.direct.error_estimate + out.direct.tail_bound + out.inner.error_estimate +
                               out.inner.tail_bound + out.outer.error_estimate);
  out.split_consistent = gap <= budget;

  if (m == 3 && x < 0.25 && spec.outer_radius == 0.5) {
    KernelSplitBounds b;
    b.inner_bound = 1.0 / (x * x * std::log(1.0 / x));
    b.outer_bound = std::pow(x, -1.5) / (2.0 * std::numbers::ln2);
    b.respected = out.inner.value <= b.inner_bound && out.outer.value <= b.outer_bound;
    out.bounds = b;
  }
  return out;
}

std::shared_ptr<const KernelCache> KernelCache::build(const Options& options) {
  if (!(options.spacing > 0.0) || !(options.u_max > std::numbers::ln2) || !(options.rel_accuracy > 0.0))
    throw DomainError("invalid kernel cache options");
  std::shared_ptr<KernelCache> cache(new KernelCache());
  cache->options_ = options;
  double h = options.spacing;
  for (int attempt = 0;; ++attempt) {
    cache->tabulate(h);
    cache->achieved_ = cache->measure_accuracy();
    if (cache->achieved_ <= options.rel_accuracy || attempt >= options.max_refinements) break;
    h *= 0.5;
  }
  return cache;
}

void KernelCache::tabulate(double spacing) {
  u0_ = std::numbers::ln2;
  const auto count = static_cast<std::size_t>(std::ceil((options_.u_max - u0_) / spacing)) + 1;
  h_ = (options_.u_max - u0_) / static_cast<double>(count - 1);
  u_.assign(count, 0.0);
  for (auto& v : log_k_) v.assign(count, 0.0);
  for (auto& v : slope_) v.assign(count, 0.0);
  const double tol = std::max(1e-14, 0.01 * options_.rel_accuracy);
  parallel_for(count, [&](std::size_t i) {
    const double u = u0_ + h_ * static_cast<double>(i);
    const double x = std::exp(-u);
    u_[i] = u;
    std::array<double, 4> k{};
    for (int m = 1; m <= 4; ++m) k[m - 1] = kernel_direct(m, x, tol).value;
    for (int m = 1; m <= 3; ++m) {
      log_k_[m - 1][i] = std::log(k[m - 1]);
      slope_[m - 1][i] = m * x * k[m] / k[m - 1];
    }
  });
  // Fritsch-Carlson limiter on the exact slopes.
  for (int m = 0; m < 3; ++m) {
    auto& y = log_k_[m];
    auto& d = slope_[m];
    for (std::size_t i = 0; i + 1 < count; ++i) {
      const double delta = (y[i + 1] - y[i]) / h_;
      if (delta == 0.0) {
        d[i] = d[i + 1] = 0.0;
        continue;
      }
      const double a = d[i] / delta;
      const double b = d[i + 1] / delta;
      if (a < 0.0) d[i] = 0.0;
      if (b < 0.0) d[i + 1] = 0.0;
      const double r2 = a * a + b * b;
      if (r2 > 9.0) {
        const double tau = 3.0 / std::sqrt(r2);
        d[i] = tau * a * delta;
        d[i + 1] = tau * b * delta;
      }
    }
  }
}

double KernelCache::interpolate(int m, double u) const {
  const auto& y = log_k_[m - 1];
  const auto& d = slope_[m - 1];
  double pos = (u - u0_) / h_;
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i >= u_.size() - 1) i = u_.size() - 2;
  const double s = pos - static_cast<double>(i);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return std::exp(h00 * y[i] + h10 * h_ * d[i] + h01 * y[i + 1] + h11 * h_ * d[i + 1]);
}

double KernelCache::value(int m, double x) const {
  if (m < 1 || m > 3) throw DomainError("kernel cache holds m = 1, 2, 3 only");
  if (!(x > 0.0)) throw DomainError("kernel cache needs |x| > 0");
  const double u = -std::log(x);
  if (u < u0_ || u > options_.u_max) return kernel_direct(m, x, std::max(1e-14, 0.01 * options_.rel_accuracy)).value;
  return interpolate(m, u);
}

double KernelCache::measure_accuracy() const {
  double worst = 0.0;
  const std::size_t stride = 7;
  const double tol = std::max(1e-14, 0.01 * options_.rel_accuracy);
  for (std::size_t i = 0; i + 1 < u_.size(); i += stride) {
    const double u = u_[i] + 0.5 * h_;
    const double x = std::exp(-u);
    for (int m = 1; m <= 3; ++m) {
      const double exact = kernel_direct(m, x, tol).value;
      worst = std::max(worst, std::abs(interpolate(m, u) / exact - 1.0));
    }
  }
  return worst;
}

}  // namespace degenlab
