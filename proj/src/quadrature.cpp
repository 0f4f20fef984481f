#include "degenlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "degenlab/errors.hpp"
#include "degenlab/geometry.hpp"

namespace degenlab::quad {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae in [0, 1], symmetric).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
};

Panel gauss_kronrod(const std::function<double(double)>& g, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = g(center - dx);
    f2[j] = g(center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
  const double habs = std::abs(half);
  resabs *= habs;
  resasc *= habs;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk * half, err};
}

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

double budget(const AdaptiveOptions& o, double value) {
  return std::max(o.abs_tol, o.rel_tol * std::abs(value));
}

}  // namespace

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kConverged: return "converged";
    case Status::kNotConverged: return "not_converged";
    case Status::kDivergent: return "divergent";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kConvergent: return "CONVERGENT";
    case Verdict::kDivergent: return "DIVERGENT";
    case Verdict::kInconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

QuadratureResult QuadratureResult::divergence() {
  QuadratureResult r;
  r.value = std::numeric_limits<double>::infinity();
  r.error_estimate = 0.0;
  r.status = Status::kDivergent;
  r.converged = false;
  return r;
}

QuadratureResult combine(const QuadratureResult& a, const QuadratureResult& b) {
  if (a.divergent() || b.divergent()) return QuadratureResult::divergence();
  QuadratureResult r;
  r.value = a.value + b.value;
  r.error_estimate = a.error_estimate + b.error_estimate;
  r.tail_bound = a.tail_bound + b.tail_bound;
  r.nodes_used = a.nodes_used + b.nodes_used;
  r.converged = a.converged && b.converged;
  r.status = r.converged ? Status::kConverged : Status::kNotConverged;
  return r;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& g, double a, double b,
                                    const AdaptiveOptions& options, std::span<const double> breakpoints) {
  if (!(a <= b)) throw DomainError("integrate_adaptive: inverted interval");
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    out.status = Status::kConverged;
    return out;
  }
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  double total = 0.0;
  double total_err = 0.0;
  int panels = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gauss_kronrod(g, cuts[i], cuts[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
    ++panels;
  }
  while (total_err > budget(options, total) && panels < options.max_panels) {
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted at machine precision
    heap.pop();
    Panel left = gauss_kronrod(g, worst.a, mid);
    Panel right = gauss_kronrod(g, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  // Re-sum in left-to-right order so the result does not depend on heap history.
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  total = 0.0;
  total_err = 0.0;
  for (const Panel& p : all) {
    total += p.value;
    total_err += p.error;
  }
  out.value = total;
  out.error_estimate = total_err;
  out.nodes_used = 15 * static_cast<int>(all.size());
  out.converged = std::isfinite(total) && total_err <= budget(options, total);
  out.status = out.converged ? Status::kConverged : Status::kNotConverged;
  return out;
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& g, double a, const TailBound& tail,
                                       const AdaptiveOptions& options, std::span<const double> breakpoints) {
  if (!tail) throw DomainError("integrate_to_infinity: a tail bound is required");
  double span = 1.0;
  for (double c : breakpoints)
    if (c > a) span = std::max(span, 2.0 * (c - a));
  AdaptiveOptions inner = options;
  inner.rel_tol = 0.9 * options.rel_tol;
  inner.abs_tol = 0.9 * options.abs_tol;
  std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
  QuadratureResult body;
  double tail_value = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double T = a + span;
    body = integrate_adaptive(g, a, T, inner, cuts);
    tail_value = tail(T);
    if (std::isfinite(tail_value) && tail_value <= 0.1 * budget(options, body.value)) break;
    cuts.push_back(T);
    span *= 2.0;
    if (!std::isfinite(T) || span > 1e15) break;
  }
  QuadratureResult out = body;
  out.tail_bound = std::isfinite(tail_value) ? tail_value : std::numeric_limits<double>::infinity();
  out.converged = body.converged && std::isfinite(out.tail_bound) &&
                  out.error_estimate + out.tail_bound <= budget(options, out.value);
  out.status = out.converged ? Status::kConverged : Status::kNotConverged;
  return out;
}

bool power_log_converges_at_origin(double a, double b) {
  constexpr double edge = 1e-12;
  if (a > -1.0 + edge) return true;
  if (a < -1.0 - edge) return false;
  return b < -1.0 - edge;
}

QuadratureResult integrate_radial_power_log(double a, double b, double r_lo, double r_hi, double tol) {
  if (!(tol > 0)) throw DomainError("integrate_radial_power_log: tolerance must be positive");
  if (!(r_hi <= 0.5)) throw DomainError("integrate_radial_power_log: r_hi must be <= 1/2 (log singularity at r=1)");
  if (!(r_lo >= 0.0) || !(r_lo <= r_hi)) throw DomainError("integrate_radial_power_log: need 0 <= r_lo <= r_hi");
  if (r_lo == 0.0 && !power_log_converges_at_origin(a, b)) return QuadratureResult::divergence();

  const double c = a + 1.0;
  auto h = [c, b](double t) { return std::exp(-c * t + b * std::log(t)); };
  AdaptiveOptions opts;
  opts.rel_tol = tol;
  const double t_lo = -std::log(r_hi);
  if (r_lo > 0.0) return integrate_adaptive(h, t_lo, -std::log(r_lo), opts);

  if (std::abs(c) <= 1e-12) {
    // Pure power of t: the tail beyond T is T^{b+1}/(-b-1) in closed form.
    const double T = std::max(2.0 * t_lo, t_lo + 16.0);
    opts.rel_tol = 0.5 * tol;
    QuadratureResult body = integrate_adaptive(h, t_lo, T, opts);
    const double tail = std::pow(T, b + 1.0) / (-b - 1.0);
    body.value += tail;
    body.tail_bound = 4.0 * std::numeric_limits<double>::epsilon() * tail;
    body.converged = body.converged && body.error_estimate + body.tail_bound <= tol * std::abs(body.value);
    body.status = body.converged ? Status::kConverged : Status::kNotConverged;
    return body;
  }
  TailBound tail = [c, b](double T) {
    const double head = std::exp(-c * T + b * std::log(T));
    if (b <= 0.0) return head / c;
    const double rate = c - b / T;
    return rate > 0.0 ? head / rate : std::numeric_limits<double>::infinity();
  };
  std::vector<double> cuts;
  if (b > 0.0 && b / c > t_lo) cuts.push_back(b / c);  // peak of t^b e^{-ct}
  return integrate_to_infinity(h, t_lo, tail, opts, cuts);
}

QuadratureResult integrate_radial(const std::function<double(double)>& g, double r_lo, double r_hi, double tol,
                                  const TailBound& tail_in_t, std::span<const double> radial_breakpoints) {
  if (!(r_lo >= 0.0) || !(r_lo <= r_hi) || !(r_hi > 0.0)) throw DomainError("integrate_radial: need 0 <= r_lo <= r_hi, r_hi > 0");
  auto h = [&g](double t) {
    const double r = std::exp(-t);
    return g(r) * r;
  };
  std::vector<double> cuts;
  for (double r : radial_breakpoints)
    if (r > r_lo && r < r_hi) cuts.push_back(-std::log(r));
  AdaptiveOptions opts;
  opts.rel_tol = tol;
  const double t_lo = -std::log(r_hi);
  if (r_lo > 0.0) return integrate_adaptive(h, t_lo, -std::log(r_lo), opts, cuts);
  if (!tail_in_t) throw DomainError("integrate_radial: integration to the origin needs a tail bound");
  return integrate_to_infinity(h, t_lo, tail_in_t, opts, cuts);
}

NormLadderTable nested_norm_integral(const std::function<double(double)>& f, double s, int n, double R,
                                     std::span<const double> cutoffs, const NormLadderOptions& options,
                                     const AsymptoticExponents* structural_hint) {
  if (!(s >= 1.0)) throw DomainError("nested_norm_integral: s must be >= 1");
  if (n < 1) throw DomainError("nested_norm_integral: dimension must be >= 1");
  if (!(R > 0.0)) throw DomainError("nested_norm_integral: R must be positive");
  if (cutoffs.empty()) throw DomainError("nested_norm_integral: empty cutoff sequence");
  double previous = R;
  for (double c : cutoffs) {
    if (!(c > 0.0) || !(c < previous))
      throw DomainError("nested_norm_integral: cutoffs must be positive, below R and strictly decreasing");
    previous = c;
  }

  NormLadderTable table;
  table.s = s;
  table.n = n;
  table.R = R;
  const double area = sphere_area(n);
  auto integrand = [&](double r) { return std::pow(std::abs(f(r)), s) * std::pow(r, n - 1); };
  double partial = 0.0;
  double upper = R;
  for (double c : cutoffs) {
    const QuadratureResult piece = integrate_radial(integrand, c, upper, options.tol);
    NormLadderRow row;
    row.cutoff = c;
    row.increment = area * piece.value;
    partial += row.increment;
    row.partial = partial;
    row.relative_increment = partial != 0.0 ? row.increment / partial : 0.0;
    row.piece_error = area * piece.error_estimate;
    table.rows.push_back(row);
    upper = c;
  }

  const auto& rows = table.rows;
  const std::size_t m = rows.size();
  const int window = std::max(2, options.growth_window);
  bool growing = m >= static_cast<std::size_t>(window) + 1;
  for (std::size_t k = m >= static_cast<std::size_t>(window) ? m - window + 1 : 1; growing && k < m; ++k)
    growing = rows[k].increment > rows[k - 1].increment;
  if (growing) {
    table.empirical = Verdict::kDivergent;
  } else if (m >= 2 && rows.back().relative_increment < options.convergence_threshold &&
             rows[m - 1].increment <= rows[m - 2].increment) {
    table.empirical = Verdict::kConvergent;
  } else {
    table.empirical = Verdict::kInconclusive;
  }
  if (structural_hint != nullptr) {
    table.has_structural = true;
    table.structural = power_log_converges_at_origin(structural_hint->a, structural_hint->b) ? Verdict::kConvergent
                                                                                              : Verdict::kDivergent;
    table.verdict = table.structural;
  } else {
    table.verdict = table.empirical;
  }
  return table;
}

}  // namespace degenlab::quad
