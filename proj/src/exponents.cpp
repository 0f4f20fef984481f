#include "degenlab/exponents.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "degenlab/errors.hpp"

namespace degenlab {

Number::Number(const Rational& exact) : value_(exact.to_double()), exact_(exact) {}

Number Number::from_double(double v) {
  if (std::isnan(v)) throw DomainError("NaN is not a valid exponent");
  if (std::isinf(v)) {
    if (v < 0) throw DomainError("negative infinity is not supported");
    return infinity();
  }
  Number x;
  x.value_ = v;
  return x;
}

Number Number::infinity() {
  Number x;
  x.infinite_ = true;
  x.value_ = std::numeric_limits<double>::infinity();
  return x;
}

Number Number::parse(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "inf" || lower == "+inf" || lower == "infinity" || lower == "+infinity") return infinity();
  if (auto r = Rational::parse(s)) return Number(*r);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("cannot parse number '" + s + "'");
  }
  if (used != s.size()) throw DomainError("cannot parse number '" + s + "'");
  return from_double(v);
}

double Number::value() const noexcept { return value_; }

Number Number::reciprocal() const {
  if (infinite_) return Number(Rational(0));
  if (exact_) {
    if (exact_->num() == 0) return infinity();
    if (auto r = Rational::div(Rational(1), *exact_)) return Number(*r);
  }
  if (value_ == 0.0) return infinity();
  return from_double(1.0 / value_);
}

std::string Number::to_string() const {
  if (infinite_) return "inf";
  if (exact_) return exact_->to_string();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

namespace {

template <class ExactOp, class FloatOp>
Number combine(const Number& a, const Number& b, ExactOp exact_op, FloatOp float_op) {
  if (a.is_exact() && b.is_exact()) {
    if (auto r = exact_op(*a.exact(), *b.exact())) return Number(*r);
  }
  return Number::from_double(float_op(a.value(), b.value()));
}

bool is_zero(const Number& x) { return !x.is_infinite() && x.value() == 0.0; }

}  // namespace

Number operator+(const Number& a, const Number& b) {
  if (a.is_infinite() || b.is_infinite()) {
    if ((a.is_infinite() && b.value() < 0 && std::isinf(b.value())) ||
        (b.is_infinite() && a.value() < 0 && std::isinf(a.value())))
      throw DomainError("inf - inf is undefined");
    return Number::infinity();
  }
  return combine(a, b, Rational::add, [](double x, double y) { return x + y; });
}

Number operator-(const Number& a, const Number& b) {
  if (b.is_infinite()) throw DomainError("subtracting infinity is not supported");
  if (a.is_infinite()) return Number::infinity();
  return combine(a, b, Rational::sub, [](double x, double y) { return x - y; });
}

Number operator*(const Number& a, const Number& b) {
  if (a.is_infinite() || b.is_infinite()) {
    const Number& other = a.is_infinite() ? b : a;
    if (is_zero(other)) throw DomainError("0 * inf is undefined");
    if (!other.is_infinite() && other.value() < 0) throw DomainError("negative infinity is not supported");
    return Number::infinity();
  }
  return combine(a, b, Rational::mul, [](double x, double y) { return x * y; });
}

Number operator/(const Number& a, const Number& b) {
  if (a.is_infinite() && b.is_infinite()) throw DomainError("inf / inf is undefined");
  if (b.is_infinite()) return Number(Rational(0));
  if (a.is_infinite()) {
    if (b.value() <= 0) throw DomainError("inf / nonpositive is not supported");
    return Number::infinity();
  }
  if (is_zero(b)) throw DomainError("division by zero");
  return combine(a, b, Rational::div, [](double x, double y) { return x / y; });
}

int compare(const Number& a, const Number& b) {
  if (a.is_infinite() || b.is_infinite()) {
    if (a.is_infinite() && b.is_infinite()) return 0;
    return a.is_infinite() ? 1 : -1;
  }
  if (a.is_exact() && b.is_exact()) return compare(*a.exact(), *b.exact());
  const double x = a.value();
  const double y = b.value();
  const double scale = std::max(std::abs(x), std::abs(y));
  if (std::abs(x - y) <= kFloatCompareTolerance * scale) return 0;
  return x < y ? -1 : 1;
}

Number min(const Number& a, const Number& b) { return compare(a, b) <= 0 ? a : b; }
Number max(const Number& a, const Number& b) { return compare(a, b) >= 0 ? a : b; }

void ProblemParams::validate() const {
  const Number one = Number::integer(1);
  if (n < 2) throw DomainError("dimension n must be >= 2, got " + std::to_string(n));
  if (compare(p, one) <= 0) throw DomainError("p must be > 1, got " + p.to_string());
  if (q.is_infinite()) throw DomainError("q must be finite");
  if (compare(q, one) <= 0) throw DomainError("q must be > 1, got " + q.to_string());
  if (compare(s, one) < 0) throw DomainError("s must be >= 1, got " + s.to_string());
  if (gamma.is_infinite() || compare(gamma, Number::integer(0)) <= 0)
    throw DomainError("gamma must be a finite positive number, got " + gamma.to_string());
}

ExponentTable derive_exponents(const ProblemParams& params) {
  params.validate();
  const Number one = Number::integer(1);
  const Number two = Number::integer(2);
  const Number half = Number(Rational(1, 2));
  const Number nn = Number::integer(params.n);
  const Number& p = params.p;
  const Number& q = params.q;
  const Number& s = params.s;
  const Number inv_p = p.reciprocal();
  const Number inv_q = q.reciprocal();

  ExponentTable t;
  const Number inv_p_star = min(half + Number::integer(params.n - 1).reciprocal() - inv_p * half, one);
  t.p_star = DerivedValue::of(inv_p_star.reciprocal());
  t.p_prime = DerivedValue::of(p.is_infinite() ? one : p / (p - one));
  if (s.is_infinite()) {
    t.s_prime = DerivedValue::of(one);
  } else if (equal(s, one)) {
    t.s_prime = DerivedValue::of(Number::infinity());
  } else {
    t.s_prime = DerivedValue::of(s / (s - one));
  }

  const Number chi = two * q / (q + one) * inv_p_star;
  t.chi = DerivedValue::of(chi);
  const Number delta = two - chi.reciprocal();
  t.delta = DerivedValue::of(delta);
  if (!equal(delta, one)) {
    const Number bracket = max(inv_p + inv_q, two * inv_q);
    t.m_star = DerivedValue::of(t.p_prime.number * delta / (delta - one) * bracket);
  }

  const Number s0_den = two * q - nn;
  if (strictly_greater(s0_den, Number::integer(0))) t.s0 = DerivedValue::of(nn * q / s0_den);
  // n(q+1) - 2q = q(n-2) + n is positive for every n >= 2, q > 0.
  t.q_star = DerivedValue::of(two * nn * q / (nn * (q + one) - two * q));

  t.flags.cond_structure = strictly_less(inv_p + inv_q, two / Number::integer(params.n - 1));
  t.flags.cond_q_supercritical = strictly_greater(q, nn * half);
  t.flags.cond_s_admissible = t.s0.defined && strictly_greater(s, t.s0.number);

  auto exact_or_inf = [](const Number& x) { return x.is_exact() || x.is_infinite(); };
  t.exact = exact_or_inf(p) && exact_or_inf(q) && exact_or_inf(s);
  t.sharpness_status = params.n == 2 ? "conjectural" : "sharp";
  return t;
}

RegimeClassification classify_regime(const ProblemParams& params) {
  const ExponentTable t = derive_exponents(params);
  const Number half_n = Number(Rational(params.n, 2));
  const Number lower = Number(Rational(params.n - 1, 2));
  RegimeClassification out;
  if (!t.flags.cond_structure) {
    out.regime = Regime::kStructuralFail;
    out.applicable_result = "outside the structural condition 1/p+1/q<2/(n-1); unbounded solutions with f=0 are known";
    return out;
  }
  const int vs_half = compare(params.q, half_n);
  if (vs_half > 0) {
    const int vs_s0 = compare(params.s, t.s0.number);
    if (vs_s0 > 0) {
      out.regime = Regime::kBounded;
      out.applicable_result = "local sup bound, logarithmic bound, Harnack inequality, Holder continuity";
    } else {
      out.regime = Regime::kCriticalSource;
      out.applicable_result = "counterexample EX1: f in L^{s0} with unbounded solution";
      if (vs_s0 < 0) out.note = "s below s0; EX1 still applies since L^{s0} embeds in L^s on bounded domains";
    }
  } else if (vs_half == 0) {
    out.regime = Regime::kCriticalEigen;
    out.applicable_result = "counterexample EX2: q = n/2, bounded f with unbounded solution";
  } else if (params.n >= 3 && strictly_greater(params.q, lower)) {
    out.regime = Regime::kSubcriticalEigen;
    out.applicable_result = "counterexample EX3: (n-1)/2 < q < n/2, bounded f with unbounded solution";
  } else {
    // Unreachable under the structural condition; kept for exhaustiveness.
    out.regime = Regime::kStructuralFail;
    out.applicable_result = "q <= (n-1)/2";
  }
  return out;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kBounded: return "BOUNDED";
    case Regime::kCriticalSource: return "CRITICAL_SOURCE";
    case Regime::kCriticalEigen: return "CRITICAL_EIGEN";
    case Regime::kSubcriticalEigen: return "SUBCRITICAL_EIGEN";
    case Regime::kStructuralFail: return "STRUCTURAL_FAIL";
  }
  return "UNKNOWN";
}

double critical_source_exponent(int n, double q) {
  const double den = 2.0 * q - n;
  if (!(den > 0)) return std::numeric_limits<double>::quiet_NaN();
  return n * q / den;
}

}  // namespace degenlab
