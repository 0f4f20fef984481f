#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "degenlab/rational.hpp"

namespace degenlab {

/// Relative tolerance used for comparisons on the floating path.
inline constexpr double kFloatCompareTolerance = 1e-12;

/// A real number that remembers an exact rational value when it has one, or
/// that it is +infinity. Arithmetic stays exact as long as every operand is.
class Number {
 public:
  Number() = default;
  Number(const Rational& exact);  // NOLINT(google-explicit-constructor)
  static Number from_double(double v);
  static Number infinity();
  static Number integer(long long v) { return Number(Rational(v)); }

  /// "inf", "infinity", "3/2", "1.75", "8" are exact; anything else that
  /// parses as a double lands on the floating path.
  static Number parse(std::string_view text);

  bool is_infinite() const noexcept { return infinite_; }
  bool is_exact() const noexcept { return exact_.has_value() && !infinite_; }
  const std::optional<Rational>& exact() const noexcept { return exact_; }
  double value() const noexcept;

  /// 1/x with 1/inf = 0 exactly and 1/0 = inf.
  Number reciprocal() const;

  std::string to_string() const;

  friend Number operator+(const Number& a, const Number& b);
  friend Number operator-(const Number& a, const Number& b);
  friend Number operator*(const Number& a, const Number& b);
  friend Number operator/(const Number& a, const Number& b);

  /// Three-way comparison: exact when both sides are exact, otherwise with
  /// relative tolerance kFloatCompareTolerance (|a-b| within it counts as equal).
  friend int compare(const Number& a, const Number& b);

 private:
  double value_ = 0.0;
  std::optional<Rational> exact_;
  bool infinite_ = false;
};

inline bool strictly_less(const Number& a, const Number& b) { return compare(a, b) < 0; }
inline bool strictly_greater(const Number& a, const Number& b) { return compare(a, b) > 0; }
inline bool equal(const Number& a, const Number& b) { return compare(a, b) == 0; }
Number min(const Number& a, const Number& b);
Number max(const Number& a, const Number& b);

/// The tuple defining a regularity regime: dimension n, integrability of the
/// largest eigenvalue (p), of the inverse smallest eigenvalue (q), of the source
/// (s), and the norm exponent gamma of the local sup bound.
struct ProblemParams {
  int n = 3;
  Number p = Number::infinity();
  Number q = Number::integer(2);
  Number s = Number::infinity();
  Number gamma = Number::integer(2);

  /// Throws DomainError unless n >= 2, p > 1, q > 1 finite, s >= 1, gamma > 0.
  void validate() const;
};

/// A derived quantity; `defined` is false when its formula has a nonpositive
/// or zero denominator for the given parameters.
struct DerivedValue {
  bool defined = false;
  Number number;

  double value() const noexcept { return number.value(); }
  static DerivedValue undefined() { return {}; }
  static DerivedValue of(Number x) { return {true, std::move(x)}; }
};

struct ExponentFlags {
  bool cond_structure = false;        ///< 1/p + 1/q < 2/(n-1)
  bool cond_q_supercritical = false;  ///< q > n/2
  bool cond_s_admissible = false;     ///< s > s0 (false when s0 is undefined)
};

struct ExponentTable {
  DerivedValue p_star;
  DerivedValue p_prime;
  DerivedValue s_prime;
  DerivedValue chi;
  DerivedValue delta;
  DerivedValue m_star;
  DerivedValue s0;
  DerivedValue q_star;
  ExponentFlags flags;
  bool exact = false;  ///< every defined entry carries an exact rational
  /// "sharp" for n >= 3; "conjectural" for n = 2 where s0 = q/(q-1) is only
  /// known to be almost sharp.
  std::string sharpness_status;
};

ExponentTable derive_exponents(const ProblemParams& params);

enum class Regime {
  kBounded,
  kCriticalSource,
  kCriticalEigen,
  kSubcriticalEigen,
  kStructuralFail,
};

struct RegimeClassification {
  Regime regime = Regime::kStructuralFail;
  std::string applicable_result;
  std::string note;
};

RegimeClassification classify_regime(const ProblemParams& params);

std::string_view to_string(Regime regime);

/// Critical source exponent nq/(2q-n) evaluated on the floating path; NaN when q <= n/2.
double critical_source_exponent(int n, double q);

}  // namespace degenlab
