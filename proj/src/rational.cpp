#include "degenlab/rational.hpp"

#include <cctype>
#include <limits>

#include "degenlab/errors.hpp"

namespace degenlab {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  auto r = from_wide(num, den);
  if (!r) throw DomainError("rational out of range");
  *this = *r;
}

std::optional<Rational> Rational::from_wide(__int128 num, __int128 den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr auto lo = static_cast<__int128>(std::numeric_limits<std::int64_t>::min());
  constexpr auto hi = static_cast<__int128>(std::numeric_limits<std::int64_t>::max());
  if (num < lo || num > hi || den > hi) return std::nullopt;
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

std::optional<Rational> Rational::add(const Rational& a, const Rational& b) {
  return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                   static_cast<__int128>(a.den_) * b.den_);
}

std::optional<Rational> Rational::sub(const Rational& a, const Rational& b) {
  return from_wide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                   static_cast<__int128>(a.den_) * b.den_);
}

std::optional<Rational> Rational::mul(const Rational& a, const Rational& b) {
  return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

std::optional<Rational> Rational::div(const Rational& a, const Rational& b) {
  if (b.num_ == 0) return std::nullopt;
  return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

int compare(const Rational& a, const Rational& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> Rational::parse(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    auto num = parse(text.substr(0, slash));
    auto den = parse(text.substr(slash + 1));
    if (!num || !den) return std::nullopt;
    return div(*num, *den);
  }
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  __int128 num = 0;
  __int128 den = 1;
  bool seen_digit = false;
  bool seen_point = false;
  constexpr __int128 limit = static_cast<__int128>(1) << 100;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.' && !seen_point) {
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    seen_digit = true;
    num = num * 10 + (c - '0');
    if (seen_point) den *= 10;
    if (num > limit || den > limit) return std::nullopt;
  }
  if (!seen_digit) return std::nullopt;
  return from_wide(negative ? -num : num, den);
}

}  // namespace degenlab
