#include "fatou/rational.hpp"

#include <cmath>
#include <sstream>

namespace fatou {

namespace {

using I128 = __int128;

std::int64_t narrow(I128 v) {
  if (v > I128(INT64_MAX) || v < I128(INT64_MIN)) throw RationalOverflow("rational component exceeds 64 bits");
  return static_cast<std::int64_t>(v);
}

I128 gcd128(I128 a, I128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    I128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational reduced(I128 n, I128 d) {
  if (d == 0) throw RationalOverflow("zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  I128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  return Rational(narrow(n), narrow(d));
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw RationalOverflow("zero denominator");
  I128 nn = n, dd = d;
  if (dd < 0) {
    nn = -nn;
    dd = -dd;
  }
  I128 g = gcd128(nn, dd);
  if (g > 1) {
    nn /= g;
    dd /= g;
  }
  num_ = narrow(nn);
  den_ = narrow(dd);
}

bool operator<(const Rational& a, const Rational& b) {
  return I128(a.num_) * b.den_ < I128(b.num_) * a.den_;
}

Rational operator+(const Rational& a, const Rational& b) {
  return reduced(I128(a.num_) * b.den_ + I128(b.num_) * a.den_, I128(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return reduced(I128(a.num_) * b.den_ - I128(b.num_) * a.den_, I128(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return reduced(I128(a.num_) * b.num_, I128(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw RationalOverflow("division by zero rational");
  return reduced(I128(a.num_) * b.den_, I128(a.den_) * b.num_);
}

Rational Rational::operator-() const { return Rational(-num_, den_); }

std::int64_t Rational::floor() const {
  if (num_ >= 0) return num_ / den_;
  return static_cast<std::int64_t>(-(((-I128(num_)) + den_ - 1) / den_));
}

std::string Rational::to_string() const {
  std::ostringstream os;
  os << num_;
  if (den_ != 1) os << '/' << den_;
  return os.str();
}

std::optional<Rational> Rational::from_double_exact(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  if (v == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(v, &exp);
  for (int i = 0; i < 60 && mant != std::trunc(mant); ++i) {
    mant *= 2.0;
    --exp;
  }
  if (mant != std::trunc(mant)) return std::nullopt;
  if (std::abs(mant) > 9.0e18) return std::nullopt;
  auto n = static_cast<std::int64_t>(mant);
  if (exp >= 0) {
    if (exp > 62) return std::nullopt;
    I128 scaled = I128(n) << exp;
    if (scaled > I128(INT64_MAX) || scaled < I128(INT64_MIN)) return std::nullopt;
    return Rational(static_cast<std::int64_t>(scaled), 1);
  }
  if (exp < -62) return std::nullopt;
  return Rational(n, static_cast<std::int64_t>(std::int64_t(1) << (-exp)));
}

}  // namespace fatou
