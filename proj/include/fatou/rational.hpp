#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace fatou {

class RationalOverflow : public std::runtime_error {
 public:
  explicit RationalOverflow(const std::string& msg) : std::runtime_error(msg) {}
};

// Exact rational with 64-bit components, always normalized, denominator > 0.
// Arithmetic goes through 128-bit intermediates and throws when the reduced
// result does not fit.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }
  std::string to_string() const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;

  // Exact value of a double whose significand/exponent fit 64-bit components.
  static std::optional<Rational> from_double_exact(double v);

  // Floor of the rational as an integer.
  std::int64_t floor() const;

 private:
  std::int64_t num_, den_;
};

struct RationalHash {
  std::size_t operator()(const Rational& r) const {
    std::size_t h = std::hash<std::int64_t>{}(r.num());
    return h ^ (std::hash<std::int64_t>{}(r.den()) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
  }
};

}  // namespace fatou
