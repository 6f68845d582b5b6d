#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace fatou {

class UndefinedArithmetic : public std::runtime_error {
 public:
  explicit UndefinedArithmetic(const std::string& msg) : std::runtime_error(msg) {}
};

// A value in [-inf, +inf].  NaN is rejected at every entry point and
// (+inf) + (-inf) signals instead of propagating a quiet NaN.
class ExtendedReal {
 public:
  ExtendedReal() = default;
  ExtendedReal(double v) : v_(v) {
    if (std::isnan(v)) throw std::invalid_argument("ExtendedReal: NaN");
  }

  static ExtendedReal pos_inf() { return from_raw(kInf); }
  static ExtendedReal neg_inf() { return from_raw(-kInf); }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_pos_inf() const { return v_ == kInf; }
  bool is_neg_inf() const { return v_ == -kInf; }

  // Raw double; the infinities map to the IEEE infinities.
  double raw() const { return v_; }
  double finite_value() const {
    if (!is_finite()) throw UndefinedArithmetic("finite_value() on " + to_string());
    return v_;
  }

  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }
  friend bool operator!=(ExtendedReal a, ExtendedReal b) { return a.v_ != b.v_; }
  friend bool operator<(ExtendedReal a, ExtendedReal b) { return a.v_ < b.v_; }
  friend bool operator<=(ExtendedReal a, ExtendedReal b) { return a.v_ <= b.v_; }
  friend bool operator>(ExtendedReal a, ExtendedReal b) { return a.v_ > b.v_; }
  friend bool operator>=(ExtendedReal a, ExtendedReal b) { return a.v_ >= b.v_; }

  ExtendedReal operator-() const { return from_raw(-v_); }

  friend std::optional<ExtendedReal> try_add(ExtendedReal a, ExtendedReal b) {
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
      return std::nullopt;
    return from_raw(a.v_ + b.v_);
  }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    auto r = try_add(a, b);
    if (!r) throw UndefinedArithmetic("(+inf) + (-inf)");
    return *r;
  }

  friend ExtendedReal operator-(ExtendedReal a, ExtendedReal b) { return a + (-b); }

  // w * x with the measure convention 0 * (+-inf) = 0.
  friend ExtendedReal scale(double w, ExtendedReal x) {
    if (w == 0.0) return ExtendedReal(0.0);
    return from_raw(w * x.v_);
  }

  std::string to_string() const;

 private:
  static ExtendedReal from_raw(double v) {
    ExtendedReal r;
    r.v_ = v;
    return r;
  }
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double v_ = 0;
};

inline ExtendedReal min(ExtendedReal a, ExtendedReal b) { return a < b ? a : b; }
inline ExtendedReal max(ExtendedReal a, ExtendedReal b) { return a < b ? b : a; }

// Shortest round-trip decimal form; infinities print as "-inf"/"inf".
std::string format_double(double v);

}  // namespace fatou
