#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "fatou/extended_real.hpp"
#include "fatou/rational.hpp"

namespace fatou {

// A location in the underlying space: a double plus an exact rational
// representation when one is known.  Comparison uses the exact form when both
// sides carry one and falls back to a 1e-15 tolerance otherwise.
struct Point {
  double value = 0;
  std::optional<Rational> exact;

  Point() = default;
  Point(double v) : value(v) {}
  Point(const Rational& r) : value(r.to_double()), exact(r) {}
  Point(double v, const Rational& r) : value(v), exact(r) {}

  bool same_location(const Point& other) const {
    if (exact && other.exact) return *exact == *other.exact;
    return std::fabs(value - other.value) <= 1e-15;
  }

  std::string to_string() const {
    if (exact) return exact->to_string();
    return format_double(value);
  }
};

}  // namespace fatou
