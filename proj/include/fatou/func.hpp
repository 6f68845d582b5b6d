#pragma once

#include <functional>
#include <optional>
#include <string>

#include "fatou/extended_real.hpp"
#include "fatou/point.hpp"

namespace fatou {

// Extended-real-valued function on the space.  The antiderivative, when
// present, is a primitive of the finite part of eval and unlocks closed-form
// integration against constant densities.  Declared bounds are promises made
// by the constructor; consumers probe them where cheap.
struct Func {
  std::function<ExtendedReal(const Point&)> eval;
  std::optional<std::function<double(double)>> antiderivative;
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  bool continuous = false;
  std::string label;

  ExtendedReal operator()(const Point& p) const { return eval(p); }

  static Func constant(double c, std::string label = "");
  Func negated() const;
};

// Sequence of extended-real-valued functions f_n, n >= 1.  Bounds are uniform
// over n.  stable_after = k means f_n == f_k pointwise for all n >= k, which
// turns sampled tail extrema into exact ones.
struct FunctionSeq {
  std::function<ExtendedReal(int, const Point&)> eval;
  // Antiderivative of f_n in s, when available, for closed-form integrals.
  std::optional<std::function<double(int, double)>> antiderivative;
  std::optional<double> known_lower_bound;
  std::optional<double> known_upper_bound;
  std::optional<int> stable_after;
  bool continuous = false;  // every member continuous on the space
  std::string label;

  ExtendedReal operator()(int n, const Point& p) const { return eval(n, p); }

  // Single function with n fixed; bounds carry over.
  Func at(int n) const;
  FunctionSeq negated() const;

  static FunctionSeq constant_in_n(Func f);
};

// f - g with extended-real subtraction; g must be real-valued wherever f is
// infinite.  Bounds combine when both sides declare them.
FunctionSeq seq_difference(const FunctionSeq& f, const FunctionSeq& g);

// min(f_n, lambda) pointwise; upper bound becomes min(old, lambda).
FunctionSeq truncate(const FunctionSeq& f, double lambda);

}  // namespace fatou
