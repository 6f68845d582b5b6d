#include "fatou/func.hpp"

#include <algorithm>

namespace fatou {

Func Func::constant(double c, std::string label) {
  Func f;
  f.eval = [c](const Point&) { return ExtendedReal(c); };
  f.antiderivative = [c](double x) { return c * x; };
  f.lower_bound = c;
  f.upper_bound = c;
  f.continuous = true;
  f.label = std::move(label);
  return f;
}

Func Func::negated() const {
  Func g;
  auto base = eval;
  g.eval = [base](const Point& p) { return -base(p); };
  if (antiderivative) {
    auto anti = *antiderivative;
    g.antiderivative = [anti](double x) { return -anti(x); };
  }
  if (upper_bound) g.lower_bound = -*upper_bound;
  if (lower_bound) g.upper_bound = -*lower_bound;
  g.continuous = continuous;
  g.label = label.empty() ? "" : "-(" + label + ")";
  return g;
}

Func FunctionSeq::at(int n) const {
  Func f;
  auto base = eval;
  f.eval = [base, n](const Point& p) { return base(n, p); };
  if (antiderivative) {
    auto anti = *antiderivative;
    f.antiderivative = [anti, n](double x) { return anti(n, x); };
  }
  f.lower_bound = known_lower_bound;
  f.upper_bound = known_upper_bound;
  f.continuous = continuous;
  f.label = label;
  return f;
}

FunctionSeq FunctionSeq::negated() const {
  FunctionSeq g;
  auto base = eval;
  g.eval = [base](int n, const Point& p) { return -base(n, p); };
  if (antiderivative) {
    auto anti = *antiderivative;
    g.antiderivative = [anti](int n, double x) { return -anti(n, x); };
  }
  if (known_upper_bound) g.known_lower_bound = -*known_upper_bound;
  if (known_lower_bound) g.known_upper_bound = -*known_lower_bound;
  g.stable_after = stable_after;
  g.continuous = continuous;
  g.label = label.empty() ? "" : "-(" + label + ")";
  return g;
}

FunctionSeq FunctionSeq::constant_in_n(Func f) {
  FunctionSeq s;
  auto base = f.eval;
  s.eval = [base](int, const Point& p) { return base(p); };
  if (f.antiderivative) {
    auto anti = *f.antiderivative;
    s.antiderivative = [anti](int, double x) { return anti(x); };
  }
  s.known_lower_bound = f.lower_bound;
  s.known_upper_bound = f.upper_bound;
  s.stable_after = 1;
  s.continuous = f.continuous;
  s.label = f.label;
  return s;
}

FunctionSeq seq_difference(const FunctionSeq& f, const FunctionSeq& g) {
  FunctionSeq d;
  auto fe = f.eval;
  auto ge = g.eval;
  d.eval = [fe, ge](int n, const Point& p) { return fe(n, p) - ge(n, p); };
  if (f.antiderivative && g.antiderivative) {
    auto fa = *f.antiderivative;
    auto ga = *g.antiderivative;
    d.antiderivative = [fa, ga](int n, double x) { return fa(n, x) - ga(n, x); };
  }
  if (f.known_lower_bound && g.known_upper_bound)
    d.known_lower_bound = *f.known_lower_bound - *g.known_upper_bound;
  if (f.known_upper_bound && g.known_lower_bound)
    d.known_upper_bound = *f.known_upper_bound - *g.known_lower_bound;
  if (f.stable_after && g.stable_after)
    d.stable_after = std::max(*f.stable_after, *g.stable_after);
  d.continuous = f.continuous && g.continuous;
  d.label = f.label + " - " + g.label;
  return d;
}

FunctionSeq truncate(const FunctionSeq& f, double lambda) {
  FunctionSeq t;
  auto base = f.eval;
  t.eval = [base, lambda](int n, const Point& p) {
    return min(base(n, p), ExtendedReal(lambda));
  };
  t.known_lower_bound = f.known_lower_bound;
  if (t.known_lower_bound && *t.known_lower_bound > lambda) t.known_lower_bound = lambda;
  t.known_upper_bound =
      f.known_upper_bound ? std::min(*f.known_upper_bound, lambda) : lambda;
  t.stable_after = f.stable_after;
  t.continuous = f.continuous;
  t.label = "min(" + f.label + ", " + format_double(lambda) + ")";
  return t;
}

}  // namespace fatou
