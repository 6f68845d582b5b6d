#pragma once

#include "fatou/bracket.hpp"
#include "fatou/measure.hpp"

namespace fatou {

struct QuadConfig {
  double abs_tol = 1e-9;
  int max_depth = 40;
  double divergence_cutoff = 1e12;
  bool use_antiderivatives = true;
};

enum class DivergedPart { none, positive, negative, both };

// Integral of an extended-real function against a probability measure.
// `value` is the extended-real result; `defined` is false exactly when both
// the positive and the negative part diverge.  `heuristic` marks results whose
// improper-tail classification relied on the geometric growth test.
struct IntegralValue {
  ExtendedReal value = 0.0;
  Bracket bracket = Bracket::exact(0.0);
  bool defined = true;
  DivergedPart diverged = DivergedPart::none;
  bool heuristic = false;
};

// Atoms contribute exact weighted sums.  Pieces integrate by adaptive
// bisection with an embedded two-rule error estimate; an endpoint where the
// integrand blows up is handled by a geometrically shrinking tail ladder.
// Intervals still unresolved at max_depth widen the bracket instead of
// aborting.  When f carries an antiderivative and the piece density is
// constant, the closed form is used and the bracket has rounding width only.
IntegralValue integrate(const Func& f, const Measure& mu, const QuadConfig& cfg = {});

// Positive and negative parts f+ = max(f, 0), f- = max(-f, 0); bounds and
// antiderivatives do not carry over (the parts lose them at the kink).
std::pair<Func, Func> split_parts(const Func& f);

// Divergence classification of the two parts, without the full value.
DivergedPart divergence_probe(const Func& f, const Measure& mu, const QuadConfig& cfg = {});

// Integrals of several integrands over one measure on a shared refinement
// (driven by the last member).  With positive quadrature weights and shared
// nodes, pointwise-ordered integrands get exactly ordered values, which makes
// monotone families (e.g. truncations by rising lambda) come out monotone.
std::vector<IntegralValue> integrate_family_shared(const std::vector<Func>& fs, const Measure& mu,
                                                   const QuadConfig& cfg = {});

}  // namespace fatou
