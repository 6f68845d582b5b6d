#include "fatou/converge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fatou/parallel.hpp"
#include "fatou/rational.hpp"

namespace fatou {

namespace {

double unit_draw(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

struct LinearProfile {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> cum;  // integral of the profile from xs[0] to xs[i]

  double value(double x) const {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + t * (ys[i + 1] - ys[i]);
  }

  double integral_to(double x) const {
    if (x <= xs.front()) return ys.front() * (x - xs.front());
    if (x >= xs.back()) return cum.back() + ys.back() * (x - xs.back());
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    double dx = x - xs[i];
    double slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    return cum[i] + ys[i] * dx + 0.5 * slope * dx * dx;
  }
};

Func profile_func(LinearProfile profile, double sup_bound, std::string label) {
  auto shared = std::make_shared<LinearProfile>(std::move(profile));
  Func f;
  f.eval = [shared](const Point& p) { return ExtendedReal(shared->value(p.value)); };
  f.antiderivative = [shared](double x) { return shared->integral_to(x); };
  f.lower_bound = -sup_bound;
  f.upper_bound = sup_bound;
  f.continuous = true;
  f.label = std::move(label);
  return f;
}

struct IntervalSet {
  Rational lo, hi;
  bool lo_open = false, hi_open = false;

  bool contains(const Point& p) const {
    if (p.exact) {
      bool above = lo_open ? *p.exact > lo : *p.exact >= lo;
      bool below = hi_open ? *p.exact < hi : *p.exact <= hi;
      return above && below;
    }
    double a = lo.to_double(), b = hi.to_double();
    bool above = lo_open ? p.value > a : p.value >= a;
    bool below = hi_open ? p.value < b : p.value <= b;
    return above && below;
  }
};

std::string set_label(const IntervalSet& set) {
  std::ostringstream os;
  if (set.lo == set.hi && !set.lo_open && !set.hi_open) {
    os << "ind(s == " << set.lo.to_string() << ")";
    return os.str();
  }
  os << "ind(s in " << (set.lo_open ? '(' : '[') << set.lo.to_string() << ", "
     << set.hi.to_string() << (set.hi_open ? ')' : ']');
  os << ")";
  return os.str();
}

Func indicator_func(const IntervalSet& set) {
  Func f;
  IntervalSet s = set;
  f.eval = [s](const Point& p) { return ExtendedReal(s.contains(p) ? 1.0 : 0.0); };
  double a = set.lo.to_double(), b = set.hi.to_double();
  f.antiderivative = [a, b](double x) { return std::clamp(x, a, b) - a; };
  f.lower_bound = 0.0;
  f.upper_bound = 1.0;
  f.continuous = false;
  f.label = set_label(set);
  return f;
}

FunctionDiag diagnose(const Func& f, const MeasureSeq& mu_seq, const Measure& mu,
                      const std::vector<int>& n_probe, double tol, const QuadConfig& quad) {
  FunctionDiag diag;
  diag.label = f.label;
  IntegralValue base = integrate(f, mu, quad);
  bool usable = base.defined && base.value.is_finite();
  for (int n : n_probe) {
    IntegralValue in = integrate(f, mu_seq(n), quad);
    usable = usable && in.defined && in.value.is_finite();
    double gap = usable ? std::fabs(in.value.raw() - base.value.raw())
                        : std::numeric_limits<double>::infinity();
    diag.gaps.emplace_back(n, gap);
  }
  if (!usable) {
    diag.final_gap = std::numeric_limits<double>::infinity();
    diag.verdict = ConvergenceVerdict::inconclusive;
    return diag;
  }
  diag.final_gap = diag.gaps.back().second;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& [n, gap] : diag.gaps) {
    // Gaps at rounding-noise level would enter the log fit as huge outliers.
    if (gap <= 1e-12) continue;
    double x = std::log(static_cast<double>(n));
    double y = std::log(gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  double denom = m >= 2 ? m * sxx - sx * sx : 0;
  diag.slope = denom > 1e-12 ? (m * sxy - sx * sy) / denom : 0.0;

  if (diag.final_gap < tol || diag.slope < -0.1) {
    diag.verdict = ConvergenceVerdict::consistent;
  } else if (diag.slope > -0.02) {
    diag.verdict = ConvergenceVerdict::falsified;
  } else {
    diag.verdict = ConvergenceVerdict::inconclusive;
  }
  return diag;
}

ConvergenceReport run_check(ConvergenceReport::Mode mode, const MeasureSeq& mu_seq,
                            const Measure& mu, const TestFamily& family,
                            const std::vector<int>& n_probe, double tol, const QuadConfig& quad) {
  ConvergenceReport report;
  report.mode = mode;
  report.per_function.resize(family.members.size());
  parallel_for(family.members.size(), [&](std::size_t i) {
    report.per_function[i] = diagnose(family.members[i], mu_seq, mu, n_probe, tol, quad);
  });
  report.verdict = ConvergenceVerdict::consistent;
  for (const FunctionDiag& d : report.per_function) {
    if (d.verdict == ConvergenceVerdict::falsified) {
      report.verdict = ConvergenceVerdict::falsified;
      if (!report.witness) report.witness = d.label;
    } else if (d.verdict == ConvergenceVerdict::inconclusive &&
               report.verdict == ConvergenceVerdict::consistent) {
      report.verdict = ConvergenceVerdict::inconclusive;
    }
  }
  return report;
}

}  // namespace

TestFamily TestFamily::bounded_lipschitz(const Space& space, int count, std::uint64_t seed,
                                         double lip_bound, double sup_bound) {
  TestFamily family;
  family.kind = Kind::bounded_lipschitz;
  std::mt19937_64 rng(seed);
  double lo = space.is_interval() ? space.lo() : 0.0;
  double hi = space.is_interval() ? space.hi() : 1.0;
  for (int i = 0; i < count; ++i) {
    int knots = 2 + static_cast<int>(rng() % 7);
    LinearProfile p;
    p.xs.push_back(lo);
    for (int k = 0; k < knots - 2; ++k) p.xs.push_back(lo + (hi - lo) * unit_draw(rng));
    p.xs.push_back(hi);
    std::sort(p.xs.begin(), p.xs.end());
    p.xs.erase(std::unique(p.xs.begin(), p.xs.end()), p.xs.end());
    for (std::size_t k = 0; k < p.xs.size(); ++k)
      p.ys.push_back(sup_bound * (2 * unit_draw(rng) - 1));
    // A clamp pass keeps the slope under 0.9 * lip_bound; clamping into the
    // sup range afterwards cannot increase any slope.
    for (std::size_t k = 1; k < p.xs.size(); ++k) {
      double reach = 0.9 * lip_bound * (p.xs[k] - p.xs[k - 1]);
      p.ys[k] = std::clamp(p.ys[k], p.ys[k - 1] - reach, p.ys[k - 1] + reach);
    }
    for (double& y : p.ys) y = std::clamp(y, -sup_bound, sup_bound);
    p.cum.assign(p.xs.size(), 0.0);
    for (std::size_t k = 1; k < p.xs.size(); ++k) {
      p.cum[k] = p.cum[k - 1] + 0.5 * (p.ys[k] + p.ys[k - 1]) * (p.xs[k] - p.xs[k - 1]);
    }
    std::ostringstream label;
    label << "lipschitz#" << i;
    family.members.push_back(profile_func(std::move(p), sup_bound, label.str()));
  }
  return family;
}

TestFamily TestFamily::indicators(const Space& space, int count, std::uint64_t seed) {
  TestFamily family;
  family.kind = Kind::indicators;
  std::mt19937_64 rng(seed);
  bool on_interval = space.is_interval();
  double lo = on_interval ? space.lo() : 0.0;
  double hi = on_interval ? space.hi() : 1.0;
  auto push = [&](IntervalSet set) {
    if (static_cast<int>(family.members.size()) < count)
      family.members.push_back(indicator_func(set));
  };
  auto endpoint_rational = [](double v) {
    auto r = Rational::from_double_exact(v);
    return r ? *r : Rational(0);
  };
  if (!on_interval || space.lo_closed()) {
    Rational a = endpoint_rational(lo);
    push({a, a, false, false});
  }
  if (!on_interval || space.hi_closed()) {
    Rational b = endpoint_rational(hi);
    push({b, b, false, false});
  }
  while (static_cast<int>(family.members.size()) < count) {
    std::int64_t q = 2 + static_cast<std::int64_t>(rng() % 31);
    std::int64_t p1 = static_cast<std::int64_t>(rng() % (q + 1));
    std::int64_t p2 = static_cast<std::int64_t>(rng() % (q + 1));
    if (p1 > p2) std::swap(p1, p2);
    Rational span = endpoint_rational(hi) - endpoint_rational(lo);
    Rational a = endpoint_rational(lo) + span * Rational(p1, q);
    Rational b = endpoint_rational(lo) + span * Rational(p2, q);
    IntervalSet set{a, b, false, false};
    if (a != b) {
      set.lo_open = rng() % 2 == 0;
      set.hi_open = rng() % 2 == 0;
    }
    push(set);
  }
  return family;
}

TestFamily TestFamily::custom(std::vector<Func> members) {
  TestFamily family;
  family.kind = Kind::custom;
  family.members = std::move(members);
  return family;
}

ConvergenceReport check_weak(const MeasureSeq& mu_seq, const Measure& mu, const TestFamily& family,
                             const std::vector<int>& n_probe, double tol, const QuadConfig& quad) {
  return run_check(ConvergenceReport::Mode::weak, mu_seq, mu, family, n_probe, tol, quad);
}

ConvergenceReport check_setwise(const MeasureSeq& mu_seq, const Measure& mu,
                                const TestFamily& family, const std::vector<int>& n_probe,
                                double tol, const QuadConfig& quad) {
  return run_check(ConvergenceReport::Mode::setwise, mu_seq, mu, family, n_probe, tol, quad);
}

std::vector<int> dyadic_schedule(int n_max) {
  std::vector<int> out;
  for (int n = 1; n < n_max; n *= 2) out.push_back(n);
  if (out.empty() || out.back() != n_max) out.push_back(n_max);
  return out;
}

}  // namespace fatou
