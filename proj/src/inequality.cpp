#include "fatou/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fatou/parallel.hpp"

namespace fatou {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Violated: return "Violated";
    case Verdict::Inconclusive: return "Inconclusive";
    case Verdict::HypothesisFailed: return "HypothesisFailed";
  }
  return "Inconclusive";
}

std::string to_string(Inequality i) {
  switch (i) {
    case Inequality::eq1: return "eq1";
    case Inequality::eq3: return "eq3";
    case Inequality::eq3_1: return "eq3_1";
    case Inequality::eqJ0: return "eqJ0";
    case Inequality::teor2: return "teor2";
    case Inequality::teor3: return "teor3";
    case Inequality::cor: return "cor";
    case Inequality::eqE: return "eqE";
  }
  return "eq1";
}

std::optional<Verdict> verdict_from_string(const std::string& s) {
  if (s == "Holds") return Verdict::Holds;
  if (s == "Violated") return Verdict::Violated;
  if (s == "Inconclusive") return Verdict::Inconclusive;
  if (s == "HypothesisFailed") return Verdict::HypothesisFailed;
  return std::nullopt;
}

std::optional<Inequality> inequality_from_string(const std::string& s) {
  if (s == "eq1") return Inequality::eq1;
  if (s == "eq3") return Inequality::eq3;
  if (s == "eq3_1") return Inequality::eq3_1;
  if (s == "eqJ0") return Inequality::eqJ0;
  if (s == "teor2") return Inequality::teor2;
  if (s == "teor3") return Inequality::teor3;
  if (s == "cor") return Inequality::cor;
  if (s == "eqE") return Inequality::eqE;
  return std::nullopt;
}

Verdict decide(const Bracket& lhs, const Bracket& rhs, double tol) {
  if (lhs.hi <= rhs.lo + ExtendedReal(tol)) return Verdict::Holds;
  if (lhs.lo > rhs.hi) return Verdict::Violated;
  return Verdict::Inconclusive;
}

namespace {

using PointField = std::function<Bracket(const Point&)>;

Point sample_point(double x) {
  Point p;
  p.value = x;
  p.exact = Rational::from_double_exact(x);
  return p;
}

double cell_mass(const Piece& piece, double a, double b) {
  if (piece.const_density) return *piece.const_density * (b - a);
  if (piece.density.antiderivative) {
    const auto& F = *piece.density.antiderivative;
    return F(b) - F(a);
  }
  const int panels = 64;
  double h = (b - a) / panels;
  auto rho = [&](double x) {
    ExtendedReal v = piece.density(sample_point(x));
    return v.is_finite() ? std::max(0.0, v.raw()) : 0.0;
  };
  double sum = 0;
  for (int i = 0; i < panels; ++i) {
    double x0 = a + i * h;
    double x2 = x0 + h;
    sum += (h / 6) * (rho(x0) + 4 * rho(0.5 * (x0 + x2)) + rho(x2));
  }
  return sum;
}

// Atoms plus one midpoint sample per density cell; cells are cut at the grid
// points inside each piece, so every weight is the exact cell mass.  A cell
// pinned to an open endpoint sits below the envelope resolution floor, where
// no finite tail window resolves midpoint values, so its sample moves to the
// inner edge.
std::vector<std::pair<Point, double>> weighted_samples(const Measure& mu,
                                                       const std::vector<Point>& grid_points) {
  std::vector<std::pair<Point, double>> out;
  for (const Atom& a : mu.atoms()) {
    if (a.weight > 0) out.emplace_back(a.location, a.weight);
  }
  const Space& sp = mu.space();
  for (const Piece& piece : mu.pieces()) {
    std::vector<double> cuts{piece.lo, piece.hi};
    for (const Point& p : grid_points) {
      if (p.value > piece.lo && p.value < piece.hi) cuts.push_back(p.value);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double a = cuts[i], b = cuts[i + 1];
      if (b <= a) continue;
      double x = 0.5 * (a + b);
      if (!sp.lo_closed() && a <= sp.lo()) x = b;
      if (!sp.hi_closed() && b >= sp.hi()) x = a;
      out.emplace_back(sample_point(x), cell_mass(piece, a, b));
    }
  }
  return out;
}

Bracket integrate_field(const PointField& field, const Measure& mu,
                        const std::vector<Point>& grid_points) {
  auto samples = weighted_samples(mu, grid_points);
  std::vector<Bracket> vals(samples.size(), Bracket::exact(0.0));
  parallel_for(samples.size(), [&](std::size_t i) { vals[i] = field(samples[i].first); });
  Bracket total = Bracket::exact(0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    total = total + scale(samples[i].second, vals[i]);
  }
  return total;
}

std::vector<Point> atom_points(const Measure& mu) {
  std::vector<Point> pts;
  for (const Atom& a : mu.atoms()) pts.push_back(a.location);
  return pts;
}

// Past the stabilization point the pointwise tail limits coincide with the
// stabilized member, so its certified quadrature bracket replaces the sampled
// field sum.  Envelope-based limits additionally need continuity.
std::optional<Bracket> stabilized_integral(const FunctionSeq& f, const Measure& mu,
                                           const QuadConfig& quad, bool via_envelope) {
  if (!f.stable_after) return std::nullopt;
  if (via_envelope && !f.continuous) return std::nullopt;
  IntegralValue iv = integrate(f.at(std::max(1, *f.stable_after)), mu, quad);
  if (!iv.defined) return std::nullopt;
  return iv.bracket;
}

LiminfSummary integral_liminf(const FunctionSeq& f, const MeasureSeq& mu_seq,
                              const VerifyConfig& cfg) {
  const std::vector<int>& ns = cfg.probes();
  std::vector<std::pair<int, IntegralValue>> vals(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) {
    vals[i] = {ns[i], integrate(f.at(ns[i]), mu_seq(ns[i]), cfg.quad)};
  });
  return liminf_of_integrals(vals);
}

// Probes f_n >= 0 over grid points and atom locations; returns a description
// of the first failure.
std::optional<std::string> find_negative(const FunctionSeq& f, const MeasureSeq& mu_seq,
                                         const Measure& mu, const VerifyConfig& cfg) {
  if (f.known_lower_bound && *f.known_lower_bound >= 0) return std::nullopt;
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  for (int n : cfg.probes()) {
    std::vector<Point> pts = grid.points;
    for (const Atom& a : mu_seq(n).atoms()) pts.push_back(a.location);
    for (const Point& p : pts) {
      ExtendedReal v = f(n, p);
      if (v < ExtendedReal(-1e-9)) {
        std::ostringstream os;
        os << "nonnegativity fails: f_" << n << "(" << format_double(p.value)
           << ") = " << v.to_string();
        return os.str();
      }
    }
  }
  return std::nullopt;
}

// Probes f_n >= g_n - 1e-9 at grid points and atoms.
std::optional<std::string> find_domination_failure(const FunctionSeq& f, const FunctionSeq& g,
                                                   const MeasureSeq& mu_seq, const Measure& mu,
                                                   const VerifyConfig& cfg) {
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  for (int n : cfg.probes()) {
    std::vector<Point> pts = grid.points;
    for (const Atom& a : mu_seq(n).atoms()) pts.push_back(a.location);
    for (const Point& p : pts) {
      ExtendedReal fv = f(n, p);
      ExtendedReal gv = g(n, p);
      if (fv.is_pos_inf() || gv.is_neg_inf()) continue;
      auto gap = try_add(fv, -gv);
      if (gap && *gap < ExtendedReal(-1e-9)) {
        std::ostringstream os;
        os << "domination fails: f_" << n << " < g_" << n << " at s = "
           << format_double(p.value);
        return os.str();
      }
    }
  }
  return std::nullopt;
}

void finish_report(InequalityReport& rep, const LiminfSummary& rhs, double tol) {
  rep.rhs = rhs.estimate;
  rep.rhs_trace = rhs.trace;
  rep.lhs_lower_is_declared = rep.lhs.lo.is_finite();
  if (rep.verdict == Verdict::HypothesisFailed) return;
  rep.verdict = decide(rep.lhs, rep.rhs, tol);
  switch (rep.verdict) {
    case Verdict::Holds: {
      auto m = try_add(rep.rhs.lo, -rep.lhs.hi);
      rep.margin = m ? *m : ExtendedReal(0.0);
      rep.reason = "upper lhs estimate below lower rhs estimate within tol";
      break;
    }
    case Verdict::Violated: {
      auto m = try_add(rep.lhs.lo, -rep.rhs.hi);
      rep.margin = m ? *m : ExtendedReal(0.0);
      rep.reason = "certified: whole lhs bracket above whole rhs bracket";
      break;
    }
    default:
      rep.margin = 0.0;
      rep.reason = "brackets overlap beyond tol";
      break;
  }
}

StepReport make_step(std::string name, const Bracket& lhs, const Bracket& rhs, double tol,
                     std::string note) {
  StepReport step;
  step.name = std::move(name);
  step.lhs = lhs;
  step.rhs = rhs;
  step.verdict = decide(lhs, rhs, tol);
  step.note = std::move(note);
  return step;
}

// Point-estimate comparison for proof-chain steps: the sampled estimates are
// treated as the values and the slack absorbs trace noise.
StepReport make_estimate_step(std::string name, ExtendedReal lhs, ExtendedReal rhs, double slack,
                              std::string note) {
  StepReport step;
  step.name = std::move(name);
  step.lhs = Bracket::exact(lhs);
  step.rhs = Bracket::exact(rhs);
  step.verdict = decide(step.lhs, step.rhs, slack);
  step.note = std::move(note);
  return step;
}

ExtendedReal liminf_estimate_hi(const LiminfSummary& s) {
  return s.diverging_below ? ExtendedReal::neg_inf() : s.estimate.hi;
}

ExtendedReal bracket_mid(const Bracket& b) {
  if (b.lo.is_finite() && b.hi.is_finite()) return ExtendedReal(0.5 * (b.lo.raw() + b.hi.raw()));
  if (b.hi.is_finite()) return b.hi;
  return b.lo;
}

}  // namespace

LiminfSummary liminf_of_integrals(const std::vector<std::pair<int, IntegralValue>>& values) {
  LiminfSummary out;
  for (const auto& [n, iv] : values) {
    out.trace.emplace_back(n, iv.bracket);
    if (!iv.defined) out.any_undefined = true;
  }
  if (values.empty()) return out;
  if (out.any_undefined) {
    out.estimate = Bracket::whole();
    return out;
  }
  if (values.size() == 1) {
    out.estimate = values[0].second.bracket;
    return out;
  }

  bool all_equal = true;
  for (std::size_t i = 1; i < out.trace.size(); ++i) {
    if (!(out.trace[i].second.lo == out.trace[0].second.lo &&
          out.trace[i].second.hi == out.trace[0].second.hi)) {
      all_equal = false;
      break;
    }
  }
  if (all_equal) {
    out.estimate = out.trace[0].second;
    return out;
  }

  std::vector<ExtendedReal> mids;
  bool all_finite = true;
  for (const auto& [n, iv] : values) {
    mids.push_back(iv.value);
    if (!iv.value.is_finite()) all_finite = false;
  }

  std::size_t half = out.trace.size() / 2;
  if (!all_finite) {
    Bracket tail_min = out.trace[half].second;
    for (std::size_t i = half + 1; i < out.trace.size(); ++i) {
      tail_min = min(tail_min, out.trace[i].second);
    }
    out.estimate = tail_min;
    if (tail_min.hi.is_neg_inf()) out.diverging_below = true;
    return out;
  }

  bool rising = true, falling = true;
  for (std::size_t i = 1; i < mids.size(); ++i) {
    double d = mids[i].raw() - mids[i - 1].raw();
    if (d <= 0) rising = false;
    if (d >= 0) falling = false;
  }
  double d_last = mids.back().raw() - mids[mids.size() - 2].raw();
  double d_prev = mids.size() >= 3 ? mids[mids.size() - 2].raw() - mids[mids.size() - 3].raw()
                                   : d_last;
  bool shrinking = std::fabs(d_last) <= 0.75 * std::fabs(d_prev);
  const Bracket& last = out.trace.back().second;
  out.cauchy = std::fabs(d_last);

  if (rising && !shrinking) {
    out.estimate = Bracket(last.lo, ExtendedReal::pos_inf());
    out.diverging_above = true;
    return out;
  }
  if (falling && !shrinking) {
    out.estimate = Bracket(ExtendedReal::neg_inf(), last.hi);
    out.diverging_below = true;
    return out;
  }
  if (rising || falling) {
    double pad = 4 * out.cauchy;
    out.estimate = Bracket(last.lo + ExtendedReal(-pad), last.hi + ExtendedReal(pad));
    return out;
  }

  Bracket tail_min = out.trace[half].second;
  double max_step = 0;
  for (std::size_t i = half; i < out.trace.size(); ++i) {
    tail_min = min(tail_min, out.trace[i].second);
    if (i > half) max_step = std::max(max_step, std::fabs(mids[i].raw() - mids[i - 1].raw()));
  }
  out.cauchy = max_step;
  double pad = 4 * max_step;
  out.estimate = Bracket(tail_min.lo + ExtendedReal(-pad), tail_min.hi + ExtendedReal(pad));
  return out;
}

InequalityReport verify_fatou_classic(const FunctionSeq& f, const Measure& mu,
                                      const VerifyConfig& cfg) {
  InequalityReport rep;
  rep.inequality = Inequality::eq1;
  MeasureSeq fixed = [&mu](int) { return mu; };
  if (auto neg = find_negative(f, fixed, mu, cfg)) {
    rep.verdict = Verdict::HypothesisFailed;
    rep.reason = *neg;
  }
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  if (auto direct = stabilized_integral(f, mu, cfg.quad, false)) {
    rep.lhs = *direct;
  } else {
    PointField lim = [&](const Point& s) {
      return pointwise_liminf(f, s, cfg.probes(), cfg.grid.m_max);
    };
    rep.lhs = integrate_field(lim, mu, grid.points);
  }
  finish_report(rep, integral_liminf(f, fixed, cfg), cfg.tol);
  return rep;
}

InequalityReport verify_fatou_setwise(const FunctionSeq& f, const MeasureSeq& mu_seq,
                                      const Measure& mu, const VerifyConfig& cfg,
                                      bool waive_nonneg) {
  InequalityReport rep;
  rep.inequality = Inequality::eq3;
  if (!waive_nonneg) {
    if (auto neg = find_negative(f, mu_seq, mu, cfg)) {
      rep.verdict = Verdict::HypothesisFailed;
      rep.reason = *neg;
    }
  }
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  if (auto direct = stabilized_integral(f, mu, cfg.quad, false)) {
    rep.lhs = *direct;
  } else {
    PointField lim = [&](const Point& s) {
      return pointwise_liminf(f, s, cfg.probes(), cfg.grid.m_max);
    };
    rep.lhs = integrate_field(lim, mu, grid.points);
  }
  finish_report(rep, integral_liminf(f, mu_seq, cfg), cfg.tol);
  return rep;
}

InequalityReport verify_fatou_weak(const FunctionSeq& f, const MeasureSeq& mu_seq,
                                   const Measure& mu, const VerifyConfig& cfg, Inequality id) {
  InequalityReport rep;
  rep.inequality = id;
  if (auto neg = find_negative(f, mu_seq, mu, cfg)) {
    rep.verdict = Verdict::HypothesisFailed;
    rep.reason = *neg;
  }
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  if (auto direct = stabilized_integral(f, mu, cfg.quad, true)) {
    rep.lhs = *direct;
  } else {
    SeqLowerLimit slim(f, mu.space(), cfg.grid);
    PointField lim = [&](const Point& s) { return slim.at(s); };
    rep.lhs = integrate_field(lim, mu, grid.points);
  }
  finish_report(rep, integral_liminf(f, mu_seq, cfg), cfg.tol);
  return rep;
}

namespace {

HypothesisDetail check_minorant_condition(const PointField& upper_limit, const FunctionSeq& g,
                                          const MeasureSeq& mu_seq, const Measure& mu,
                                          const VerifyConfig& cfg, bool via_envelope) {
  HypothesisDetail det;
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  if (auto direct = stabilized_integral(g, mu, cfg.quad, via_envelope)) {
    det.lhs = *direct;
  } else {
    det.lhs = integrate_field(upper_limit, mu, grid.points);
  }
  LiminfSummary rhs = integral_liminf(g, mu_seq, cfg);
  det.rhs = rhs.estimate;
  double slack = cfg.tol + 4 * rhs.cauchy;
  if (!det.lhs.lo.is_finite()) {
    det.ok = false;
    det.reason = det.lhs.hi.is_neg_inf()
                     ? "integral of the upper limit of the minorants is -inf"
                     : "integral of the upper limit of the minorants has no finite lower bound";
    return det;
  }
  if (rhs.diverging_below) {
    det.ok = false;
    det.reason = "minorant integrals diverge below along the schedule";
    return det;
  }
  if (det.lhs.lo > det.rhs.hi + ExtendedReal(slack)) {
    det.ok = false;
    det.reason = "integral of the upper limit exceeds the liminf of minorant integrals";
    return det;
  }
  det.ok = true;
  det.reason = "finite and below the liminf of minorant integrals";
  return det;
}

}  // namespace

HypothesisDetail check_hypothesis_setwise_minorant(const FunctionSeq& g, const MeasureSeq& mu_seq,
                                                   const Measure& mu, const VerifyConfig& cfg) {
  PointField upper = [&](const Point& s) {
    return pointwise_limsup(g, s, cfg.probes(), cfg.grid.m_max);
  };
  return check_minorant_condition(upper, g, mu_seq, mu, cfg, false);
}

HypothesisDetail check_hypothesis_weak_minorant(const FunctionSeq& g, const MeasureSeq& mu_seq,
                                                const Measure& mu, const VerifyConfig& cfg) {
  SeqUpperLimit slim(g, mu.space(), cfg.grid);
  PointField upper = [&](const Point& s) { return slim.at(s); };
  return check_minorant_condition(upper, g, mu_seq, mu, cfg, true);
}

InequalityReport verify_theorem2(const FunctionSeq& f, const FunctionSeq& g,
                                 const MeasureSeq& mu_seq, const Measure& mu,
                                 const VerifyConfig& cfg) {
  InequalityReport rep;
  rep.inequality = Inequality::teor2;
  if (auto dom = find_domination_failure(f, g, mu_seq, mu, cfg)) {
    rep.verdict = Verdict::HypothesisFailed;
    rep.reason = *dom;
  }
  rep.hypothesis = check_hypothesis_setwise_minorant(g, mu_seq, mu, cfg);
  if (rep.verdict != Verdict::HypothesisFailed && !rep.hypothesis->ok) {
    rep.verdict = Verdict::HypothesisFailed;
    rep.reason = rep.hypothesis->reason;
  }
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  if (auto direct = stabilized_integral(f, mu, cfg.quad, false)) {
    rep.lhs = *direct;
  } else {
    PointField lim = [&](const Point& s) {
      return pointwise_liminf(f, s, cfg.probes(), cfg.grid.m_max);
    };
    rep.lhs = integrate_field(lim, mu, grid.points);
  }
  finish_report(rep, integral_liminf(f, mu_seq, cfg), cfg.tol);
  return rep;
}

InequalityReport verify_theorem3(const FunctionSeq& f, const FunctionSeq& g,
                                 const MeasureSeq& mu_seq, const Measure& mu,
                                 const VerifyConfig& cfg) {
  InequalityReport rep;
  rep.inequality = Inequality::teor3;
  if (auto dom = find_domination_failure(f, g, mu_seq, mu, cfg)) {
    rep.verdict = Verdict::HypothesisFailed;
    rep.reason = *dom;
  }
  rep.hypothesis = check_hypothesis_weak_minorant(g, mu_seq, mu, cfg);
  if (rep.verdict != Verdict::HypothesisFailed && !rep.hypothesis->ok) {
    rep.verdict = Verdict::HypothesisFailed;
    rep.reason = rep.hypothesis->reason;
  }
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  if (auto direct = stabilized_integral(f, mu, cfg.quad, true)) {
    rep.lhs = *direct;
  } else {
    SeqLowerLimit slim(f, mu.space(), cfg.grid);
    PointField lim = [&](const Point& s) { return slim.at(s); };
    rep.lhs = integrate_field(lim, mu, grid.points);
  }
  finish_report(rep, integral_liminf(f, mu_seq, cfg), cfg.tol);
  return rep;
}

InequalityReport verify_corollary(const FunctionSeq& f, const Func& g, const MeasureSeq& mu_seq,
                                  const Measure& mu, const VerifyConfig& cfg) {
  InequalityReport rep;
  rep.inequality = Inequality::cor;
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));

  for (const Point& p : grid.points) {
    if (!g(p).is_finite()) {
      rep.verdict = Verdict::HypothesisFailed;
      rep.reason = "inapplicable: minorant not real-valued at s = " + format_double(p.value);
      rep.hypothesis = HypothesisDetail{};
      rep.hypothesis->ok = false;
      rep.hypothesis->reason = rep.reason;
      return rep;
    }
  }

  HypothesisDetail det;
  if (g.continuous) {
    IntegralValue iv = integrate(g, mu, cfg.quad);
    det.lhs = iv.bracket;
  } else {
    PointField upper = [&](const Point& s) {
      return usc_envelope_at(g, mu.space(), s, cfg.grid, &grid);
    };
    det.lhs = integrate_field(upper, mu, grid.points);
  }
  FunctionSeq g_seq = FunctionSeq::constant_in_n(g);
  LiminfSummary rhs = integral_liminf(g_seq, mu_seq, cfg);
  det.rhs = rhs.estimate;
  double slack = cfg.tol + 4 * rhs.cauchy;
  bool limit_exists = !rhs.diverging_below && !rhs.diverging_above && !rhs.any_undefined &&
                      rhs.estimate.lo.is_finite() && rhs.estimate.hi.is_finite();
  if (!det.lhs.lo.is_finite()) {
    det.ok = false;
    det.reason = "integral of the upper envelope has no finite lower bound";
  } else if (!limit_exists) {
    det.ok = false;
    det.reason = "minorant integrals do not settle to a limit along the schedule";
  } else if (det.lhs.lo > det.rhs.hi + ExtendedReal(slack) ||
             det.rhs.lo > det.lhs.hi + ExtendedReal(slack)) {
    det.ok = false;
    det.reason = "integral of the upper envelope differs from the limit of minorant integrals";
  } else {
    det.ok = true;
    det.reason = "upper envelope integral matches the limit of minorant integrals";
  }
  rep.hypothesis = det;
  if (!det.ok) {
    rep.verdict = Verdict::HypothesisFailed;
    rep.reason = det.reason;
  }
  if (auto direct = stabilized_integral(f, mu, cfg.quad, true)) {
    rep.lhs = *direct;
  } else {
    SeqLowerLimit slim(f, mu.space(), cfg.grid);
    PointField lim = [&](const Point& s) { return slim.at(s); };
    rep.lhs = integrate_field(lim, mu, grid.points);
  }
  finish_report(rep, integral_liminf(f, mu_seq, cfg), cfg.tol);
  return rep;
}

EquivalenceReport verify_remark_equivalence(const FunctionSeq& g, const MeasureSeq& mu_seq,
                                            const Measure& mu, const VerifyConfig& cfg) {
  EquivalenceReport rep;
  rep.condition = check_hypothesis_weak_minorant(g, mu_seq, mu, cfg);

  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  Bracket a = Bracket::whole();
  if (auto direct = stabilized_integral(g, mu, cfg.quad, true)) {
    a = *direct;
  } else {
    SeqUpperLimit slim(g, mu.space(), cfg.grid);
    PointField upper = [&](const Point& s) { return slim.at(s); };
    a = integrate_field(upper, mu, grid.points);
  }
  LiminfSummary rhs = integral_liminf(g, mu_seq, cfg);

  HypothesisDetail eq;
  eq.lhs = a;
  eq.rhs = rhs.estimate;
  double slack = cfg.tol + 4 * rhs.cauchy;
  bool limit_exists = !rhs.diverging_below && !rhs.diverging_above && !rhs.any_undefined &&
                      rhs.estimate.lo.is_finite() && rhs.estimate.hi.is_finite();
  double a_mid = a.lo.is_finite() && a.hi.is_finite() ? 0.5 * (a.lo.raw() + a.hi.raw()) : 0;
  double b_mid = limit_exists ? 0.5 * (rhs.estimate.lo.raw() + rhs.estimate.hi.raw()) : 0;
  double width = a.lo.is_finite() && a.hi.is_finite() ? 0.5 * (a.hi.raw() - a.lo.raw()) : 0;
  if (!a.lo.is_finite()) {
    eq.ok = false;
    eq.reason = "integral of the upper limit has no finite lower bound";
  } else if (!limit_exists) {
    eq.ok = false;
    eq.reason = "minorant integrals do not settle to a limit";
  } else if (std::fabs(a_mid - b_mid) > slack + width) {
    eq.ok = false;
    eq.reason = "the two sides settle to different values";
  } else {
    eq.ok = true;
    eq.reason = "equality within slack";
  }
  rep.equality = eq;
  rep.agree = rep.condition.ok == rep.equality.ok;
  rep.common_value = a;
  std::ostringstream note;
  note << "condition " << (rep.condition.ok ? "true" : "false") << ", equality "
       << (rep.equality.ok ? "true" : "false");
  rep.note = note.str();
  return rep;
}

std::vector<StepReport> verify_proof_chain_weak_nonneg(const FunctionSeq& f,
                                                       const MeasureSeq& mu_seq, const Measure& mu,
                                                       const VerifyConfig& cfg) {
  std::vector<StepReport> steps;
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  const std::vector<int>& ns = cfg.probes();
  SeqLowerLimit slim(f, mu.space(), cfg.grid);

  auto neg = find_negative(f, mu_seq, mu, cfg);
  {
    StepReport gate;
    gate.name = "nonnegativity";
    gate.lhs = Bracket::exact(0.0);
    gate.rhs = Bracket::exact(0.0);
    gate.verdict = neg ? Verdict::HypothesisFailed : Verdict::Holds;
    gate.note = neg ? *neg : "no negative probe";
    steps.push_back(gate);
  }
  ExtendedReal floor = ExtendedReal::neg_inf();
  if (!neg) {
    floor = ExtendedReal(f.known_lower_bound ? std::max(0.0, *f.known_lower_bound) : 0.0);
  } else if (f.known_lower_bound) {
    floor = ExtendedReal(*f.known_lower_bound);
  }

  {
    // Tail envelope estimates must be nondecreasing in N at every grid point.
    std::vector<double> drops(grid.points.size(), 0.0);
    parallel_for(grid.points.size(), [&](std::size_t i) {
      std::vector<ExtendedReal> trace = slim.trace_at(grid.points[i]);
      double worst = 0;
      for (std::size_t k = 1; k < trace.size(); ++k) {
        if (trace[k] < trace[k - 1]) {
          auto d = try_add(trace[k - 1], -trace[k]);
          worst = std::max(worst, d && d->is_finite() ? d->raw() : 1.0);
        }
      }
      drops[i] = worst;
    });
    double worst = 0;
    for (double d : drops) worst = std::max(worst, d);
    steps.push_back(make_step("envelope-tails-monotone", Bracket::exact(worst),
                              Bracket::exact(0.0), 0.0,
                              "largest drop across the envelope tail traces, exact zero required"));
  }

  auto tail_field = [&](int N) {
    return PointField([&, N](const Point& s) -> Bracket {
      std::vector<Point> probes = ball_probes(mu.space(), s, cfg.grid, &grid);
      ExtendedReal hi = ExtendedReal::pos_inf();
      for (const Point& q : probes) {
        hi = min(hi, tail_inf(f, N, q, cfg.grid.m_max).hi);
      }
      return Bracket(floor, max(hi, floor));
    });
  };

  LiminfSummary rhs_full = integral_liminf(f, mu_seq, cfg);

  std::vector<int> stage_ns{ns.front(), ns[ns.size() / 2], ns.back()};
  stage_ns.erase(std::unique(stage_ns.begin(), stage_ns.end()), stage_ns.end());
  for (int N : stage_ns) {
    PointField field = tail_field(N);
    Bracket lhs = integrate_field(field, mu, grid.points);
    std::vector<std::pair<int, IntegralValue>> vals(ns.size());
    parallel_for(ns.size(), [&](std::size_t i) {
      IntegralValue iv;
      iv.bracket = integrate_field(field, mu_seq(ns[i]), grid.points);
      iv.value = bracket_mid(iv.bracket);
      vals[i] = {ns[i], iv};
    });
    LiminfSummary rhs = liminf_of_integrals(vals);
    std::ostringstream name;
    name << "lsc-portmanteau-N" << N;
    steps.push_back(make_estimate_step(
        name.str(), lhs.hi, liminf_estimate_hi(rhs), cfg.tol + 4 * rhs.cauchy,
        "sampled tail envelope integral against its liminf over the measure schedule"));
  }

  {
    std::vector<std::pair<int, IntegralValue>> vals(ns.size());
    parallel_for(ns.size(), [&](std::size_t i) {
      PointField field = tail_field(ns[i]);
      IntegralValue iv;
      iv.bracket = integrate_field(field, mu_seq(ns[i]), grid.points);
      iv.value = bracket_mid(iv.bracket);
      vals[i] = {ns[i], iv};
    });
    LiminfSummary diag = liminf_of_integrals(vals);
    PointField field = tail_field(ns.back());
    Bracket lhs = integrate_field(field, mu, grid.points);
    steps.push_back(make_estimate_step(
        "diagonal-comparison", lhs.hi, liminf_estimate_hi(diag), cfg.tol + 4 * diag.cauchy,
        "largest tail envelope integral against the diagonal liminf"));
  }

  {
    auto samples = weighted_samples(mu, grid.points);
    std::vector<Bracket> vals(samples.size(), Bracket::exact(0.0));
    parallel_for(samples.size(), [&](std::size_t i) { vals[i] = slim.at(samples[i].first); });
    std::vector<double> lambdas;
    for (double lam = 1; lam <= 64; lam *= 2) lambdas.push_back(lam);
    std::vector<Bracket> truncated;
    for (double lam : lambdas) {
      Bracket total = Bracket::exact(0.0);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        total = total + scale(samples[i].second, min(vals[i], Bracket::exact(lam)));
      }
      truncated.push_back(total);
      std::ostringstream name;
      name << "truncation-lambda" << lam;
      steps.push_back(make_step(name.str(), total, rhs_full.estimate, cfg.tol,
                                "truncated lower limit integral against the full liminf"));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < truncated.size(); ++i) {
      if (truncated[i].hi < truncated[i - 1].hi || truncated[i].lo < truncated[i - 1].lo)
        monotone = false;
    }
    steps.push_back(make_step("truncation-monotone", Bracket::exact(monotone ? 0.0 : 1.0),
                              Bracket::exact(0.0), 0.0,
                              "exact monotonicity of the truncation ladder on shared samples"));
  }

  {
    PointField lim = [&](const Point& s) { return slim.at(s); };
    Bracket lhs = integrate_field(lim, mu, grid.points);
    steps.push_back(make_step("weak-fatou", lhs, rhs_full.estimate, cfg.tol,
                              "the full inequality"));
  }
  return steps;
}

std::vector<StepReport> verify_proof_chain_minorant(const FunctionSeq& f, const FunctionSeq& g,
                                                    const MeasureSeq& mu_seq, const Measure& mu,
                                                    ChainMode mode, const VerifyConfig& cfg) {
  std::vector<StepReport> steps;
  Grid grid = make_grid(mu.space(), cfg.grid, atom_points(mu));
  FunctionSeq h = seq_difference(f, g);
  h.label = "difference";

  {
    double failing = 0;
    auto samples = weighted_samples(mu, grid.points);
    for (const auto& [p, w] : samples) {
      bool bad = false;
      for (int n : cfg.probes()) {
        if (h(n, p) < ExtendedReal(-1e-9)) bad = true;
      }
      if (bad) failing += w;
    }
    steps.push_back(make_step("difference-nonneg", Bracket::exact(failing),
                              Bracket::exact(cfg.tol), 0.0,
                              "sampled mass where f_n - g_n dips negative"));
  }

  SeqLowerLimit slim_f(f, mu.space(), cfg.grid);
  SeqLowerLimit slim_h(h, mu.space(), cfg.grid);
  SeqUpperLimit slim_g(g, mu.space(), cfg.grid);

  auto lower_field = [&](const FunctionSeq& u, const SeqLowerLimit& env) {
    return PointField([&, mode](const Point& s) -> Bracket {
      if (mode == ChainMode::weak) return env.at(s);
      return pointwise_liminf(u, s, cfg.probes(), cfg.grid.m_max);
    });
  };
  PointField upper_g = [&](const Point& s) -> Bracket {
    if (mode == ChainMode::weak) return slim_g.at(s);
    return pointwise_limsup(g, s, cfg.probes(), cfg.grid.m_max);
  };
  PointField lower_f = lower_field(f, slim_f);
  PointField lower_h = lower_field(h, slim_h);

  {
    // liminf(h + g) <= liminf h + limsup g at the sampled points, mu-a.e.
    auto samples = weighted_samples(mu, grid.points);
    std::vector<double> failing(samples.size(), 0.0);
    parallel_for(samples.size(), [&](std::size_t i) {
      const auto& [p, w] = samples[i];
      ExtendedReal lf = lower_f(p).hi;
      ExtendedReal lh = lower_h(p).hi;
      ExtendedReal ug = upper_g(p).lo;
      auto sum = try_add(lh, ug);
      if (!sum) return;
      if (lf > *sum + ExtendedReal(cfg.tol)) failing[i] = w;
    });
    double mass = 0;
    for (double wgt : failing) mass += wgt;
    steps.push_back(make_step("pointwise-subadditivity", Bracket::exact(mass),
                              Bracket::exact(cfg.tol), 0.0,
                              "sampled mass where the lower limit of f exceeds the split bound"));
  }

  HypothesisDetail hyp = mode == ChainMode::weak
                             ? check_hypothesis_weak_minorant(g, mu_seq, mu, cfg)
                             : check_hypothesis_setwise_minorant(g, mu_seq, mu, cfg);
  steps.push_back(make_step("minorant-hypothesis", hyp.lhs, hyp.rhs,
                            cfg.tol, hyp.reason));
  steps.back().verdict = hyp.ok ? Verdict::Holds : Verdict::HypothesisFailed;

  Bracket int_lf = integrate_field(lower_f, mu, grid.points);
  Bracket int_lh = integrate_field(lower_h, mu, grid.points);
  Bracket int_ug = integrate_field(upper_g, mu, grid.points);
  LiminfSummary sum_h = integral_liminf(h, mu_seq, cfg);
  LiminfSummary sum_f = integral_liminf(f, mu_seq, cfg);
  LiminfSummary sum_g = integral_liminf(g, mu_seq, cfg);

  steps.push_back(make_step("fatou-for-difference", int_lh, sum_h.estimate,
                            cfg.tol + 4 * sum_h.cauchy,
                            "nonnegative Fatou applied to the difference"));

  steps.push_back(make_estimate_step(
      "integrated-subadditivity", int_lf.hi,
      try_add(int_lh.hi, int_ug.lo).value_or(ExtendedReal::pos_inf()), cfg.tol,
      "integral of the split bound dominates the integral of the lower limit of f"));

  steps.push_back(make_estimate_step(
      "right-subtraction",
      try_add(liminf_estimate_hi(sum_h), liminf_estimate_hi(sum_g))
          .value_or(ExtendedReal::neg_inf()),
      liminf_estimate_hi(sum_f), cfg.tol + 4 * (sum_h.cauchy + sum_g.cauchy + sum_f.cauchy),
      "superadditivity of the integral liminfs"));

  {
    Bracket lhs = int_lf;
    Verdict v = decide(lhs, sum_f.estimate, cfg.tol);
    StepReport final_step;
    final_step.name = "conclusion";
    final_step.lhs = lhs;
    final_step.rhs = sum_f.estimate;
    final_step.verdict = hyp.ok ? v : Verdict::HypothesisFailed;
    final_step.note = "the minorant theorem inequality";
    steps.push_back(final_step);
  }
  return steps;
}

int exit_code_for(Verdict actual, const std::optional<Verdict>& expected) {
  if (expected) {
    if (actual == *expected) return 0;
    return actual == Verdict::Violated ? 1 : 2;
  }
  if (actual == Verdict::Holds) return 0;
  return actual == Verdict::Violated ? 1 : 2;
}

}  // namespace fatou
