#include "fatou/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace fatou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Evaluation of f * density at one coordinate; density 0 absorbs infinities.
using Integrand = std::function<double(double)>;

Integrand make_integrand(const Func& f, const Piece& piece) {
  if (piece.const_density) {
    double c = *piece.const_density;
    auto eval = f.eval;
    return [eval, c](double x) {
      if (c == 0) return 0.0;
      return c * eval(Point(x)).raw();
    };
  }
  auto eval = f.eval;
  auto dens = piece.density.eval;
  return [eval, dens](double x) {
    double rho = dens(Point(x)).raw();
    if (rho <= 0) return 0.0;
    return rho * eval(Point(x)).raw();
  };
}

// Shared refinement geometry for one piece: adaptive core leaves plus fixed
// ladder segments at endpoints where the integrand blows up.
struct PieceGeometry {
  std::vector<std::pair<double, double>> left_ladder;   // toward lo, outermost first
  std::vector<std::pair<double, double>> right_ladder;  // toward hi, outermost first
  std::vector<std::pair<double, double>> core_leaves;   // left to right
  double core_lo = 0, core_hi = 0;
  bool closed_form = false;
};

struct PieceOutcome {
  double sum = 0;
  double slack = 0;
  bool pos_div = false, neg_div = false;
  bool heuristic = false;
};

// Composite Simpson over fixed nodes; identical node set and summation order
// for every integrand sharing the geometry.
double segment_simpson(const Integrand& h, double a, double b, bool& non_finite, double& inf_sign) {
  constexpr int kPanels = 8;
  double step = (b - a) / (2 * kPanels);
  double sum = 0;
  for (int j = 0; j <= 2 * kPanels; ++j) {
    double x = (j == 2 * kPanels) ? b : a + step * j;
    double v = h(x);
    if (!std::isfinite(v)) {
      non_finite = true;
      inf_sign = v > 0 ? 1.0 : -1.0;
      continue;
    }
    double w = (j == 0 || j == 2 * kPanels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    sum += w * v;
  }
  return sum * step / 3.0;
}

// Geometric ladder toward a singular endpoint.  Ratios of consecutive
// segment integrals classify the tail: ratios staying at or above 0.97 mean
// the partial sums do not settle (divergence), smaller ratios give a
// geometric bound on the remainder.
struct LadderOutcome {
  double sum = 0;
  double tail_bound = 0;
  bool divergent = false;
  double divergence_sign = 0;
  bool segment_blowup = false;
  double blowup_sign = 0;
};

LadderOutcome run_ladder(const Integrand& h, const std::vector<std::pair<double, double>>& segments,
                         double abs_tol, double cutoff) {
  LadderOutcome out;
  std::vector<double> mags;
  mags.reserve(segments.size());
  for (const auto& [a, b] : segments) {
    bool nf = false;
    double sign = 0;
    double t = segment_simpson(h, a, b, nf, sign);
    if (nf) {
      out.segment_blowup = true;
      out.blowup_sign = sign;
    }
    out.sum += t;
    mags.push_back(std::fabs(t));
    if (std::fabs(out.sum) > cutoff) {
      out.divergent = true;
      out.divergence_sign = out.sum > 0 ? 1.0 : -1.0;
      return out;
    }
  }
  size_t k = mags.size();
  if (k >= 6 && mags[k - 1] > abs_tol) {
    double min_ratio = kInf;
    for (size_t i = k - 4; i < k; ++i) {
      if (mags[i - 1] == 0) {
        min_ratio = 0;
        break;
      }
      min_ratio = std::min(min_ratio, mags[i] / mags[i - 1]);
    }
    if (min_ratio >= 0.97) {
      out.divergent = true;
      out.divergence_sign = out.sum >= 0 ? 1.0 : -1.0;
      return out;
    }
  }
  // Geometric remainder estimate from the observed decay.
  double r = 0.75;
  if (k >= 2 && mags[k - 2] > 0) r = std::clamp(mags[k - 1] / mags[k - 2], 0.0, 0.995);
  out.tail_bound = (k > 0 ? mags[k - 1] : 0.0) * r / (1 - r);
  return out;
}

std::vector<std::pair<double, double>> ladder_segments(double from, double margin, bool leftward,
                                                       int count) {
  // leftward: segments shrink toward `from` (a singular left endpoint at
  // from); otherwise they shrink toward a singular right endpoint at `from`.
  std::vector<std::pair<double, double>> segs;
  segs.reserve(count);
  for (int kk = 0; kk < count; ++kk) {
    double outer = margin * std::pow(0.5, kk);
    double inner = outer * 0.5;
    if (leftward)
      segs.emplace_back(from + inner, from + outer);
    else
      segs.emplace_back(from - outer, from - inner);
  }
  return segs;
}

constexpr int kLadderSegments = 64;

class AdaptiveCore {
 public:
  AdaptiveCore(const Integrand& h, const QuadConfig& cfg, bool richardson,
               std::vector<std::pair<double, double>>* leaves)
      : h_(h), cfg_(cfg), richardson_(richardson), leaves_(leaves) {}

  double sum = 0;
  double slack = 0;
  bool pos_div = false, neg_div = false;
  bool heuristic = false;

  void run(double a, double b, double tol) {
    double m = 0.5 * (a + b);
    rec(a, m, b, h_(a), h_(m), h_(b), tol, 0);
  }

 private:
  const Integrand& h_;
  const QuadConfig& cfg_;
  bool richardson_;
  std::vector<std::pair<double, double>>* leaves_;

  void rec(double a, double m, double b, double fa, double fm, double fb, double tol, int depth) {
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = h_(lm);
    double frm = h_(rm);
    bool fin = std::isfinite(fa) && std::isfinite(flm) && std::isfinite(fm) &&
               std::isfinite(frm) && std::isfinite(fb);
    if (fin) {
      double s1 = (b - a) / 6.0 * (fa + 4 * fm + fb);
      double s2 = (b - a) / 12.0 * (fa + 4 * flm + 2 * fm + 4 * frm + fb);
      double err = std::fabs(s2 - s1) / 15.0;
      if (err <= tol || depth >= cfg_.max_depth) {
        sum += richardson_ ? s2 + (s2 - s1) / 15.0 : s2;
        slack += err;
        if (depth >= cfg_.max_depth && err > tol) heuristic = true;
        if (leaves_) leaves_->emplace_back(a, b);
        if (std::fabs(sum) > cfg_.divergence_cutoff) {
          (sum > 0 ? pos_div : neg_div) = true;
          heuristic = true;
        }
        return;
      }
    } else if (depth >= cfg_.max_depth) {
      // A blowup that refinement cannot isolate further.
      double bad = !std::isfinite(fa)    ? fa
                   : !std::isfinite(flm) ? flm
                   : !std::isfinite(fm)  ? fm
                   : !std::isfinite(frm) ? frm
                                         : fb;
      (bad > 0 ? pos_div : neg_div) = true;
      heuristic = true;
      return;
    }
    if (pos_div || neg_div) return;
    rec(a, lm, m, fa, flm, fm, tol * 0.5, depth + 1);
    rec(m, rm, b, fm, frm, fb, tol * 0.5, depth + 1);
  }
};

PieceGeometry plan_piece(const Func& f, const Piece& piece, const QuadConfig& cfg,
                         bool allow_closed_form) {
  PieceGeometry geo;
  if (allow_closed_form && cfg.use_antiderivatives && piece.const_density && f.antiderivative) {
    geo.closed_form = true;
    return geo;
  }
  Integrand h = make_integrand(f, piece);
  double lo = piece.lo, hi = piece.hi;
  double len = hi - lo;
  bool left_singular = !std::isfinite(h(lo));
  bool right_singular = !std::isfinite(h(hi));
  geo.core_lo = lo;
  geo.core_hi = hi;
  if (left_singular) {
    double margin = len / 4;
    geo.left_ladder = ladder_segments(lo, margin, true, kLadderSegments);
    geo.core_lo = lo + margin;
  }
  if (right_singular) {
    double margin = len / 4;
    geo.right_ladder = ladder_segments(hi, margin, false, kLadderSegments);
    geo.core_hi = hi - margin;
  }
  AdaptiveCore core(h, cfg, false, &geo.core_leaves);
  core.run(geo.core_lo, geo.core_hi, cfg.abs_tol);
  return geo;
}

// Evaluate one integrand over previously planned geometry.  Node sets,
// weights, and summation order are identical across integrands, so pointwise
// order of integrands is preserved by the results.
PieceOutcome replay_piece(const Func& f, const Piece& piece, const PieceGeometry& geo,
                          const QuadConfig& cfg) {
  PieceOutcome out;
  if (geo.closed_form) {
    const auto& anti = *f.antiderivative;
    double v = *piece.const_density * (anti(piece.hi) - anti(piece.lo));
    // A primitive blowing up at an endpoint makes the closed form infinite.
    if (!std::isfinite(v)) {
      if (v > 0 || std::isnan(v)) out.pos_div = true;
      if (v < 0 || std::isnan(v)) out.neg_div = true;
    } else {
      out.sum = v;
    }
    return out;
  }
  Integrand h = make_integrand(f, piece);
  for (const auto* ladder : {&geo.left_ladder, &geo.right_ladder}) {
    if (ladder->empty()) continue;
    LadderOutcome lad = run_ladder(h, *ladder, cfg.abs_tol, cfg.divergence_cutoff);
    if (lad.divergent || lad.segment_blowup) {
      double sign = lad.divergent ? lad.divergence_sign : lad.blowup_sign;
      (sign > 0 ? out.pos_div : out.neg_div) = true;
      out.heuristic = true;
      continue;
    }
    out.sum += lad.sum;
    out.slack += lad.tail_bound;
    out.heuristic = true;
  }
  for (const auto& [a, b] : geo.core_leaves) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double fa = h(a), flm = h(lm), fm = h(m), frm = h(rm), fb = h(b);
    if (!std::isfinite(fa) || !std::isfinite(flm) || !std::isfinite(fm) || !std::isfinite(frm) ||
        !std::isfinite(fb)) {
      double bad = !std::isfinite(fa)    ? fa
                   : !std::isfinite(flm) ? flm
                   : !std::isfinite(fm)  ? fm
                   : !std::isfinite(frm) ? frm
                                         : fb;
      (bad > 0 ? out.pos_div : out.neg_div) = true;
      out.heuristic = true;
      continue;
    }
    double s1 = (b - a) / 6.0 * (fa + 4 * fm + fb);
    double s2 = (b - a) / 12.0 * (fa + 4 * flm + 2 * fm + 4 * frm + fb);
    out.sum += s2;
    out.slack += std::fabs(s2 - s1) / 15.0;
  }
  if (std::fabs(out.sum) > cfg.divergence_cutoff) {
    (out.sum > 0 ? out.pos_div : out.neg_div) = true;
    out.heuristic = true;
  }
  return out;
}

struct RunOutcome {
  double sum = 0;
  double slack = 0;
  bool pos_div = false, neg_div = false;
  bool exact_pos_inf = false, exact_neg_inf = false;
  bool heuristic = false;
};

// Direct evaluation of f against mu; sound when at most one side of f is
// unbounded (the other part's integral is then finite automatically).
RunOutcome run_direct(const Func& f, const Measure& mu, const QuadConfig& cfg) {
  RunOutcome out;
  for (const auto& a : mu.atoms()) {
    if (a.weight == 0) continue;
    ExtendedReal v = f(a.location);
    if (v.is_pos_inf()) {
      out.exact_pos_inf = true;
    } else if (v.is_neg_inf()) {
      out.exact_neg_inf = true;
    } else {
      out.sum += a.weight * v.raw();
    }
  }
  for (const auto& piece : mu.pieces()) {
    bool closed = cfg.use_antiderivatives && piece.const_density && f.antiderivative.has_value();
    if (closed) {
      const auto& anti = *f.antiderivative;
      double v = *piece.const_density * (anti(piece.hi) - anti(piece.lo));
      // A primitive blowing up at an endpoint makes the closed form infinite.
      if (!std::isfinite(v)) {
        if (v > 0 || std::isnan(v)) out.pos_div = true;
        if (v < 0 || std::isnan(v)) out.neg_div = true;
      } else {
        out.sum += v;
      }
      continue;
    }
    Integrand h = make_integrand(f, piece);
    double core_lo = piece.lo, core_hi = piece.hi;
    double len = piece.hi - piece.lo;
    std::vector<std::pair<double, double>> ladders[2];
    if (!std::isfinite(h(piece.lo))) {
      ladders[0] = ladder_segments(piece.lo, len / 4, true, kLadderSegments);
      core_lo = piece.lo + len / 4;
    }
    if (!std::isfinite(h(piece.hi))) {
      ladders[1] = ladder_segments(piece.hi, len / 4, false, kLadderSegments);
      core_hi = piece.hi - len / 4;
    }
    for (const auto& ladder : ladders) {
      if (ladder.empty()) continue;
      LadderOutcome lad = run_ladder(h, ladder, cfg.abs_tol, cfg.divergence_cutoff);
      if (lad.divergent || lad.segment_blowup) {
        double sign = lad.divergent ? lad.divergence_sign : lad.blowup_sign;
        (sign > 0 ? out.pos_div : out.neg_div) = true;
        out.heuristic = true;
        continue;
      }
      out.sum += lad.sum;
      out.slack += lad.tail_bound;
      out.heuristic = true;
    }
    AdaptiveCore core(h, cfg, true, nullptr);
    core.run(core_lo, core_hi, cfg.abs_tol);
    out.sum += core.sum;
    out.slack += core.slack;
    out.pos_div = out.pos_div || core.pos_div;
    out.neg_div = out.neg_div || core.neg_div;
    out.heuristic = out.heuristic || core.heuristic;
  }
  return out;
}

IntegralValue finish(const RunOutcome& run) {
  IntegralValue out;
  bool pos = run.pos_div || run.exact_pos_inf;
  bool neg = run.neg_div || run.exact_neg_inf;
  out.heuristic = run.heuristic;
  if (pos && neg) {
    out.defined = false;
    out.diverged = DivergedPart::both;
    out.value = 0.0;
    out.bracket = Bracket::whole();
    return out;
  }
  if (pos) {
    out.diverged = DivergedPart::positive;
    out.value = ExtendedReal::pos_inf();
    out.bracket = run.exact_pos_inf && !run.pos_div
                      ? Bracket::exact(ExtendedReal::pos_inf())
                      : Bracket(ExtendedReal(run.sum - run.slack), ExtendedReal::pos_inf());
    return out;
  }
  if (neg) {
    out.diverged = DivergedPart::negative;
    out.value = ExtendedReal::neg_inf();
    out.bracket = run.exact_neg_inf && !run.neg_div
                      ? Bracket::exact(ExtendedReal::neg_inf())
                      : Bracket(ExtendedReal::neg_inf(), ExtendedReal(run.sum + run.slack));
    return out;
  }
  out.value = run.sum;
  out.bracket = Bracket(ExtendedReal(run.sum - run.slack), ExtendedReal(run.sum + run.slack));
  return out;
}

}  // namespace

std::pair<Func, Func> split_parts(const Func& f) {
  Func pos, neg;
  auto base = f.eval;
  pos.eval = [base](const Point& p) { return max(base(p), ExtendedReal(0.0)); };
  neg.eval = [base](const Point& p) { return max(-base(p), ExtendedReal(0.0)); };
  pos.lower_bound = 0.0;
  neg.lower_bound = 0.0;
  pos.label = f.label.empty() ? "" : "(" + f.label + ")+";
  neg.label = f.label.empty() ? "" : "(" + f.label + ")-";
  return {pos, neg};
}

IntegralValue integrate(const Func& f, const Measure& mu, const QuadConfig& cfg) {
  if (f.lower_bound || f.upper_bound) return finish(run_direct(f, mu, cfg));
  auto [fp, fm] = split_parts(f);
  RunOutcome pos = run_direct(fp, mu, cfg);
  RunOutcome neg = run_direct(fm, mu, cfg);
  RunOutcome merged;
  merged.heuristic = pos.heuristic || neg.heuristic;
  bool pdiv = pos.pos_div || pos.exact_pos_inf;
  bool ndiv = neg.pos_div || neg.exact_pos_inf;
  if (pdiv && ndiv) {
    IntegralValue out;
    out.defined = false;
    out.diverged = DivergedPart::both;
    out.bracket = Bracket::whole();
    out.heuristic = merged.heuristic;
    return out;
  }
  if (pdiv) {
    IntegralValue out;
    out.diverged = DivergedPart::positive;
    out.value = ExtendedReal::pos_inf();
    out.heuristic = merged.heuristic;
    out.bracket = pos.exact_pos_inf && !pos.pos_div
                      ? Bracket::exact(ExtendedReal::pos_inf())
                      : Bracket(ExtendedReal(pos.sum - pos.slack - neg.sum - neg.slack),
                                ExtendedReal::pos_inf());
    return out;
  }
  if (ndiv) {
    IntegralValue out;
    out.diverged = DivergedPart::negative;
    out.value = ExtendedReal::neg_inf();
    out.heuristic = merged.heuristic;
    out.bracket = neg.exact_pos_inf && !neg.pos_div
                      ? Bracket::exact(ExtendedReal::neg_inf())
                      : Bracket(ExtendedReal::neg_inf(),
                                ExtendedReal(pos.sum + pos.slack - neg.sum + neg.slack));
    return out;
  }
  merged.sum = pos.sum - neg.sum;
  merged.slack = pos.slack + neg.slack;
  return finish(merged);
}

DivergedPart divergence_probe(const Func& f, const Measure& mu, const QuadConfig& cfg) {
  return integrate(f, mu, cfg).diverged;
}

std::vector<IntegralValue> integrate_family_shared(const std::vector<Func>& fs, const Measure& mu,
                                                   const QuadConfig& cfg) {
  std::vector<IntegralValue> out;
  if (fs.empty()) return out;
  const Func& driver = fs.back();
  std::vector<PieceGeometry> plans;
  plans.reserve(mu.pieces().size());
  for (const auto& piece : mu.pieces()) plans.push_back(plan_piece(driver, piece, cfg, false));
  out.reserve(fs.size());
  for (const auto& f : fs) {
    RunOutcome run;
    for (const auto& a : mu.atoms()) {
      if (a.weight == 0) continue;
      ExtendedReal v = f(a.location);
      if (v.is_pos_inf()) {
        run.exact_pos_inf = true;
      } else if (v.is_neg_inf()) {
        run.exact_neg_inf = true;
      } else {
        run.sum += a.weight * v.raw();
      }
    }
    for (std::size_t i = 0; i < mu.pieces().size(); ++i) {
      PieceOutcome po = replay_piece(f, mu.pieces()[i], plans[i], cfg);
      run.sum += po.sum;
      run.slack += po.slack + cfg.abs_tol;
      run.pos_div = run.pos_div || po.pos_div;
      run.neg_div = run.neg_div || po.neg_div;
      run.heuristic = run.heuristic || po.heuristic;
    }
    out.push_back(finish(run));
  }
  return out;
}

}  // namespace fatou
