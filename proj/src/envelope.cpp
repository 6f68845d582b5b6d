#include "fatou/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "fatou/parallel.hpp"

namespace fatou {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Probe points grouped by eps scale.  The probe set of eps_schedule[k] is
// {center} plus every scale from k to the end; coarser sets therefore contain
// finer ones and sampled ball infima are monotone across the schedule.
struct ProbeLadder {
  Point center;
  std::vector<std::vector<Point>> scales;
};

ProbeLadder make_ladder(const Space& space, const Point& center, const GridSpec& spec,
                        const Grid* grid) {
  ProbeLadder ladder;
  ladder.center = center;
  ladder.scales.resize(spec.eps_schedule.size());
  for (std::size_t k = 0; k < spec.eps_schedule.size(); ++k) {
    double eps = spec.eps_schedule[k];
    auto& out = ladder.scales[k];
    if (space.is_interval()) {
      int half = std::max(1, spec.probes_per_ball / 2);
      for (int i = 1; i <= half; ++i) {
        double off = eps * (i * kGolden - std::floor(i * kGolden));
        for (double x : {center.value - off, center.value + off}) {
          Point p(x);
          if (space.contains(p)) out.push_back(p);
        }
      }
    } else {
      // Exact rational steps; their enumeration indices are far beyond any
      // materialized prefix, so prefix-membership tests on them are sound.
      auto eps_rat = Rational::from_double_exact(eps);
      if (eps_rat && center.exact) {
        int c = std::max(4, spec.probes_per_ball / 8);
        for (int i = 1; i <= c; ++i) {
          Rational off = *eps_rat * Rational(i, c + 1);
          for (const Rational& r : {*center.exact - off, *center.exact + off}) {
            Point p(r);
            if (space.contains(p)) out.push_back(p);
          }
        }
      }
      const Enumeration& en = space.enumeration();
      for (int idx : en.indices_near(center.value, eps, std::max(1, spec.probes_per_ball / 2))) {
        Point p(en.at(idx));
        if (center.exact && *center.exact == en.at(idx)) continue;
        out.push_back(p);
      }
    }
    if (grid) {
      for (const Point& p : grid->points) {
        if (p.same_location(center)) continue;
        if (std::fabs(p.value - center.value) <= eps) out.push_back(p);
      }
    }
  }
  return ladder;
}

}  // namespace

GridSpec GridSpec::defaults() {
  GridSpec g;
  for (int k = 3; k <= 15; k += 2) g.eps_schedule.push_back(std::ldexp(1.0, -k));
  for (int n = 1; n <= 1024; n *= 2) g.n_schedule.push_back(n);
  g.m_max = 4096;
  g.probes_per_ball = 64;
  g.grid_points = 33;
  return g;
}

GridSpec GridSpec::light() {
  GridSpec g;
  for (int k = 3; k <= 7; k += 2) g.eps_schedule.push_back(std::ldexp(1.0, -k));
  for (int n = 1; n <= 64; n *= 2) g.n_schedule.push_back(n);
  g.m_max = 256;
  g.probes_per_ball = 16;
  g.grid_points = 17;
  return g;
}

Grid make_grid(const Space& space, GridSpec spec, const std::vector<Point>& extras) {
  Grid grid;
  grid.spec = spec;
  grid.space = space;
  std::vector<Point> pts;
  if (space.is_interval()) {
    double lo = space.lo(), hi = space.hi(), len = hi - lo;
    int n = std::max(2, spec.grid_points);
    for (int i = 0; i < n; ++i) {
      Point p(lo + len * i / (n - 1));
      if (space.contains(p)) pts.push_back(p);
    }
    if (!space.lo_closed())
      for (int k = 4; k <= 12; ++k) pts.push_back(Point(lo + len * std::ldexp(1.0, -k)));
    if (!space.hi_closed())
      for (int k = 4; k <= 12; ++k) pts.push_back(Point(hi - len * std::ldexp(1.0, -k)));
  } else {
    const Enumeration& en = space.enumeration();
    int n = std::min(spec.grid_points, en.size());
    for (int i = 1; i <= n; ++i) pts.push_back(Point(en.at(i)));
  }
  for (const Point& p : extras) {
    if (space.contains(p)) pts.push_back(p);
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const Point& a, const Point& b) { return a.value < b.value; });
  for (const Point& p : pts) {
    if (!grid.points.empty() && grid.points.back().same_location(p)) continue;
    grid.points.push_back(p);
  }
  return grid;
}

std::vector<Point> ball_probes(const Space& space, const Point& center, const GridSpec& spec,
                               const Grid* grid) {
  ProbeLadder ladder = make_ladder(space, center, spec, grid);
  std::vector<Point> out;
  out.push_back(center);
  for (const auto& scale : ladder.scales) out.insert(out.end(), scale.begin(), scale.end());
  return out;
}

Bracket tail_inf(const FunctionSeq& f, int n, const Point& s, int m_max) {
  bool exact = f.stable_after && *f.stable_after <= m_max;
  int hi_m = exact ? std::max(n, *f.stable_after) : m_max;
  ExtendedReal best = f(n, s);
  for (int m = n + 1; m <= hi_m; ++m) best = min(best, f(m, s));
  if (exact) return Bracket::exact(best);
  ExtendedReal lo = f.known_lower_bound ? ExtendedReal(*f.known_lower_bound)
                                        : ExtendedReal::neg_inf();
  return Bracket(min(lo, best), best);
}

std::vector<ExtendedReal> tail_inf_schedule(const FunctionSeq& f, const Point& s,
                                            const std::vector<int>& n_schedule, int m_max) {
  int n_last = n_schedule.empty() ? 1 : n_schedule.back();
  int w = (f.stable_after && *f.stable_after <= m_max)
              ? std::max(n_last, *f.stable_after)
              : std::max(m_max, n_last);
  std::vector<ExtendedReal> vals;
  vals.reserve(w);
  for (int m = 1; m <= w; ++m) vals.push_back(f(m, s));
  // One backward sweep of suffix minima, read off at the schedule marks.
  std::vector<ExtendedReal> out(n_schedule.size(), ExtendedReal::pos_inf());
  ExtendedReal running = ExtendedReal::pos_inf();
  int next = static_cast<int>(n_schedule.size()) - 1;
  for (int m = w; m >= 1 && next >= 0; --m) {
    running = min(running, vals[m - 1]);
    while (next >= 0 && n_schedule[next] == m) {
      out[next] = running;
      --next;
    }
  }
  return out;
}

namespace {

ExtendedReal sampled_inf(const Func& u, const ProbeLadder& ladder, std::size_t from_scale) {
  ExtendedReal best = u(ladder.center);
  for (std::size_t k = from_scale; k < ladder.scales.size(); ++k)
    for (const Point& p : ladder.scales[k]) best = min(best, u(p));
  return best;
}

}  // namespace

Bracket lsc_envelope_at(const Func& u, const Space& space, const Point& s, const GridSpec& spec,
                        const Grid* grid) {
  if (u.continuous) return Bracket::exact(u(s));
  ProbeLadder ladder = make_ladder(space, s, spec, grid);
  std::size_t last = ladder.scales.empty() ? 0 : ladder.scales.size() - 1;
  ExtendedReal hi = sampled_inf(u, ladder, last);
  ExtendedReal lo = u.lower_bound ? ExtendedReal(*u.lower_bound) : ExtendedReal::neg_inf();
  return Bracket(min(lo, hi), hi);
}

Bracket usc_envelope_at(const Func& u, const Space& space, const Point& s, const GridSpec& spec,
                        const Grid* grid) {
  return -lsc_envelope_at(u.negated(), space, s, spec, grid);
}

std::vector<ExtendedReal> lsc_envelope_trace(const Func& u, const Space& space, const Point& s,
                                             const GridSpec& spec, const Grid* grid) {
  ProbeLadder ladder = make_ladder(space, s, spec, grid);
  std::size_t n = ladder.scales.size();
  std::vector<ExtendedReal> out(n, u(s));
  // Suffix infima over scales: coarser balls see every finer probe as well.
  ExtendedReal running = u(ladder.center);
  for (std::size_t k = n; k-- > 0;) {
    for (const Point& p : ladder.scales[k]) running = min(running, u(p));
    out[k] = running;
  }
  return out;
}

std::vector<Bracket> lsc_envelope(const Func& u, const Grid& grid) {
  std::vector<Bracket> out(grid.points.size());
  parallel_for(grid.points.size(), [&](std::size_t i) {
    out[i] = lsc_envelope_at(u, grid.space, grid.points[i], grid.spec, &grid);
  });
  return out;
}

std::vector<Bracket> usc_envelope(const Func& u, const Grid& grid) {
  std::vector<Bracket> out(grid.points.size());
  parallel_for(grid.points.size(), [&](std::size_t i) {
    out[i] = usc_envelope_at(u, grid.space, grid.points[i], grid.spec, &grid);
  });
  return out;
}

SeqLowerLimit::SeqLowerLimit(FunctionSeq f, Space space, GridSpec spec)
    : f_(std::move(f)), space_(std::move(space)), spec_(std::move(spec)) {}

Bracket SeqLowerLimit::at(const Point& s) const {
  bool stable = f_.stable_after && *f_.stable_after <= spec_.m_max;
  if (stable && f_.continuous) {
    // Constant continuous tails make the limit the tail value itself.
    return Bracket::exact(f_(*f_.stable_after, s));
  }
  ProbeLadder ladder = make_ladder(space_, s, spec_, nullptr);
  std::size_t last = ladder.scales.empty() ? 0 : ladder.scales.size() - 1;
  int n_last = spec_.n_schedule.empty() ? 1 : spec_.n_schedule.back();
  auto window_min = [&](const Point& p) {
    int hi_m = stable ? std::max(n_last, *f_.stable_after) : spec_.m_max;
    ExtendedReal best = f_(n_last, p);
    for (int m = n_last + 1; m <= hi_m; ++m) best = min(best, f_(m, p));
    return best;
  };
  ExtendedReal hi = window_min(ladder.center);
  for (std::size_t k = last; k < ladder.scales.size(); ++k)
    for (const Point& p : ladder.scales[k]) hi = min(hi, window_min(p));
  ExtendedReal lo = f_.known_lower_bound ? ExtendedReal(*f_.known_lower_bound)
                                         : ExtendedReal::neg_inf();
  return Bracket(min(lo, hi), hi);
}

std::vector<ExtendedReal> SeqLowerLimit::trace_at(const Point& s) const {
  ProbeLadder ladder = make_ladder(space_, s, spec_, nullptr);
  std::size_t last = ladder.scales.empty() ? 0 : ladder.scales.size() - 1;
  std::vector<ExtendedReal> best = tail_inf_schedule(f_, ladder.center, spec_.n_schedule,
                                                     spec_.m_max);
  for (std::size_t k = last; k < ladder.scales.size(); ++k) {
    for (const Point& p : ladder.scales[k]) {
      std::vector<ExtendedReal> t = tail_inf_schedule(f_, p, spec_.n_schedule, spec_.m_max);
      for (std::size_t i = 0; i < best.size(); ++i) best[i] = min(best[i], t[i]);
    }
  }
  return best;
}

std::vector<Bracket> SeqLowerLimit::on_grid(const Grid& grid) const {
  std::vector<Bracket> out(grid.points.size());
  parallel_for(grid.points.size(), [&](std::size_t i) { out[i] = at(grid.points[i]); });
  return out;
}

SeqUpperLimit::SeqUpperLimit(FunctionSeq g, Space space, GridSpec spec)
    : dual_(g.negated(), std::move(space), std::move(spec)) {}

Bracket SeqUpperLimit::at(const Point& s) const { return -dual_.at(s); }

std::vector<ExtendedReal> SeqUpperLimit::trace_at(const Point& s) const {
  std::vector<ExtendedReal> t = dual_.trace_at(s);
  for (auto& v : t) v = -v;
  return t;
}

std::vector<Bracket> SeqUpperLimit::on_grid(const Grid& grid) const {
  std::vector<Bracket> out(grid.points.size());
  parallel_for(grid.points.size(), [&](std::size_t i) { out[i] = at(grid.points[i]); });
  return out;
}

Bracket pointwise_liminf(const FunctionSeq& f, const Point& s, const std::vector<int>& n_schedule,
                         int m_max) {
  if (f.stable_after && *f.stable_after <= m_max) {
    return Bracket::exact(f(*f.stable_after, s));
  }
  int n_last = n_schedule.empty() ? 1 : n_schedule.back();
  return tail_inf(f, n_last, s, m_max);
}

Bracket pointwise_limsup(const FunctionSeq& f, const Point& s, const std::vector<int>& n_schedule,
                         int m_max) {
  return -pointwise_liminf(f.negated(), s, n_schedule, m_max);
}

}  // namespace fatou
