#pragma once

#include <memory>
#include <vector>

#include "fatou/bracket.hpp"
#include "fatou/func.hpp"
#include "fatou/space.hpp"

namespace fatou {

// Sampling schedules for envelope and limit estimation.  eps_schedule is
// strictly decreasing, n_schedule strictly increasing.  Probe sets are nested
// across the eps schedule, so sampled ball infima are monotone in eps.
struct GridSpec {
  std::vector<double> eps_schedule;
  std::vector<int> n_schedule;
  int m_max = 4096;
  int probes_per_ball = 64;
  int grid_points = 33;

  static GridSpec defaults();
  // Reduced schedules for randomized property suites.
  static GridSpec light();

  double eps_min() const { return eps_schedule.back(); }
  int n_last() const { return n_schedule.back(); }
};

// Evaluation points for grid-wide envelope reports: a uniform spread over an
// interval space (with a dyadic ladder toward open endpoints) or an
// enumeration prefix for a countable space, plus caller extras such as atom
// locations.
struct Grid {
  Space space;
  GridSpec spec;
  std::vector<Point> points;
};

Grid make_grid(const Space& space, GridSpec spec, const std::vector<Point>& extras = {});

// Probe points of the closed ball B_eps(center) within the space, center
// first.  Offsets use golden-ratio fractions on interval spaces (so rational
// centers get irrational neighbors) and exact small-denominator rational
// steps on countable spaces; enumerated points near the center and grid
// points inside the ball are included.
std::vector<Point> ball_probes(const Space& space, const Point& center, const GridSpec& spec,
                               const Grid* grid);

// inf over m in [n, min(m_max, stabilization)] of f_m(s); hi is that sampled
// minimum, lo is the declared lower bound or -inf.
Bracket tail_inf(const FunctionSeq& f, int n, const Point& s, int m_max);

// Sampled values of min over m in [N, m_max] of f_m(s) for each N of the
// schedule, one backward sweep.  Nondecreasing in N exactly.
std::vector<ExtendedReal> tail_inf_schedule(const FunctionSeq& f, const Point& s,
                                            const std::vector<int>& n_schedule, int m_max);

// Lower semicontinuous envelope estimate at a point: min of u over the probe
// set of B_eps_min(s).  Sampling can only overestimate an infimum, so the
// sampled value is the hi side; lo comes from the declared bound.
Bracket lsc_envelope_at(const Func& u, const Space& space, const Point& s, const GridSpec& spec,
                        const Grid* grid = nullptr);
Bracket usc_envelope_at(const Func& u, const Space& space, const Point& s, const GridSpec& spec,
                        const Grid* grid = nullptr);

// Per-eps trace of sampled ball infima (monotone nondecreasing as eps
// shrinks, by probe nesting).
std::vector<ExtendedReal> lsc_envelope_trace(const Func& u, const Space& space, const Point& s,
                                             const GridSpec& spec, const Grid* grid = nullptr);

std::vector<Bracket> lsc_envelope(const Func& u, const Grid& grid);
std::vector<Bracket> usc_envelope(const Func& u, const Grid& grid);

// liminf over n -> inf, s' -> s of f_n(s'), with non-deleted neighborhoods:
// the monotone limit of lsc envelopes of tail infima.  The per-N estimates
// are nondecreasing exactly (fixed probe set, shrinking tail window); the
// bracket is [declared lower bound or -inf, last-N estimate].
class SeqLowerLimit {
 public:
  SeqLowerLimit(FunctionSeq f, Space space, GridSpec spec);

  Bracket at(const Point& s) const;
  // E_N for each N of the schedule.
  std::vector<ExtendedReal> trace_at(const Point& s) const;
  std::vector<Bracket> on_grid(const Grid& grid) const;

  const FunctionSeq& seq() const { return f_; }
  const GridSpec& spec() const { return spec_; }

 private:
  FunctionSeq f_;
  Space space_;
  GridSpec spec_;
};

// Dual: limsup over n -> inf, s' -> s of g_n(s'), computed by negation of
// SeqLowerLimit so the duality is exact in every bit.
class SeqUpperLimit {
 public:
  SeqUpperLimit(FunctionSeq g, Space space, GridSpec spec);

  Bracket at(const Point& s) const;
  std::vector<ExtendedReal> trace_at(const Point& s) const;
  std::vector<Bracket> on_grid(const Grid& grid) const;

 private:
  SeqLowerLimit dual_;
};

// liminf / limsup over n alone (no spatial envelope).
Bracket pointwise_liminf(const FunctionSeq& f, const Point& s, const std::vector<int>& n_schedule,
                         int m_max);
Bracket pointwise_limsup(const FunctionSeq& f, const Point& s, const std::vector<int>& n_schedule,
                         int m_max);

}  // namespace fatou
