#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fatou/integrate.hpp"

namespace fatou {

using MeasureSeq = std::function<Measure(int)>;

// Test functions for convergence checking.  bounded_lipschitz draws seeded
// piecewise-linear functions with at most 8 knots, sup norm <= sup_bound and
// Lipschitz constant < lip_bound; indicators draws intervals with rational
// endpoints plus degenerate singletons (space endpoints first).  Generation
// is deterministic in the seed.
struct TestFamily {
  enum class Kind { bounded_lipschitz, indicators, custom };
  Kind kind = Kind::custom;
  std::vector<Func> members;

  static TestFamily bounded_lipschitz(const Space& space, int count, std::uint64_t seed,
                                      double lip_bound = 8.0, double sup_bound = 1.0);
  static TestFamily indicators(const Space& space, int count, std::uint64_t seed);
  static TestFamily custom(std::vector<Func> members);
};

enum class ConvergenceVerdict { consistent, falsified, inconclusive };

struct FunctionDiag {
  std::string label;
  std::vector<std::pair<int, double>> gaps;  // (n, |int f dmu_n - int f dmu|)
  double final_gap = 0;
  double slope = 0;  // least-squares slope of log gap vs log n
  ConvergenceVerdict verdict = ConvergenceVerdict::consistent;
};

struct ConvergenceReport {
  enum class Mode { weak, setwise } mode = Mode::weak;
  std::vector<FunctionDiag> per_function;
  ConvergenceVerdict verdict = ConvergenceVerdict::consistent;
  std::optional<std::string> witness;  // label of the first falsified member
};

// Decay of |int f dmu_n - int f dmu| along n_probe, per family member.
// A member is consistent when its final gap is below tol or the log-log
// trend decays; falsified when the gap stays at or above tol with no decay;
// inconclusive otherwise.  The report verdict is falsified if any member is,
// else inconclusive if any member is, else consistent.
ConvergenceReport check_weak(const MeasureSeq& mu_seq, const Measure& mu, const TestFamily& family,
                             const std::vector<int>& n_probe, double tol = 1e-2,
                             const QuadConfig& quad = {});
// Same decay test over indicator-style set functions (or any family).
ConvergenceReport check_setwise(const MeasureSeq& mu_seq, const Measure& mu,
                                const TestFamily& family, const std::vector<int>& n_probe,
                                double tol = 1e-2, const QuadConfig& quad = {});

std::vector<int> dyadic_schedule(int n_max);

}  // namespace fatou
