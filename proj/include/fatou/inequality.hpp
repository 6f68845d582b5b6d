#pragma once

#include "fatou/converge.hpp"
#include "fatou/envelope.hpp"

namespace fatou {

enum class Verdict { Holds, Violated, Inconclusive, HypothesisFailed };
enum class Inequality { eq1, eq3, eq3_1, eqJ0, teor2, teor3, cor, eqE };

std::string to_string(Verdict v);
std::string to_string(Inequality i);
std::optional<Verdict> verdict_from_string(const std::string& s);
std::optional<Inequality> inequality_from_string(const std::string& s);

struct VerifyConfig {
  GridSpec grid = GridSpec::defaults();
  QuadConfig quad;
  double tol = 1e-7;
  // Probe indices for liminf-over-n traces; defaults to grid.n_schedule.
  std::vector<int> n_probes;

  const std::vector<int>& probes() const { return n_probes.empty() ? grid.n_schedule : n_probes; }
};

// liminf of a probed sequence of integral brackets.  The estimate comes from
// the tail of the trace; strictly monotone tails with non-shrinking
// increments are classified as escaping and open the corresponding side of
// the bracket.  `cauchy` is the magnitude of the last increment and feeds the
// comparison slack of hypothesis checks.
struct LiminfSummary {
  std::vector<std::pair<int, Bracket>> trace;
  Bracket estimate = Bracket::whole();
  bool diverging_below = false;
  bool diverging_above = false;
  bool any_undefined = false;
  double cauchy = 0;
};

LiminfSummary liminf_of_integrals(const std::vector<std::pair<int, IntegralValue>>& values);

struct HypothesisDetail {
  Bracket lhs = Bracket::whole();
  Bracket rhs = Bracket::whole();
  bool ok = false;
  std::string reason;
};

struct InequalityReport {
  Inequality inequality = Inequality::eq1;
  Bracket lhs = Bracket::whole();
  Bracket rhs = Bracket::whole();
  Verdict verdict = Verdict::Inconclusive;
  ExtendedReal margin = 0.0;
  std::optional<HypothesisDetail> hypothesis;
  std::string reason;
  std::vector<std::pair<int, Bracket>> rhs_trace;
  bool lhs_lower_is_declared = false;  // false means the lo side is vacuous
};

// Verdict rule shared by all checks: Holds iff lhs.hi <= rhs.lo + tol,
// Violated iff lhs.lo > rhs.hi (strict separation), else Inconclusive.
// Widening any bracket can only move a verdict toward Inconclusive.
Verdict decide(const Bracket& lhs, const Bracket& rhs, double tol);

// int liminf f_n dmu <= liminf int f_n dmu, single measure (f_n >= 0 probed).
InequalityReport verify_fatou_classic(const FunctionSeq& f, const Measure& mu,
                                      const VerifyConfig& cfg = {});
// Setwise variant: liminf under the integral against mu, integrals against
// mu_n on the right.  Nonnegativity is the hypothesis unless waived (used to
// exhibit the failure for integrands unbounded below).
InequalityReport verify_fatou_setwise(const FunctionSeq& f, const MeasureSeq& mu_seq,
                                      const Measure& mu, const VerifyConfig& cfg = {},
                                      bool waive_nonneg = false);
// Weak variant: the sequential lower limit under the integral on the left.
InequalityReport verify_fatou_weak(const FunctionSeq& f, const MeasureSeq& mu_seq,
                                   const Measure& mu, const VerifyConfig& cfg = {},
                                   Inequality id = Inequality::eq3_1);

// -inf < int (pointwise limsup g_n) dmu <= liminf int g_n dmu_n.
HypothesisDetail check_hypothesis_setwise_minorant(const FunctionSeq& g, const MeasureSeq& mu_seq,
                                                   const Measure& mu, const VerifyConfig& cfg = {});
// -inf < int (seq upper limit g_n) dmu <= liminf int g_n dmu_n.
HypothesisDetail check_hypothesis_weak_minorant(const FunctionSeq& g, const MeasureSeq& mu_seq,
                                                const Measure& mu, const VerifyConfig& cfg = {});

// Setwise Fatou for f_n >= g_n with minorants satisfying the setwise
// hypothesis; HypothesisFailed preempts the inequality verdict.
InequalityReport verify_theorem2(const FunctionSeq& f, const FunctionSeq& g,
                                 const MeasureSeq& mu_seq, const Measure& mu,
                                 const VerifyConfig& cfg = {});
// Weak-convergence version with the envelope hypothesis.
InequalityReport verify_theorem3(const FunctionSeq& f, const FunctionSeq& g,
                                 const MeasureSeq& mu_seq, const Measure& mu,
                                 const VerifyConfig& cfg = {});
// Single minorant g bounded above: the condition compares int (usc envelope
// of g) dmu with lim int g dmu_n.  A g probing to -inf anywhere makes the
// corollary inapplicable.
InequalityReport verify_corollary(const FunctionSeq& f, const Func& g, const MeasureSeq& mu_seq,
                                  const Measure& mu, const VerifyConfig& cfg = {});

// For g_n uniformly bounded above, the weak-minorant condition is equivalent
// to: int (seq upper limit g) dmu = lim int g_n dmu_n > -inf.  Checks both
// forms and that they agree.
struct EquivalenceReport {
  HypothesisDetail condition;    // inequality form
  HypothesisDetail equality;     // equality form
  bool agree = false;
  // The quantity shared by both forms; exact when g is declared continuous
  // and stable (then it reduces to int g dmu).
  Bracket common_value = Bracket::whole();
  std::string note;
};
EquivalenceReport verify_remark_equivalence(const FunctionSeq& g, const MeasureSeq& mu_seq,
                                            const Measure& mu, const VerifyConfig& cfg = {});

struct StepReport {
  std::string name;
  Bracket lhs = Bracket::whole();
  Bracket rhs = Bracket::whole();
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
};

// Steps behind the weak Fatou lemma for f_n >= 0: monotonicity of the
// envelope tail estimates, the lsc portmanteau step for each schedule N, the
// diagonal comparison, the truncation step for a dyadic lambda ladder, and
// the final inequality.
std::vector<StepReport> verify_proof_chain_weak_nonneg(const FunctionSeq& f,
                                                       const MeasureSeq& mu_seq, const Measure& mu,
                                                       const VerifyConfig& cfg = {});

enum class ChainMode { setwise, weak };

// Steps behind the minorant theorems for h_n = f_n - g_n: the pointwise
// superadditivity of lower limits, its integrated form, nonnegative Fatou
// applied to h, and the subtraction step on the right-hand sides.
std::vector<StepReport> verify_proof_chain_minorant(const FunctionSeq& f, const FunctionSeq& g,
                                                    const MeasureSeq& mu_seq, const Measure& mu,
                                                    ChainMode mode, const VerifyConfig& cfg = {});

// Exit status mapping shared with the command line: 0 when the verdict
// matches the expectation (or Holds with no expectation), 1 for an unexpected
// Violated, 2 for other mismatches; errors map to 3 elsewhere.
int exit_code_for(Verdict actual, const std::optional<Verdict>& expected);

}  // namespace fatou
