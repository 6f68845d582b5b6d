#pragma once

#include <cstdint>

#include "fatou/expr.hpp"
#include "fatou/inequality.hpp"

namespace fatou {

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TargetSpec {
  Inequality inequality = Inequality::eq3_1;
  bool waive_nonneg = false;
  std::optional<Verdict> expected;
  std::optional<double> expected_lhs, expected_rhs;
  std::string note;
};

struct ConvergenceExpectation {
  std::optional<ConvergenceVerdict> weak;
  std::optional<ConvergenceVerdict> setwise;
};

// One verification instance: the space, the measure sequence and its limit,
// the integrand sequence, optional minorants, and the inequality targets with
// expected verdicts.  Built-ins and generated scenarios all carry their
// canonical text form, so save/load round-trips are exact.
struct Scenario {
  std::string name;
  std::string description;
  Space space = Space::interval(0, 1);
  MeasureSeq mu_seq;
  Measure mu_limit = Measure::dirac(Space::interval(0, 1), Point(0.0));
  FunctionSeq fseq;
  std::optional<FunctionSeq> gseq;
  std::optional<Func> minorant;  // single minorant for corollary targets
  std::vector<TargetSpec> targets;
  ConvergenceExpectation convergence;
  GridSpec grid = GridSpec::defaults();
  std::optional<expr::NodePtr> sweep_closed_form;  // expression in n
  std::string source_text;
};

// Point mass escaping to the boundary: mu_n = dirac(1/n) on [0, 1],
// mu = dirac(0), f = 1{s = 0}.
Scenario scenario_escaping_atom();

enum class SpikeVariant { negative_f, positive_f };
// The spike measures on (0, 1] with f = -1/s (integrals diverge to -inf) or
// f = +1/s (both sides strict).
Scenario scenario_escaping_spike(SpikeVariant variant);

// The countable-space construction: S = rationals in (0, 1], f_n = g_n =
// -n * 1{first n enumerated}, mu_n a point mass at k_n/(k_n+1) chosen outside
// the first n enumerated values, mu = dirac(1).
Scenario scenario_rational_support(int n_max = 2048);

// f_n = -1 + n * 1{(0, 1/n)} over the uniform measure with minorant -1; both
// sides have closed forms (-1 and 0).
Scenario scenario_uniform_spike_minorant();

// f_n = n * 1{(0, 1/n)} over the uniform measure; mass escapes under the
// classic lemma with lhs 0 and rhs 1.
Scenario scenario_escaping_mass_classic();

enum class RandomProfile { nonneg_weak, setwise_minorant, weak_minorant };
std::string to_string(RandomProfile p);
std::optional<RandomProfile> profile_from_string(const std::string& s);

// Seeded random scenario: atomic measures with atoms drifting at rate 1/n
// (weak convergence by construction; the setwise profile keeps mu_n = mu) and
// piecewise-linear integrands from the expression language, sign-structured
// per profile.  Deterministic in (seed, profile).
Scenario generate_random(std::uint64_t seed, RandomProfile profile);

Scenario load_scenario(const std::string& path);
Scenario load_scenario_text(const std::string& text, const std::string& origin = "<memory>");
std::string save_scenario(const Scenario& s);

std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name);
bool is_builtin_scenario(const std::string& name);

InequalityReport run_target(const Scenario& s, const TargetSpec& target, const VerifyConfig& cfg);
EquivalenceReport run_equivalence(const Scenario& s, const VerifyConfig& cfg);
VerifyConfig config_for(const Scenario& s);

}  // namespace fatou
