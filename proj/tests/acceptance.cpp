// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Every numeric bound here is frozen; loosening one is a red flag.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "fatou/scenarios.hpp"

using namespace fatou;

namespace {

int g_failures = 0;

void report(int idx, bool ok, const std::string& what, const std::string& detail) {
  if (ok) {
    std::printf("PASS criterion %d: %s\n", idx, what.c_str());
  } else {
    ++g_failures;
    std::printf("FAIL criterion %d: %s (%s)\n", idx, what.c_str(), detail.c_str());
  }
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Collects the first few failures so a FAIL line stays readable.
struct Check {
  bool ok = true;
  std::string detail;
  int noted = 0;

  void expect(bool cond, const std::string& msg) {
    if (cond) return;
    ok = false;
    if (noted < 4) {
      if (!detail.empty()) detail += "; ";
      detail += msg;
    }
    ++noted;
  }
};

const TargetSpec* find_target(const Scenario& s, Inequality id) {
  for (const TargetSpec& t : s.targets)
    if (t.inequality == id) return &t;
  return nullptr;
}

double spike_closed_form(double n) {
  return -std::log(2.0) * (std::sqrt(n) + 2.0 - 1.0 / std::sqrt(n));
}

// Matches the generator used by the envelope unit tests: seeded hinge plus
// jump, bounded, not declared continuous.
Func random_hinge(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> knot(0.05, 0.95);
  double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), jump = coef(rng);
  double t1 = knot(rng), t2 = knot(rng), t3 = knot(rng);
  Func f;
  f.eval = [=](const Point& p) {
    double s = p.value;
    return ExtendedReal(c0 + c1 * std::fabs(s - t1) + c2 * std::fabs(s - t2) +
                        jump * (s > t3 ? 1.0 : 0.0));
  };
  f.lower_bound = -12.0;
  f.upper_bound = 12.0;
  return f;
}

RandomProfile profile_cycle(std::uint64_t seed) {
  switch (seed % 3) {
    case 0: return RandomProfile::weak_minorant;
    case 1: return RandomProfile::nonneg_weak;
    default: return RandomProfile::setwise_minorant;
  }
}

std::string run_cli_capture(const std::string& args, int& exit_code) {
  std::string cmd = std::string(FATOU_CLI_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    exit_code = -1;
    return {};
  }
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  int status = pclose(pipe);
  exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

void criterion_1() {
  auto start = std::chrono::steady_clock::now();
  Check c;

  Scenario s = builtin_scenario("escaping-spike-negative");
  Func f = s.fseq.at(1);
  double exact = -2.0 * std::log(2.0);

  IntegralValue closed = integrate(f, s.mu_limit);
  c.expect(std::fabs(closed.value.raw() - exact) <= 1e-9,
           "antiderivative path gave " + num(closed.value.raw()));

  QuadConfig pure;
  pure.use_antiderivatives = false;
  IntegralValue quad = integrate(f, s.mu_limit, pure);
  c.expect(std::fabs(quad.value.raw() - exact) <= 1e-6,
           "pure quadrature gave " + num(quad.value.raw()));

  for (int n : {1, 4, 100, 10000}) {
    IntegralValue v = integrate(s.fseq.at(n), s.mu_seq(n));
    double want = spike_closed_form(n);
    c.expect(std::fabs(v.value.raw() - want) <= 1e-6,
             "n=" + std::to_string(n) + " gave " + num(v.value.raw()) + " want " + num(want));
  }

  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(elapsed < 1.0, "took " + num(elapsed) + " s");
  report(1, c.ok, "shrinking-spike integrals match closed forms within stated tolerances",
         c.detail);
}

void criterion_2() {
  Check c;
  Scenario s = builtin_scenario("escaping-spike-negative");

  double prev = 0.0;
  bool first = true;
  for (int n = 1; n <= 400; ++n) {
    double v = integrate(s.fseq.at(n), s.mu_seq(n)).value.raw();
    if (n >= 160) c.expect(v < -10.0, "n=" + std::to_string(n) + " gave " + num(v));
    if (!first) c.expect(v < prev, "not decreasing at n=" + std::to_string(n));
    prev = v;
    first = false;
  }
  for (int n = 512; n <= 16384; n *= 2) {
    double v = integrate(s.fseq.at(n), s.mu_seq(n)).value.raw();
    c.expect(v < -10.0 && v < prev, "dyadic n=" + std::to_string(n) + " gave " + num(v));
    prev = v;
  }
  report(2, c.ok, "spike integrals stay below -10 from n = 160 on and decrease monotonically",
         c.detail);
}

void criterion_3() {
  Check c;
  Scenario s = builtin_scenario("escaping-atom");
  VerifyConfig cfg = config_for(s);

  const TargetSpec* setwise = find_target(s, Inequality::eq3);
  const TargetSpec* weak = find_target(s, Inequality::eq3_1);
  c.expect(setwise && weak, "targets missing");
  if (setwise) {
    InequalityReport r = run_target(s, *setwise, cfg);
    c.expect(r.verdict == Verdict::Violated, "setwise verdict " + to_string(r.verdict));
    c.expect(r.lhs.lo.raw() == 1.0 && r.lhs.hi.raw() == 1.0,
             "setwise lhs [" + num(r.lhs.lo.raw()) + ", " + num(r.lhs.hi.raw()) + "]");
    c.expect(r.rhs.lo.raw() == 0.0 && r.rhs.hi.raw() == 0.0,
             "setwise rhs [" + num(r.rhs.lo.raw()) + ", " + num(r.rhs.hi.raw()) + "]");
  }
  if (weak) {
    InequalityReport r = run_target(s, *weak, cfg);
    c.expect(r.verdict == Verdict::Holds, "weak verdict " + to_string(r.verdict));
    c.expect(r.lhs.lo.raw() == 0.0 && r.lhs.hi.raw() == 0.0 && r.rhs.lo.raw() == 0.0 &&
                 r.rhs.hi.raw() == 0.0,
             "weak sides not exactly zero");
  }
  report(3, c.ok,
         "escaping point mass: setwise check Violated at lhs 1 rhs 0, weak check Holds at 0",
         c.detail);
}

void criterion_4() {
  Check c;
  Scenario atom = builtin_scenario("escaping-atom");
  VerifyConfig cfg = config_for(atom);
  std::vector<int> schedule = dyadic_schedule(1024);

  TestFamily lip = TestFamily::bounded_lipschitz(atom.space, 64, 1);
  ConvergenceReport weak = check_weak(atom.mu_seq, atom.mu_limit, lip, schedule, 1e-2, cfg.quad);
  c.expect(weak.verdict == ConvergenceVerdict::consistent, "sliding atom not weak-consistent");
  for (const FunctionDiag& d : weak.per_function)
    c.expect(d.final_gap < 8.0 / 1024.0, d.label + " final gap " + num(d.final_gap));

  TestFamily ind = TestFamily::indicators(atom.space, 200, 1);
  ConvergenceReport setw = check_setwise(atom.mu_seq, atom.mu_limit, ind, schedule, 1e-2, cfg.quad);
  c.expect(setw.verdict == ConvergenceVerdict::falsified, "sliding atom not setwise-falsified");
  c.expect(setw.witness && *setw.witness == "ind(s == 0)",
           "witness " + (setw.witness ? *setw.witness : std::string("<none>")));

  Scenario spike = builtin_scenario("escaping-spike-negative");
  TestFamily ind2 = TestFamily::indicators(spike.space, 200, 1);
  ConvergenceReport spike_setw =
      check_setwise(spike.mu_seq, spike.mu_limit, ind2, schedule, 1e-2, config_for(spike).quad);
  c.expect(spike_setw.verdict == ConvergenceVerdict::consistent,
           "spike measures not setwise-consistent on 200 indicators");

  report(4, c.ok,
         "convergence discrimination: sliding atom weak-only, spike measures setwise on 200 "
         "indicators",
         c.detail);
}

void criterion_5() {
  auto start = std::chrono::steady_clock::now();
  Check c;

  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Scenario r = generate_random(seed, RandomProfile::nonneg_weak);
    VerifyConfig cfg = config_for(r);
    for (const TargetSpec& t : r.targets) {
      InequalityReport rep = run_target(r, t, cfg);
      c.expect(rep.verdict != Verdict::Violated,
               "seed " + std::to_string(seed) + " " + to_string(t.inequality) + " Violated");
    }
    // Purely atomic by construction, so weighted sums are the exact oracle.
    for (int n : cfg.probes()) {
      Measure mu_n = r.mu_seq(n);
      c.expect(mu_n.purely_atomic(), "seed " + std::to_string(seed) + " not atomic");
      double manual = 0.0;
      for (const Atom& a : mu_n.atoms()) manual += a.weight * r.fseq(n, a.location).raw();
      double lib = integrate(r.fseq.at(n), mu_n, cfg.quad).value.raw();
      c.expect(std::fabs(lib - manual) <= 1e-10,
               "seed " + std::to_string(seed) + " n=" + std::to_string(n) + " integral " +
                   num(lib) + " vs sum " + num(manual));
    }
    double limit_manual = 0.0;
    for (const Atom& a : r.mu_limit.atoms())
      limit_manual += a.weight * r.fseq(cfg.grid.n_last(), a.location).raw();
    double limit_lib = integrate(r.fseq.at(cfg.grid.n_last()), r.mu_limit, cfg.quad).value.raw();
    c.expect(std::fabs(limit_lib - limit_manual) <= 1e-10,
             "seed " + std::to_string(seed) + " limit integral off");
  }

  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(elapsed < 30.0, "took " + num(elapsed) + " s");
  report(5, c.ok,
         "200 random nonnegative-weak scenarios: zero Violated, integrals match atomic sums",
         c.detail);
}

void verify_chain_steps(Check& c, const std::string& label,
                        const std::vector<StepReport>& steps) {
  c.expect(!steps.empty(), label + ": empty chain");
  for (const StepReport& st : steps)
    c.expect(st.verdict != Verdict::Violated, label + " step " + st.name + " Violated");
}

void criterion_6_scenario(Check& c, const Scenario& s, const VerifyConfig& cfg, bool trace_grid) {
  // Envelope tail estimates must rise exactly along the schedule.
  if (trace_grid) {
    SeqLowerLimit slim(s.fseq, s.space, cfg.grid);
    Grid grid = make_grid(s.space, cfg.grid);
    for (const Point& p : grid.points) {
      auto trace = slim.trace_at(p);
      for (std::size_t i = 1; i < trace.size(); ++i)
        c.expect(trace[i - 1] <= trace[i], s.name + ": trace not monotone");
    }
  }

  bool nonneg = s.fseq.known_lower_bound && *s.fseq.known_lower_bound >= 0.0;
  if (nonneg)
    verify_chain_steps(c, s.name + " nonneg",
                       verify_proof_chain_weak_nonneg(s.fseq, s.mu_seq, s.mu_limit, cfg));
  if (s.gseq) {
    verify_chain_steps(c, s.name + " minorant-weak",
                       verify_proof_chain_minorant(s.fseq, *s.gseq, s.mu_seq, s.mu_limit,
                                                   ChainMode::weak, cfg));
    if (s.convergence.setwise && *s.convergence.setwise == ConvergenceVerdict::consistent)
      verify_chain_steps(c, s.name + " minorant-setwise",
                         verify_proof_chain_minorant(s.fseq, *s.gseq, s.mu_seq, s.mu_limit,
                                                     ChainMode::setwise, cfg));
  }

  // Truncation ladder on a shared refinement is nondecreasing exactly.
  std::vector<Func> ladder;
  for (double lam : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) ladder.push_back(truncate(s.fseq, lam).at(4));
  std::vector<IntegralValue> vals = integrate_family_shared(ladder, s.mu_seq(4), cfg.quad);
  for (std::size_t i = 1; i < vals.size(); ++i)
    c.expect(vals[i - 1].value <= vals[i].value, s.name + ": truncation ladder not monotone");
}

void criterion_6() {
  Check c;
  for (const std::string& name : builtin_scenario_names()) {
    Scenario s = builtin_scenario(name);
    criterion_6_scenario(c, s, config_for(s), true);
  }
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Scenario r = generate_random(seed, profile_cycle(seed));
    criterion_6_scenario(c, r, config_for(r), seed <= 10);
  }
  report(6, c.ok,
         "proof-chain steps hold on builtins plus 50 random scenarios; envelope and truncation "
         "monotonicity exact",
         c.detail);
}

void criterion_7() {
  Check c;
  Scenario s = builtin_scenario("rational-support");
  VerifyConfig cfg = config_for(s);

  const TargetSpec* teor3 = find_target(s, Inequality::teor3);
  c.expect(teor3 != nullptr, "teor3 target missing");
  if (teor3) {
    InequalityReport r = run_target(s, *teor3, cfg);
    c.expect(r.verdict == Verdict::Holds, "teor3 verdict " + to_string(r.verdict));
    c.expect(r.hypothesis && r.hypothesis->ok, "hypothesis not satisfied");
    if (r.hypothesis) {
      for (const Bracket* side : {&r.hypothesis->lhs, &r.hypothesis->rhs}) {
        c.expect(side->lo.raw() >= -1e-9 && side->hi.raw() <= 0.0,
                 "hypothesis side [" + num(side->lo.raw()) + ", " + num(side->hi.raw()) + "]");
      }
    }
  }

  Grid grid = make_grid(s.space, cfg.grid);
  SeqUpperLimit upper(*s.gseq, s.space, cfg.grid);
  for (const Point& p : grid.points) {
    Bracket b = upper.at(p);
    c.expect(b.lo.raw() == 0.0 && b.hi.raw() == 0.0, "upper limit of g nonzero at a grid point");
  }

  GridSpec clipped = cfg.grid;
  clipped.m_max = 2048;
  SeqLowerLimit lower(s.fseq, s.space, clipped);
  for (const Point& p : grid.points) {
    Bracket b = lower.at(p);
    c.expect(b.hi.raw() <= -1000.0, "lower limit estimate above -1000 at a grid point");
  }

  const TargetSpec* cor = find_target(s, Inequality::cor);
  c.expect(cor != nullptr, "cor target missing");
  if (cor) {
    InequalityReport r = run_target(s, *cor, cfg);
    c.expect(r.verdict == Verdict::HypothesisFailed, "cor verdict " + to_string(r.verdict));
    c.expect(r.hypothesis && r.hypothesis->reason.find("inapplicable") != std::string::npos,
             "cor reason lacks inapplicable");
  }

  report(7, c.ok,
         "countable-support scenario: hypothesis in [-1e-9, 0], envelopes as stated, verdicts "
         "Holds and inapplicable",
         c.detail);
}

void criterion_8() {
  Check c;
  Scenario s = builtin_scenario("uniform-spike-minorant");
  VerifyConfig cfg = config_for(s);
  for (Inequality id : {Inequality::teor2, Inequality::teor3}) {
    const TargetSpec* t = find_target(s, id);
    c.expect(t != nullptr, to_string(id) + " target missing");
    if (!t) continue;
    InequalityReport r = run_target(s, *t, cfg);
    c.expect(r.verdict == Verdict::Holds, to_string(id) + " verdict " + to_string(r.verdict));
    c.expect(r.hypothesis && r.hypothesis->ok, to_string(id) + " hypothesis not satisfied");
    c.expect(std::fabs(r.lhs.lo.raw() + 1.0) <= 1e-8 && std::fabs(r.lhs.hi.raw() + 1.0) <= 1e-8,
             to_string(id) + " lhs [" + num(r.lhs.lo.raw()) + ", " + num(r.lhs.hi.raw()) + "]");
    c.expect(std::fabs(r.rhs.lo.raw()) <= 1e-8 && std::fabs(r.rhs.hi.raw()) <= 1e-8,
             to_string(id) + " rhs [" + num(r.rhs.lo.raw()) + ", " + num(r.rhs.hi.raw()) + "]");
  }
  report(8, c.ok, "uniform-spike minorant instance: hypothesis true, lhs -1, rhs 0, Holds",
         c.detail);
}

void criterion_9() {
  Check c;

  Scenario rational = builtin_scenario("rational-support");
  EquivalenceReport a = run_equivalence(rational, config_for(rational));
  c.expect(a.agree && a.condition.ok && a.equality.ok, "countable scenario forms disagree");
  c.expect(std::fabs(a.common_value.lo.raw()) <= 1e-6 && std::fabs(a.common_value.hi.raw()) <= 1e-6,
           "countable common value [" + num(a.common_value.lo.raw()) + ", " +
               num(a.common_value.hi.raw()) + "]");

  Scenario spike = builtin_scenario("escaping-spike-positive");
  EquivalenceReport b = run_equivalence(spike, config_for(spike));
  c.expect(b.agree && b.condition.ok && b.equality.ok, "continuous-minorant forms disagree");
  c.expect(std::fabs(b.common_value.lo.raw() - 0.75) <= 1e-6 &&
               std::fabs(b.common_value.hi.raw() - 0.75) <= 1e-6,
           "spike common value [" + num(b.common_value.lo.raw()) + ", " +
               num(b.common_value.hi.raw()) + "]");

  report(9, c.ok, "minorant condition forms agree, common values within 1e-6 of closed forms",
         c.detail);
}

void criterion_10() {
  Check c;
  Space sp = Space::interval(0, 1);
  GridSpec spec = GridSpec::light();
  Grid grid = make_grid(sp, spec);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Func u = random_hinge(seed);
    Func neg = u.negated();
    for (const Point& p : grid.points) {
      Bracket upper = usc_envelope_at(u, sp, p, spec, &grid);
      Bracket lower = lsc_envelope_at(neg, sp, p, spec, &grid);
      c.expect(upper.lo.raw() == -lower.hi.raw() && upper.hi.raw() == -lower.lo.raw(),
               "duality gap at seed " + std::to_string(seed));
    }
  }

  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Func u = random_hinge(seed);
    Func once;
    once.eval = [u, sp, spec](const Point& p) { return lsc_envelope_at(u, sp, p, spec).hi; };
    once.lower_bound = u.lower_bound;
    for (double s : {0.2, 0.5, 0.8}) {
      double a = lsc_envelope_at(u, sp, Point(s), spec).hi.raw();
      double b = lsc_envelope_at(once, sp, Point(s), spec).hi.raw();
      c.expect(b <= a + 1e-12 && a - b <= 8.0 * spec.eps_schedule.front(),
               "idempotence drift " + num(a - b) + " at seed " + std::to_string(seed));
    }
  }

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Func u = random_hinge(seed);
    for (double s : {0.1, 0.5, 0.9}) {
      auto trace = lsc_envelope_trace(u, sp, Point(s), GridSpec::defaults());
      for (std::size_t i = 1; i < trace.size(); ++i)
        c.expect(trace[i - 1] <= trace[i], "refinement not monotone at seed " +
                                               std::to_string(seed));
    }
  }

  report(10, c.ok,
         "envelope invariants: exact upper/lower duality, idempotence within resolution, "
         "monotone refinement",
         c.detail);
}

void criterion_11() {
  Check c;
  for (const std::string& name : builtin_scenario_names()) {
    std::string base = "run --scenario " + name + " --format json --deterministic";
    int e1 = 0, e2 = 0, e3 = 0;
    std::string one = run_cli_capture(base + " --threads 1", e1);
    std::string eight = run_cli_capture(base + " --threads 8", e2);
    std::string again = run_cli_capture(base + " --threads 8", e3);
    c.expect(e1 >= 0 && e1 == e2 && e2 == e3, name + ": exit codes differ");
    c.expect(!one.empty() && one == eight && eight == again, name + ": bytes differ");
  }
  report(11, c.ok, "deterministic JSON byte-identical across runs and --threads {1, 8}",
         c.detail);
}

}  // namespace

int main() {
  using CriterionFn = void (*)();
  CriterionFn criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                            criterion_5, criterion_6, criterion_7, criterion_8,
                            criterion_9, criterion_10, criterion_11};
  int idx = 0;
  for (CriterionFn fn : criteria) {
    ++idx;
    try {
      fn();
    } catch (const std::exception& e) {
      report(idx, false, "threw", e.what());
    }
  }
  if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures ? 1 : 0;
}
