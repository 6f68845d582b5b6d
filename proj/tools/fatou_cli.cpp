#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fatou/parallel.hpp"
#include "fatou/report_json.hpp"
#include "fatou/scenarios.hpp"

namespace {

using fatou::json;

struct Options {
  std::string scenario;
  std::string profile;
  std::uint64_t seed = 1;
  std::string target;
  std::string expect;
  std::string mode;
  std::string family;
  int family_size = 64;
  std::vector<int> n_list;
  int n_max = 1024;
  std::string format;
  std::string out;
  bool deterministic = false;
  int threads = 0;
  double tol = -1;
  double abs_tol = -1;
  int max_depth = -1;
  double divergence_cutoff = -1;
  std::vector<double> eps_schedule;
  std::vector<int> n_schedule;
  int m_max = -1;
  int probes_per_ball = -1;
  std::vector<std::string> paths;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(const fatou::ExtendedReal& v) { return fmt(v.raw()); }

void add_source_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--scenario", o.scenario, "Built-in scenario name or scenario file path");
  cmd->add_option("--profile", o.profile,
                  "Random scenario profile (nonneg_weak, setwise_minorant, weak_minorant)");
  cmd->add_option("--seed", o.seed, "Seed for random scenarios and test families");
}

void add_common_options(CLI::App* cmd, Options& o, const std::string& default_format) {
  o.format = default_format;
  cmd->add_option("--format", o.format, "Output format (json, csv, table)");
  cmd->add_option("--out", o.out, "Write output to this path instead of stdout");
  cmd->add_flag("--deterministic", o.deterministic, "Omit timestamps from output");
  cmd->add_option("--threads", o.threads, "Worker thread cap, 0 means hardware concurrency");
  cmd->add_option("--tol", o.tol, "Verdict tolerance (run) or gap tolerance (converge)");
  cmd->add_option("--abs-tol", o.abs_tol, "Quadrature absolute tolerance");
  cmd->add_option("--max-depth", o.max_depth, "Quadrature bisection depth limit");
  cmd->add_option("--divergence-cutoff", o.divergence_cutoff,
                  "Magnitude treated as numerically divergent");
  cmd->add_option("--eps-schedule", o.eps_schedule, "Envelope radii, decreasing")
      ->delimiter(',');
  cmd->add_option("--n-schedule", o.n_schedule, "Sequence indices probed, increasing")
      ->delimiter(',');
  cmd->add_option("--m-max", o.m_max, "Tail depth for envelope infima");
  cmd->add_option("--probes-per-ball", o.probes_per_ball, "Sample points per envelope ball");
}

fatou::Scenario resolve_scenario(const Options& o) {
  bool has_name = !o.scenario.empty();
  bool has_profile = !o.profile.empty();
  if (has_name == has_profile)
    throw std::runtime_error("need exactly one scenario source: --scenario or --profile");
  if (has_name) {
    if (fatou::is_builtin_scenario(o.scenario)) return fatou::builtin_scenario(o.scenario);
    return fatou::load_scenario(o.scenario);
  }
  auto p = fatou::profile_from_string(o.profile);
  if (!p) throw std::runtime_error("unknown profile '" + o.profile + "'");
  return fatou::generate_random(o.seed, *p);
}

fatou::VerifyConfig make_config(const fatou::Scenario& s, const Options& o) {
  fatou::VerifyConfig cfg = fatou::config_for(s);
  if (o.abs_tol >= 0) cfg.quad.abs_tol = o.abs_tol;
  if (o.max_depth >= 0) cfg.quad.max_depth = o.max_depth;
  if (o.divergence_cutoff >= 0) cfg.quad.divergence_cutoff = o.divergence_cutoff;
  if (!o.eps_schedule.empty()) cfg.grid.eps_schedule = o.eps_schedule;
  if (!o.n_schedule.empty()) cfg.grid.n_schedule = o.n_schedule;
  if (o.m_max >= 0) cfg.grid.m_max = o.m_max;
  if (o.probes_per_ball >= 0) cfg.grid.probes_per_ball = o.probes_per_ball;
  if (o.tol >= 0) cfg.tol = o.tol;
  return cfg;
}

void check_format(const Options& o) {
  if (o.format != "json" && o.format != "csv" && o.format != "table")
    throw std::runtime_error("unknown format '" + o.format + "'");
}

void write_output(const std::string& text, const Options& o) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + o.out);
  f << text;
}

json document_head(const char* command, const Options& o) {
  json j;
  j["tool"] = "fatou";
  j["command"] = command;
  if (!o.deterministic) {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    j["generated_at"] = buf;
  }
  return j;
}

std::string target_name(const fatou::TargetSpec& t) {
  if (t.waive_nonneg && t.inequality == fatou::Inequality::eq3) return "eq1-as-eq3";
  return fatou::to_string(t.inequality);
}

int cmd_run(const Options& o) {
  check_format(o);
  fatou::Scenario s = resolve_scenario(o);
  fatou::VerifyConfig cfg = make_config(s, o);

  std::vector<fatou::TargetSpec> targets;
  if (!o.target.empty()) {
    std::optional<fatou::Inequality> ineq;
    bool waive = false;
    if (o.target == "eq1-as-eq3") {
      ineq = fatou::Inequality::eq3;
      waive = true;
    } else {
      ineq = fatou::inequality_from_string(o.target);
    }
    if (!ineq) throw std::runtime_error("unknown target '" + o.target + "'");
    fatou::TargetSpec chosen;
    chosen.inequality = *ineq;
    chosen.waive_nonneg = waive;
    for (const fatou::TargetSpec& t : s.targets) {
      if (t.inequality == *ineq && (!waive || t.waive_nonneg)) {
        chosen = t;
        break;
      }
    }
    targets.push_back(chosen);
  } else {
    targets = s.targets;
  }
  if (targets.empty()) throw std::runtime_error("scenario records no targets; pass --target");
  if (!o.expect.empty()) {
    auto v = fatou::verdict_from_string(o.expect);
    if (!v) throw std::runtime_error("unknown verdict '" + o.expect + "'");
    for (fatou::TargetSpec& t : targets) t.expected = v;
  }

  int worst = 0;
  json jtargets = json::array();
  std::ostringstream text;
  if (o.format == "csv")
    text << "target,verdict,lhs_lo,lhs_hi,rhs_lo,rhs_hi,margin,exit_code\n";
  for (const fatou::TargetSpec& t : targets) {
    fatou::InequalityReport rep = fatou::run_target(s, t, cfg);
    int code = fatou::exit_code_for(rep.verdict, t.expected);
    worst = std::max(worst, code);
    json jt;
    jt["target"] = target_name(t);
    jt["expected"] = t.expected ? json(fatou::to_string(*t.expected)) : json(nullptr);
    jt["exit_code"] = code;
    jt["report"] = fatou::to_json(rep);
    jtargets.push_back(jt);
    if (o.format == "csv") {
      text << target_name(t) << ',' << fatou::to_string(rep.verdict) << ',' << fmt(rep.lhs.lo)
           << ',' << fmt(rep.lhs.hi) << ',' << fmt(rep.rhs.lo) << ',' << fmt(rep.rhs.hi) << ','
           << fmt(rep.margin) << ',' << code << '\n';
    } else if (o.format == "table") {
      text << target_name(t) << ": " << fatou::to_string(rep.verdict) << "  lhs "
           << rep.lhs.to_string() << "  rhs " << rep.rhs.to_string() << "  margin "
           << rep.margin.to_string() << "  exit " << code << "\n";
      if (!rep.reason.empty()) text << "  " << rep.reason << "\n";
    }
  }
  if (o.format == "json") {
    json j = document_head("run", o);
    j["scenario"] = s.name;
    j["description"] = s.description;
    j["space"] = s.space.to_string();
    j["targets"] = jtargets;
    text << j.dump(2) << "\n";
  }
  write_output(text.str(), o);
  return worst;
}

int cmd_sweep(const Options& o) {
  check_format(o);
  fatou::Scenario s = resolve_scenario(o);
  fatou::VerifyConfig cfg = make_config(s, o);
  std::vector<int> ns = o.n_list.empty() ? fatou::dyadic_schedule(o.n_max) : o.n_list;

  json rows = json::array();
  std::ostringstream text;
  if (o.format == "csv") text << "n,value,bracket_lo,bracket_hi,closed_form\n";
  for (int n : ns) {
    if (n < 1) throw std::runtime_error("sweep indices must be positive");
    fatou::Measure mun = s.mu_seq(n);
    fatou::IntegralValue v = fatou::integrate(s.fseq.at(n), mun, cfg.quad);
    std::optional<double> closed;
    if (s.sweep_closed_form) {
      fatou::expr::Env env;
      env.n = n;
      closed = fatou::expr::eval(*s.sweep_closed_form, env).v.raw();
    }
    if (o.format == "csv") {
      text << n << ',' << fmt(v.value) << ',' << fmt(v.bracket.lo) << ',' << fmt(v.bracket.hi)
           << ',' << (closed ? fmt(*closed) : "") << '\n';
    } else if (o.format == "table") {
      text << "n=" << n << "  value " << v.value.to_string() << "  bracket "
           << v.bracket.to_string();
      if (closed) text << "  closed_form " << fmt(*closed);
      text << "\n";
    } else {
      json row;
      row["n"] = n;
      row["value"] = fatou::to_json(v.value);
      row["bracket"] = fatou::to_json(v.bracket);
      row["closed_form"] = closed ? json(*closed) : json(nullptr);
      rows.push_back(row);
    }
  }
  if (o.format == "json") {
    json j = document_head("sweep", o);
    j["scenario"] = s.name;
    j["integrand"] = s.fseq.label;
    j["rows"] = rows;
    text << j.dump(2) << "\n";
  }
  write_output(text.str(), o);
  return 0;
}

int convergence_exit(fatou::ConvergenceVerdict actual,
                     const std::optional<fatou::ConvergenceVerdict>& expected) {
  if (expected && actual == *expected) return 0;
  switch (actual) {
    case fatou::ConvergenceVerdict::consistent: return expected ? 2 : 0;
    case fatou::ConvergenceVerdict::falsified: return 1;
    case fatou::ConvergenceVerdict::inconclusive: return 2;
  }
  return 2;
}

const char* convergence_name(fatou::ConvergenceVerdict v) {
  switch (v) {
    case fatou::ConvergenceVerdict::consistent: return "consistent";
    case fatou::ConvergenceVerdict::falsified: return "falsified";
    case fatou::ConvergenceVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

int cmd_converge(const Options& o) {
  check_format(o);
  fatou::Scenario s = resolve_scenario(o);
  fatou::VerifyConfig cfg = make_config(s, o);
  if (o.mode != "weak" && o.mode != "setwise")
    throw std::runtime_error("--mode must be weak or setwise");
  bool weak = o.mode == "weak";

  std::string family = o.family.empty() ? (weak ? "lipschitz" : "indicators") : o.family;
  fatou::TestFamily fam = [&] {
    if (family == "lipschitz")
      return fatou::TestFamily::bounded_lipschitz(s.space, o.family_size, o.seed);
    if (family == "indicators") return fatou::TestFamily::indicators(s.space, o.family_size, o.seed);
    throw std::runtime_error("unknown family '" + family + "'");
  }();

  std::vector<int> schedule = fatou::dyadic_schedule(o.n_max);
  double tol = o.tol >= 0 ? o.tol : 1e-2;
  fatou::ConvergenceReport rep =
      weak ? fatou::check_weak(s.mu_seq, s.mu_limit, fam, schedule, tol, cfg.quad)
           : fatou::check_setwise(s.mu_seq, s.mu_limit, fam, schedule, tol, cfg.quad);
  auto expected = weak ? s.convergence.weak : s.convergence.setwise;
  int code = convergence_exit(rep.verdict, expected);

  std::ostringstream text;
  if (o.format == "json") {
    json j = document_head("converge", o);
    j["scenario"] = s.name;
    j["family"] = family;
    j["expected"] = expected ? json(convergence_name(*expected)) : json(nullptr);
    j["exit_code"] = code;
    j["report"] = fatou::to_json(rep);
    text << j.dump(2) << "\n";
  } else if (o.format == "csv") {
    text << "label,final_gap,slope,verdict\n";
    for (const fatou::FunctionDiag& d : rep.per_function) {
      text << d.label << ',' << fmt(d.final_gap) << ',' << fmt(d.slope) << ','
           << convergence_name(d.verdict) << '\n';
    }
  } else {
    text << o.mode << " convergence: " << convergence_name(rep.verdict);
    if (rep.witness) text << "  witness " << *rep.witness;
    text << "  exit " << code << "\n";
    for (const fatou::FunctionDiag& d : rep.per_function) {
      text << "  " << d.label << "  final_gap " << fmt(d.final_gap) << "  slope " << fmt(d.slope)
           << "  " << convergence_name(d.verdict) << "\n";
    }
  }
  write_output(text.str(), o);
  return code;
}

int cmd_list(const Options& o) {
  check_format(o);
  std::ostringstream text;
  if (o.format == "json") {
    json j = document_head("list-scenarios", o);
    json arr = json::array();
    for (const std::string& name : fatou::builtin_scenario_names()) {
      fatou::Scenario s = fatou::builtin_scenario(name);
      json row;
      row["name"] = name;
      row["description"] = s.description;
      arr.push_back(row);
    }
    j["scenarios"] = arr;
    text << j.dump(2) << "\n";
  } else {
    for (const std::string& name : fatou::builtin_scenario_names()) {
      fatou::Scenario s = fatou::builtin_scenario(name);
      text << name << "  " << s.description << "\n";
    }
  }
  write_output(text.str(), o);
  return 0;
}

int cmd_validate(const Options& o) {
  std::ostringstream text;
  for (const std::string& path : o.paths) {
    fatou::Scenario s = fatou::load_scenario(path);
    text << "ok " << s.name << " (" << path << ")\n";
  }
  write_output(text.str(), o);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measure-convergence and Fatou-type inequality checker"};
  app.require_subcommand(1);
  Options o;

  CLI::App* run = app.add_subcommand("run", "Verify inequality targets of a scenario");
  add_source_options(run, o);
  add_common_options(run, o, "json");
  run->add_option("--target", o.target,
                  "Single inequality to check (default: all recorded targets)");
  run->add_option("--expect", o.expect, "Override the expected verdict");

  CLI::App* sweep = app.add_subcommand("sweep", "Integrals of f_n against mu_n over a range of n");
  add_source_options(sweep, o);
  add_common_options(sweep, o, "csv");
  sweep->add_option("--n-list", o.n_list, "Explicit indices to sweep")->delimiter(',');
  sweep->add_option("--n-max", o.n_max, "Dyadic sweep up to this index");

  CLI::App* converge = app.add_subcommand("converge", "Convergence diagnostics for mu_n -> mu");
  add_source_options(converge, o);
  add_common_options(converge, o, "json");
  converge->add_option("--mode", o.mode, "weak or setwise")->required();
  converge->add_option("--family", o.family, "Test family (lipschitz, indicators)");
  converge->add_option("--family-size", o.family_size, "Number of family members");
  converge->add_option("--n-max", o.n_max, "Dyadic probe schedule up to this index");

  CLI::App* list = app.add_subcommand("list-scenarios", "List built-in scenarios");
  add_common_options(list, o, "table");

  CLI::App* validate = app.add_subcommand("validate", "Parse and validate scenario files");
  validate->add_option("paths", o.paths, "Scenario files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    fatou::set_worker_cap(o.threads);
    if (app.got_subcommand(run)) return cmd_run(o);
    if (app.got_subcommand(sweep)) return cmd_sweep(o);
    if (app.got_subcommand(converge)) return cmd_converge(o);
    if (app.got_subcommand(list)) return cmd_list(o);
    if (app.got_subcommand(validate)) return cmd_validate(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
