#include "fatou/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "fatou/converge.hpp"

namespace fatou {

namespace {

struct AtomTemplate {
  expr::NodePtr location;
  expr::NodePtr weight;
};

struct PieceTemplate {
  expr::NodePtr lo, hi;
  expr::NodePtr density;
  std::optional<expr::NodePtr> anti;
};

struct MeasureTemplate {
  std::vector<AtomTemplate> atoms;
  std::vector<PieceTemplate> pieces;

  bool mentions_n() const {
    for (const auto& a : atoms) {
      if (expr::mentions_var_n(a.location) || expr::mentions_var_n(a.weight)) return true;
    }
    for (const auto& p : pieces) {
      if (expr::mentions_var_n(p.lo) || expr::mentions_var_n(p.hi) ||
          expr::mentions_var_n(p.density) || (p.anti && expr::mentions_var_n(*p.anti)))
        return true;
    }
    return false;
  }
};

struct FunctionTemplate {
  expr::NodePtr body;
  std::optional<expr::NodePtr> anti;
  std::optional<double> lower, upper;
  bool continuous = false;
  std::optional<int> stable;
};

Point point_from_value(const expr::Value& v) {
  if (v.exact) return Point(*v.exact);
  return Point(v.v.raw());
}

double eval_number(const expr::NodePtr& node, const expr::Env& env, const std::string& what) {
  expr::Value v = expr::eval(node, env);
  if (!v.v.is_finite()) throw ScenarioError(what + " is not finite");
  return v.v.raw();
}

Func build_density(const PieceTemplate& t, const std::shared_ptr<const Space>& sp,
                   std::optional<int> n) {
  Func d;
  expr::NodePtr body = t.density;
  d.eval = [body, sp, n](const Point& p) {
    expr::Env env;
    env.n = n;
    env.s = p;
    env.space = sp.get();
    return expr::eval(body, env).v;
  };
  if (t.anti) {
    expr::NodePtr anti = *t.anti;
    d.antiderivative = [anti, sp, n](double x) {
      expr::Env env;
      env.n = n;
      env.s = Point(x);
      env.space = sp.get();
      return expr::eval(anti, env).v.raw();
    };
  }
  d.label = expr::print(body);
  return d;
}

Measure build_measure(const MeasureTemplate& t, const std::shared_ptr<const Space>& sp,
                      std::optional<int> n) {
  expr::Env env;
  env.n = n;
  env.space = sp.get();
  std::vector<Atom> atoms;
  for (const AtomTemplate& a : t.atoms) {
    Atom atom;
    atom.location = point_from_value(expr::eval(a.location, env));
    atom.weight = eval_number(a.weight, env, "atom weight");
    atoms.push_back(atom);
  }
  std::vector<Piece> pieces;
  for (const PieceTemplate& p : t.pieces) {
    Piece piece;
    piece.lo = eval_number(p.lo, env, "piece bound");
    piece.hi = eval_number(p.hi, env, "piece bound");
    piece.density = build_density(p, sp, n);
    if (!expr::mentions_var_s(p.density)) {
      expr::Env denv;
      denv.n = n;
      denv.space = sp.get();
      piece.const_density = expr::eval(p.density, denv).v.raw();
    }
    pieces.push_back(piece);
  }
  return Measure(*sp, std::move(atoms), std::move(pieces));
}

FunctionSeq build_seq(const FunctionTemplate& t, const std::shared_ptr<const Space>& sp) {
  FunctionSeq f;
  expr::NodePtr body = t.body;
  f.eval = [body, sp](int n, const Point& p) {
    expr::Env env;
    env.n = n;
    env.s = p;
    env.space = sp.get();
    return expr::eval(body, env).v;
  };
  if (t.anti) {
    expr::NodePtr anti = *t.anti;
    f.antiderivative = [anti, sp](int n, double x) {
      expr::Env env;
      env.n = n;
      env.s = Point(x);
      env.space = sp.get();
      return expr::eval(anti, env).v.raw();
    };
  }
  f.known_lower_bound = t.lower;
  f.known_upper_bound = t.upper;
  f.continuous = t.continuous;
  if (t.stable) {
    f.stable_after = t.stable;
  } else if (!expr::mentions_var_n(t.body)) {
    f.stable_after = 1;
  }
  f.label = expr::print(t.body);
  return f;
}

Func build_func(const FunctionTemplate& t, const std::shared_ptr<const Space>& sp) {
  FunctionSeq seq = build_seq(t, sp);
  return seq.at(1);
}

// Central-difference spot check of a declared antiderivative; points where
// the function is not finite or sits on a kink are tolerated via the failure
// allowance.
void validate_antiderivative(const FunctionSeq& f, const Space& space, const std::string& name) {
  if (!f.antiderivative || !space.is_interval()) return;
  std::vector<int> ns = f.stable_after && *f.stable_after <= 1 ? std::vector<int>{1}
                                                               : std::vector<int>{1, 3};
  for (int n : ns) {
    Func fn = f.at(n);
    const auto& F = *fn.antiderivative;
    double lo = space.lo(), hi = space.hi();
    double h = (hi - lo) / 8192;
    int failures = 0, checked = 0;
    for (int i = 0; i < 33; ++i) {
      double x = lo + (hi - lo) * (i + 0.5) / 33;
      ExtendedReal v = fn(Point(x));
      if (!v.is_finite()) continue;
      double diff = (F(x + h) - F(x - h)) / (2 * h);
      if (!std::isfinite(diff)) continue;
      ++checked;
      if (std::fabs(diff - v.raw()) > 1e-4 * std::max(1.0, std::fabs(v.raw()))) ++failures;
    }
    if (checked >= 8 && failures > 6) {
      throw ScenarioError("antiderivative of " + name + " disagrees with central differences");
    }
  }
}

struct Line {
  int number = 0;
  std::string head;
  std::string rest;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

// "[a, b]" or "(a, b]" with one top-level comma; expressions may nest
// brackets and parentheses.
struct IntervalText {
  std::string lo, hi;
  bool lo_closed = true, hi_closed = true;
  std::size_t end = 0;  // index just past the closing bracket
};

IntervalText parse_interval_text(const std::string& text, std::size_t start,
                                 const std::string& origin, int line_no) {
  IntervalText out;
  std::size_t i = start;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i >= text.size() || (text[i] != '[' && text[i] != '(')) {
    throw ScenarioError(origin + ":" + std::to_string(line_no) + ": expected an interval");
  }
  out.lo_closed = text[i] == '[';
  ++i;
  int depth = 0;
  std::size_t comma = std::string::npos;
  std::size_t close = std::string::npos;
  for (std::size_t j = i; j < text.size(); ++j) {
    char c = text[j];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') {
      if (depth == 0) {
        close = j;
        out.hi_closed = c == ']';
        break;
      }
      --depth;
    }
    if (c == ',' && depth == 0 && comma == std::string::npos) comma = j;
  }
  if (comma == std::string::npos || close == std::string::npos) {
    throw ScenarioError(origin + ":" + std::to_string(line_no) + ": malformed interval");
  }
  out.lo = trim(text.substr(i, comma - i));
  out.hi = trim(text.substr(comma + 1, close - comma - 1));
  out.end = close + 1;
  return out;
}

expr::NodePtr parse_expr_or_throw(const std::string& text, const std::string& origin,
                                  int line_no) {
  try {
    return expr::parse(text);
  } catch (const expr::ParseError& e) {
    throw ScenarioError(origin + ":" + std::to_string(line_no) + ": " + e.what());
  }
}

double parse_number(const std::string& text, const std::string& origin, int line_no,
                    const std::string& what) {
  expr::NodePtr node = parse_expr_or_throw(text, origin, line_no);
  expr::Env env;
  try {
    expr::Value v = expr::eval(node, env);
    if (!v.v.is_finite()) throw ScenarioError(origin + ":" + std::to_string(line_no) + ": " + what +
                                              " must be finite");
    return v.v.raw();
  } catch (const expr::EvalError& e) {
    throw ScenarioError(origin + ":" + std::to_string(line_no) + ": " + what + ": " + e.what());
  }
}

std::optional<Inequality> target_inequality(const std::string& name, bool& waive) {
  if (name == "eq1-as-eq3") {
    waive = true;
    return Inequality::eq3;
  }
  return inequality_from_string(name);
}

}  // namespace

std::string to_string(RandomProfile p) {
  switch (p) {
    case RandomProfile::nonneg_weak: return "nonneg_weak";
    case RandomProfile::setwise_minorant: return "setwise_minorant";
    case RandomProfile::weak_minorant: return "weak_minorant";
  }
  return "nonneg_weak";
}

std::optional<RandomProfile> profile_from_string(const std::string& s) {
  if (s == "nonneg_weak") return RandomProfile::nonneg_weak;
  if (s == "setwise_minorant") return RandomProfile::setwise_minorant;
  if (s == "weak_minorant") return RandomProfile::weak_minorant;
  return std::nullopt;
}

Scenario load_scenario_text(const std::string& text, const std::string& origin) {
  Scenario s;
  s.source_text = text;

  std::optional<Space> space;
  MeasureTemplate mu_t, mun_t;
  bool have_mu = false, have_mun = false;
  std::map<std::string, FunctionTemplate> funcs;
  std::string current_measure;   // "mu" or "mun"
  std::string current_function;  // "f", "g" or "minorant"
  PieceTemplate* last_piece = nullptr;

  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> ScenarioError {
    return ScenarioError(origin + ":" + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    std::string rest = trim(line.substr(head.size()));

    if (head == "scenario") {
      s.name = rest;
    } else if (head == "description") {
      s.description = rest;
    } else if (head == "space") {
      std::istringstream rs(rest);
      std::string kind;
      rs >> kind;
      if (kind == "interval") {
        std::string spec = trim(rest.substr(kind.size()));
        IntervalText iv = parse_interval_text(spec, 0, origin, line_no);
        double lo = parse_number(iv.lo, origin, line_no, "space bound");
        double hi = parse_number(iv.hi, origin, line_no, "space bound");
        space = Space::interval(lo, hi, iv.lo_closed, iv.hi_closed);
      } else if (kind == "rationals01") {
        space = Space::rationals01();
      } else {
        throw fail("unknown space '" + kind + "'");
      }
    } else if (head == "grid") {
      std::istringstream rs(rest);
      std::string key;
      rs >> key;
      std::string tail = trim(rest.substr(key.size()));
      if (key == "preset") {
        if (tail == "light") {
          s.grid = GridSpec::light();
        } else if (tail == "default") {
          s.grid = GridSpec::defaults();
        } else {
          throw fail("unknown grid preset '" + tail + "'");
        }
      } else if (key == "eps") {
        s.grid.eps_schedule.clear();
        for (const std::string& w : split_words(tail)) {
          s.grid.eps_schedule.push_back(parse_number(w, origin, line_no, "eps"));
        }
      } else if (key == "nschedule") {
        s.grid.n_schedule.clear();
        for (const std::string& w : split_words(tail)) {
          s.grid.n_schedule.push_back(static_cast<int>(parse_number(w, origin, line_no, "nschedule")));
        }
      } else if (key == "mmax") {
        s.grid.m_max = static_cast<int>(parse_number(tail, origin, line_no, "mmax"));
      } else if (key == "probes") {
        s.grid.probes_per_ball = static_cast<int>(parse_number(tail, origin, line_no, "probes"));
      } else if (key == "points") {
        s.grid.grid_points = static_cast<int>(parse_number(tail, origin, line_no, "points"));
      } else {
        throw fail("unknown grid key '" + key + "'");
      }
    } else if (head == "measure") {
      if (rest == "mu") {
        current_measure = "mu";
        have_mu = true;
      } else if (rest == "mun") {
        current_measure = "mun";
        have_mun = true;
      } else {
        throw fail("measure must be 'mu' or 'mun'");
      }
      current_function.clear();
      last_piece = nullptr;
    } else if (head == "atom") {
      if (current_measure.empty()) throw fail("atom outside a measure block");
      std::size_t at_pos = rest.rfind("at ", 0);
      if (at_pos != 0) throw fail("expected 'atom at <expr> weight <expr>'");
      std::size_t w_pos = rest.find(" weight ");
      if (w_pos == std::string::npos) throw fail("atom without a weight");
      AtomTemplate a;
      a.location = parse_expr_or_throw(trim(rest.substr(3, w_pos - 3)), origin, line_no);
      a.weight = parse_expr_or_throw(trim(rest.substr(w_pos + 8)), origin, line_no);
      (current_measure == "mu" ? mu_t : mun_t).atoms.push_back(a);
      last_piece = nullptr;
    } else if (head == "piece") {
      if (current_measure.empty()) throw fail("piece outside a measure block");
      if (rest.rfind("on ", 0) != 0) throw fail("expected 'piece on [a, b] density <expr>'");
      IntervalText iv = parse_interval_text(rest, 3, origin, line_no);
      std::string after = trim(rest.substr(iv.end));
      if (after.rfind("density ", 0) != 0) throw fail("piece without a density");
      PieceTemplate p;
      p.lo = parse_expr_or_throw(iv.lo, origin, line_no);
      p.hi = parse_expr_or_throw(iv.hi, origin, line_no);
      p.density = parse_expr_or_throw(trim(after.substr(8)), origin, line_no);
      auto& tmpl = current_measure == "mu" ? mu_t : mun_t;
      tmpl.pieces.push_back(p);
      last_piece = &tmpl.pieces.back();
    } else if (head == "function") {
      if (rest != "f" && rest != "g") throw fail("function must be 'f' or 'g'");
      current_function = rest;
      funcs[current_function];
      current_measure.clear();
      last_piece = nullptr;
    } else if (head == "minorant") {
      current_function = "minorant";
      funcs[current_function];
      current_measure.clear();
      last_piece = nullptr;
    } else if (head == "expr") {
      if (current_function.empty()) throw fail("expr outside a function block");
      funcs[current_function].body = parse_expr_or_throw(rest, origin, line_no);
    } else if (head == "anti") {
      if (last_piece) {
        last_piece->anti = parse_expr_or_throw(rest, origin, line_no);
      } else if (!current_function.empty()) {
        funcs[current_function].anti = parse_expr_or_throw(rest, origin, line_no);
      } else {
        throw fail("anti outside a piece or function block");
      }
    } else if (head == "lower") {
      if (current_function.empty()) throw fail("lower outside a function block");
      funcs[current_function].lower = parse_number(rest, origin, line_no, "lower bound");
    } else if (head == "upper") {
      if (current_function.empty()) throw fail("upper outside a function block");
      funcs[current_function].upper = parse_number(rest, origin, line_no, "upper bound");
    } else if (head == "continuous") {
      if (current_function.empty()) throw fail("continuous outside a function block");
      funcs[current_function].continuous = rest == "true";
    } else if (head == "stable") {
      if (current_function.empty()) throw fail("stable outside a function block");
      funcs[current_function].stable = static_cast<int>(parse_number(rest, origin, line_no, "stable"));
    } else if (head == "target") {
      std::vector<std::string> words = split_words(rest);
      if (words.empty()) throw fail("target without a name");
      TargetSpec t;
      bool waive = false;
      auto ineq = target_inequality(words[0], waive);
      if (!ineq) throw fail("unknown target '" + words[0] + "'");
      t.inequality = *ineq;
      t.waive_nonneg = waive;
      for (std::size_t i = 1; i < words.size(); ++i) {
        if (words[i] == "waive") {
          t.waive_nonneg = true;
        } else if (words[i] == "expect" && i + 1 < words.size()) {
          auto v = verdict_from_string(words[++i]);
          if (!v) throw fail("unknown verdict '" + words[i] + "'");
          t.expected = v;
        } else if (words[i] == "lhs" && i + 1 < words.size()) {
          t.expected_lhs = parse_number(words[++i], origin, line_no, "lhs");
        } else if (words[i] == "rhs" && i + 1 < words.size()) {
          t.expected_rhs = parse_number(words[++i], origin, line_no, "rhs");
        } else if (words[i] == "note") {
          std::size_t pos = rest.find("note ");
          t.note = trim(rest.substr(pos + 5));
          break;
        } else {
          throw fail("unknown target key '" + words[i] + "'");
        }
      }
      s.targets.push_back(t);
    } else if (head == "convergence") {
      std::vector<std::string> words = split_words(rest);
      if (words.size() != 2) throw fail("expected 'convergence <mode> <verdict>'");
      std::optional<ConvergenceVerdict> v;
      if (words[1] == "consistent") v = ConvergenceVerdict::consistent;
      if (words[1] == "falsified") v = ConvergenceVerdict::falsified;
      if (words[1] == "inconclusive") v = ConvergenceVerdict::inconclusive;
      if (!v) throw fail("unknown convergence verdict '" + words[1] + "'");
      if (words[0] == "weak") {
        s.convergence.weak = v;
      } else if (words[0] == "setwise") {
        s.convergence.setwise = v;
      } else {
        throw fail("convergence mode must be weak or setwise");
      }
    } else if (head == "sweep") {
      if (rest.rfind("closed_form ", 0) != 0) throw fail("expected 'sweep closed_form <expr>'");
      s.sweep_closed_form = parse_expr_or_throw(trim(rest.substr(12)), origin, line_no);
    } else {
      throw fail("unknown directive '" + head + "'");
    }
  }

  line_no = 0;
  if (!space) throw ScenarioError(origin + ": no space declared");
  if (!have_mu) throw ScenarioError(origin + ": no limit measure declared");
  if (!have_mun) throw ScenarioError(origin + ": no measure sequence declared");
  if (!funcs.count("f") || !funcs["f"].body) throw ScenarioError(origin + ": no function f");
  if (mu_t.mentions_n()) throw ScenarioError(origin + ": the limit measure may not depend on n");

  auto sp = std::make_shared<const Space>(*space);
  s.space = *space;

  try {
    s.mu_limit = build_measure(mu_t, sp, std::nullopt);
  } catch (const std::exception& e) {
    throw ScenarioError(origin + ": limit measure: " + e.what());
  }
  auto mun_shared = std::make_shared<const MeasureTemplate>(mun_t);
  s.mu_seq = [mun_shared, sp](int n) { return build_measure(*mun_shared, sp, n); };
  try {
    s.mu_seq(1);
    s.mu_seq(7);
  } catch (const std::exception& e) {
    throw ScenarioError(origin + ": measure sequence: " + e.what());
  }

  s.fseq = build_seq(funcs["f"], sp);
  validate_antiderivative(s.fseq, *space, "f");
  if (funcs.count("g") && funcs["g"].body) {
    s.gseq = build_seq(funcs["g"], sp);
    validate_antiderivative(*s.gseq, *space, "g");
  }
  if (funcs.count("minorant") && funcs["minorant"].body) {
    if (expr::mentions_var_n(funcs["minorant"].body))
      throw ScenarioError(origin + ": the single minorant may not depend on n");
    s.minorant = build_func(funcs["minorant"], sp);
  }
  for (const TargetSpec& t : s.targets) {
    bool needs_g = t.inequality == Inequality::teor2 || t.inequality == Inequality::teor3 ||
                   t.inequality == Inequality::eqE;
    if (needs_g && !s.gseq) throw ScenarioError(origin + ": target needs a function g");
    if (t.inequality == Inequality::cor && !s.minorant)
      throw ScenarioError(origin + ": target cor needs a minorant");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_scenario_text(buffer.str(), path);
}

std::string save_scenario(const Scenario& s) { return s.source_text; }

namespace {

const char* kEscapingAtomText = R"(scenario escaping-atom
description point mass sliding along [0, 1] toward an indicator pinned at the limit point

space interval [0, 1]

measure mu
atom at 0 weight 1

measure mun
atom at 1/n weight 1

function f
expr ind(s == 0)
lower 0
upper 1

target eq1 expect Holds
target eq3 expect Violated lhs 1 rhs 0
target eq3_1 expect Holds lhs 0 rhs 0
convergence weak consistent
convergence setwise falsified
)";

const char* kEscapingSpikeNegativeText = R"(scenario escaping-spike-negative
description shrinking density spike on (0, 1] against f = -1/s, the spike integrals run off to -inf

space interval (0, 1]

measure mu
piece on [1/2, 1] density 2
anti 2 * s

measure mun
piece on [1/(2 * n), 1/n] density sqrt(n)
piece on [1/2, 1] density 2 - 1/sqrt(n)

function f
expr -1/s
anti -ln(s)
upper -1
continuous true

function g
expr -1/s
anti -ln(s)
upper -1
continuous true

target eq1-as-eq3 expect Violated
target teor2 expect HypothesisFailed
target teor3 expect HypothesisFailed
target eqE expect Holds
convergence weak consistent
convergence setwise consistent
sweep closed_form -ln(2) * (sqrt(n) + 2 - 1/sqrt(n))
)";

const char* kEscapingSpikePositiveText = R"(scenario escaping-spike-positive
description shrinking density spike on (0, 1] against f = 1/s, both sides of the bound stay apart

space interval (0, 1]

measure mu
piece on [1/2, 1] density 2
anti 2 * s

measure mun
piece on [1/(2 * n), 1/n] density sqrt(n)
piece on [1/2, 1] density 2 - 1/sqrt(n)

function f
expr 1/s
anti ln(s)
lower 1
continuous true

function g
expr s
anti s^2 / 2
lower 0
upper 1
continuous true

target eq3 expect Holds
target eq3_1 expect Holds
target teor3 expect Holds
target eqE expect Holds
convergence weak consistent
convergence setwise consistent
sweep closed_form ln(2) * (sqrt(n) + 2 - 1/sqrt(n))
)";

const char* kUniformSpikeMinorantText = R"(scenario uniform-spike-minorant
description vanishing-width spike over the uniform measure with a constant minorant, closed forms on both sides

space interval (0, 1]

measure mu
piece on [0, 1] density 1
anti s

measure mun
piece on [0, 1] density 1
anti s

function f
expr -1 + n * ind(s in (0, 1/n))
anti -s + n * min(s, 1/n)
lower -1

function g
expr -1
anti -s
lower -1
upper -1
continuous true

target teor2 expect Holds lhs -1 rhs 0
target teor3 expect Holds lhs -1 rhs 0
convergence weak consistent
convergence setwise consistent
)";

const char* kEscapingMassClassicText = R"(scenario escaping-mass-classic
description unit mass pushed into a vanishing spike while the background measure stays uniform

space interval (0, 1]

measure mu
piece on [0, 1] density 1
anti s

measure mun
piece on [0, 1] density 1
anti s

function f
expr n * ind(s in (0, 1/n))
anti n * min(s, 1/n)
lower 0

target eq1 expect Holds lhs 0 rhs 1
target eq3_1 expect Holds
convergence weak consistent
convergence setwise consistent
)";

std::string rational_support_text(int n_max) {
  std::ostringstream os;
  os << "scenario rational-support\n";
  os << "description rationals in (0, 1] with deepening penalties on an enumeration prefix and "
        "point masses that sidestep it\n\n";
  os << "space rationals01\n\n";
  os << "grid nschedule";
  for (int n : dyadic_schedule(n_max)) os << ' ' << n;
  os << "\ngrid mmax " << 2 * n_max << "\n\n";
  os << "measure mu\natom at 1 weight 1\n\n";
  os << "measure mun\natom at kn(n) weight 1\n\n";
  os << "function f\nexpr -n * ind(s in D(n))\nupper 0\n\n";
  os << "function g\nexpr -n * ind(s in D(n))\nupper 0\n\n";
  os << "minorant m\nexpr -(1/0)\n\n";
  os << "target teor3 expect Holds\n";
  os << "target cor expect HypothesisFailed\n";
  os << "target eqE expect Holds\n";
  os << "convergence weak consistent\n";
  return os.str();
}

}  // namespace

Scenario scenario_escaping_atom() { return load_scenario_text(kEscapingAtomText, "<builtin>"); }

Scenario scenario_escaping_spike(SpikeVariant variant) {
  return load_scenario_text(variant == SpikeVariant::negative_f ? kEscapingSpikeNegativeText
                                                                : kEscapingSpikePositiveText,
                            "<builtin>");
}

Scenario scenario_rational_support(int n_max) {
  return load_scenario_text(rational_support_text(n_max), "<builtin>");
}

Scenario scenario_uniform_spike_minorant() {
  return load_scenario_text(kUniformSpikeMinorantText, "<builtin>");
}

Scenario scenario_escaping_mass_classic() {
  return load_scenario_text(kEscapingMassClassicText, "<builtin>");
}

namespace {

struct HingeProfile {
  Rational c0, c1, c2, c3, t1, t2;

  Rational value(const Rational& x) const {
    Rational a = x - t1;
    if (a < Rational(0)) a = -a;
    Rational b = x - t2;
    if (b < Rational(0)) b = -b;
    return c0 + c1 * a + c2 * b + c3 * x;
  }

  Rational min_over_unit() const {
    Rational best = value(Rational(0));
    for (const Rational& x : {t1, t2, Rational(1)}) {
      Rational v = value(x);
      if (v < best) best = v;
    }
    return best;
  }

  Rational max_over_unit() const {
    Rational best = value(Rational(0));
    for (const Rational& x : {t1, t2, Rational(1)}) {
      Rational v = value(x);
      if (best < v) best = v;
    }
    return best;
  }

  std::string text() const {
    std::ostringstream os;
    os << c0.to_string() << " + " << c1.to_string() << " * abs(s - " << t1.to_string() << ") + "
       << c2.to_string() << " * abs(s - " << t2.to_string() << ") + " << c3.to_string() << " * s";
    return os.str();
  }
};

}  // namespace

Scenario generate_random(std::uint64_t seed, RandomProfile profile) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(profile) + 1);
  auto draw = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  std::ostringstream os;
  os << "scenario random-" << to_string(profile) << "-" << seed << "\n";
  os << "description seeded scenario, profile " << to_string(profile) << "\n\n";
  os << "space interval [0, 1]\n\n";
  os << "grid preset light\n\n";

  int atom_count = static_cast<int>(draw(1, 3));
  std::vector<std::int64_t> numerators;
  while (static_cast<int>(numerators.size()) < atom_count) {
    std::int64_t p = draw(2, 6);
    if (std::find(numerators.begin(), numerators.end(), p) == numerators.end())
      numerators.push_back(p);
  }
  std::vector<std::int64_t> weights;
  std::int64_t weight_total = 0;
  for (int i = 0; i < atom_count; ++i) {
    weights.push_back(draw(1, 9));
    weight_total += weights.back();
  }

  os << "measure mu\n";
  for (int i = 0; i < atom_count; ++i) {
    os << "atom at " << Rational(numerators[i], 8).to_string() << " weight "
       << Rational(weights[i], weight_total).to_string() << "\n";
  }
  os << "\nmeasure mun\n";
  bool drifting = profile != RandomProfile::setwise_minorant;
  for (int i = 0; i < atom_count; ++i) {
    os << "atom at " << Rational(numerators[i], 8).to_string();
    if (drifting) {
      std::int64_t c = draw(0, 1) == 0 ? -1 : 1;
      os << (c > 0 ? " + " : " - ") << "1/(8 * n)";
    }
    os << " weight " << Rational(weights[i], weight_total).to_string() << "\n";
  }

  HingeProfile h;
  h.c1 = Rational(draw(0, 8), 4);
  h.c2 = Rational(draw(0, 8), 4);
  h.c3 = Rational(draw(-8, 8), 4);
  h.c0 = Rational(draw(-8, 8), 4);
  h.t1 = Rational(draw(1, 7), 8);
  h.t2 = Rational(draw(1, 7), 8);
  h.c0 = h.c0 - h.min_over_unit();  // exact shift to a zero minimum
  Rational upper = h.max_over_unit();

  bool drift_f = draw(0, 1) == 1;
  std::string base = h.text();
  std::string f_expr = drift_f ? "(" + base + ") * (1 + 1/(2 * n))" : base;
  Rational f_upper = drift_f ? upper * Rational(3, 2) : upper;

  os << "\nfunction f\n";
  os << "expr " << f_expr << "\n";
  os << "lower 0\n";
  os << "upper " << f_upper.to_string() << "\n";
  os << "continuous true\n";

  if (profile == RandomProfile::nonneg_weak) {
    os << "\ntarget eq3_1\n";
    os << "convergence weak consistent\n";
  } else {
    Rational d(draw(1, 4), 2);
    os << "\nfunction g\n";
    os << "expr (" << base << ") - " << d.to_string() << "\n";
    os << "lower " << (-d).to_string() << "\n";
    os << "upper " << (upper - d).to_string() << "\n";
    os << "continuous true\n";
    if (profile == RandomProfile::setwise_minorant) {
      os << "\ntarget teor2\n";
      os << "convergence setwise consistent\n";
    } else {
      os << "\ntarget teor3\n";
      os << "convergence weak consistent\n";
    }
  }
  return load_scenario_text(os.str(), "<random>");
}

std::vector<std::string> builtin_scenario_names() {
  return {"escaping-atom",          "escaping-spike-negative", "escaping-spike-positive",
          "rational-support",       "uniform-spike-minorant",  "escaping-mass-classic"};
}

bool is_builtin_scenario(const std::string& name) {
  auto names = builtin_scenario_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "escaping-atom") return scenario_escaping_atom();
  if (name == "escaping-spike-negative") return scenario_escaping_spike(SpikeVariant::negative_f);
  if (name == "escaping-spike-positive") return scenario_escaping_spike(SpikeVariant::positive_f);
  if (name == "rational-support") return scenario_rational_support();
  if (name == "uniform-spike-minorant") return scenario_uniform_spike_minorant();
  if (name == "escaping-mass-classic") return scenario_escaping_mass_classic();
  throw ScenarioError("unknown scenario '" + name + "'");
}

InequalityReport run_target(const Scenario& s, const TargetSpec& target, const VerifyConfig& cfg) {
  switch (target.inequality) {
    case Inequality::eq1:
      return verify_fatou_classic(s.fseq, s.mu_limit, cfg);
    case Inequality::eq3:
      return verify_fatou_setwise(s.fseq, s.mu_seq, s.mu_limit, cfg, target.waive_nonneg);
    case Inequality::eq3_1:
    case Inequality::eqJ0:
      return verify_fatou_weak(s.fseq, s.mu_seq, s.mu_limit, cfg, target.inequality);
    case Inequality::teor2:
      if (!s.gseq) throw ScenarioError("target teor2 needs a function g");
      return verify_theorem2(s.fseq, *s.gseq, s.mu_seq, s.mu_limit, cfg);
    case Inequality::teor3:
      if (!s.gseq) throw ScenarioError("target teor3 needs a function g");
      return verify_theorem3(s.fseq, *s.gseq, s.mu_seq, s.mu_limit, cfg);
    case Inequality::cor:
      if (!s.minorant) throw ScenarioError("target cor needs a minorant");
      return verify_corollary(s.fseq, *s.minorant, s.mu_seq, s.mu_limit, cfg);
    case Inequality::eqE: {
      EquivalenceReport eq = run_equivalence(s, cfg);
      InequalityReport rep;
      rep.inequality = Inequality::eqE;
      rep.lhs = eq.common_value;
      rep.rhs = eq.equality.rhs;
      rep.hypothesis = eq.condition;
      rep.verdict = eq.agree ? Verdict::Holds : Verdict::Inconclusive;
      rep.reason = eq.note + "; condition: " + eq.condition.reason +
                   "; equality: " + eq.equality.reason;
      rep.lhs_lower_is_declared = rep.lhs.lo.is_finite();
      return rep;
    }
  }
  throw ScenarioError("unknown target");
}

EquivalenceReport run_equivalence(const Scenario& s, const VerifyConfig& cfg) {
  if (!s.gseq) throw ScenarioError("equivalence check needs a function g");
  return verify_remark_equivalence(*s.gseq, s.mu_seq, s.mu_limit, cfg);
}

VerifyConfig config_for(const Scenario& s) {
  VerifyConfig cfg;
  cfg.grid = s.grid;
  return cfg;
}

}  // namespace fatou
