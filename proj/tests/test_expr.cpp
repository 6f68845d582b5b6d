#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "fatou/expr.hpp"

using namespace fatou;
using namespace fatou::expr;

namespace {

Value ev(const std::string& text, std::optional<int> n = {}, std::optional<double> s = {},
         const Space* space = nullptr) {
  Env env;
  env.n = n;
  if (s) env.s = Point(*s);
  env.space = space;
  return eval(parse(text), env);
}

double evd(const std::string& text, std::optional<int> n = {}, std::optional<double> s = {}) {
  return ev(text, n, s).v.raw();
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(evd("1 + 2 * 3") == 7.0);
  CHECK(evd("(1 + 2) * 3") == 9.0);
  CHECK(evd("2 ^ 3 ^ 2") == 512.0);
  CHECK(evd("-2 ^ 2") == -4.0);
  CHECK(evd("6 / 3 / 2") == 1.0);
  CHECK(evd("1 - 2 - 3") == -4.0);
  CHECK(evd("2 * s", {}, 0.25) == 0.5);
  CHECK(evd("n / 2", 5) == 2.5);
}

TEST_CASE("parse print round trip reproduces the tree") {
  std::vector<std::string> seeds = {
      "s",
      "n",
      "1/2",
      "-3/4",
      "0.1",
      "2.5",
      "s + 1",
      "s - n",
      "-s",
      "s * n",
      "s / n",
      "s ^ 2",
      "2 ^ s ^ 2",
      "ln(s)",
      "sqrt(s + 1)",
      "abs(s - 1/2)",
      "min(s, 1 - s)",
      "max(s, n)",
      "pow(s, 3)",
      "ind(s == 0)",
      "ind(s < 1/2)",
      "ind(s <= 1/2)",
      "ind(s > 1/2)",
      "ind(s >= 1/2)",
      "ind(s != 0)",
      "ind(s in [0, 1])",
      "ind(s in (0, 1])",
      "ind(s in [0, 1))",
      "ind(s in (0, 1))",
      "ind(s in D(5))",
      "ind(s in D(n))",
      "if(s < 1/2, s, 1 - s)",
      "kn(n)",
      "-1 / s",
      "(s + 1) * (s - 1)",
      "s * (1 + 1 / (2 * n))",
      "-1 + n * ind(s in (0, 1 / n))",
      "2 - 1 / sqrt(n)",
      "-(s + n)",
      "1 - -3",
  };
  std::vector<std::string> texts;
  for (const auto& a : seeds) {
    texts.push_back(a);
    texts.push_back(a + " + 1/3");
    texts.push_back("2 * (" + a + ")");
    texts.push_back("abs(" + a + ")");
    texts.push_back("min(" + a + ", 0)");
  }
  REQUIRE(texts.size() >= 200);
  for (const auto& t : texts) {
    CAPTURE(t);
    NodePtr tree = parse(t);
    std::string printed = print(tree);
    NodePtr reparsed = parse(printed);
    CHECK(equal(tree, reparsed));
    CHECK(print(reparsed) == printed);
  }
}

TEST_CASE("division conventions") {
  CHECK(ev("1 / 0").v.is_pos_inf());
  CHECK(ev("-1 / 0").v.is_neg_inf());
  CHECK(ev("0 / 0").v == ExtendedReal(0.0));
  CHECK(ev("0 / 0").exact.value() == Rational(0));
  CHECK(ev("1 / s", {}, 0.0).v.is_pos_inf());
  CHECK(ev("-1 / s", {}, 0.0).v.is_neg_inf());
}

TEST_CASE("zero times anything is zero") {
  CHECK(ev("0 * (1 / 0)").v == ExtendedReal(0.0));
  CHECK(ev("0 * (-1 / 0)").v == ExtendedReal(0.0));
  CHECK(ev("(1 / 0) * 0").v == ExtendedReal(0.0));
  CHECK(evd("0 * ln(0)") == 0.0);
}

TEST_CASE("logarithm and square root domains") {
  CHECK(ev("ln(0)").v.is_neg_inf());
  CHECK(evd("ln(1)") == 0.0);
  CHECK_THROWS_AS(ev("ln(0 - 1)"), EvalError);
  CHECK(evd("sqrt(4)") == 2.0);
  CHECK(evd("sqrt(0)") == 0.0);
  CHECK_THROWS_AS(ev("sqrt(0 - 4)"), EvalError);
  CHECK_THROWS_AS(ev("ln(0) + 1 / 0"), EvalError);
  CHECK_THROWS_AS(ev("1 / 0 - 1 / 0"), EvalError);
}

TEST_CASE("exactness propagates through rational operations only") {
  CHECK(ev("1/3 + 1/6").exact.value() == Rational(1, 2));
  CHECK(ev("2/3 * 3/4").exact.value() == Rational(1, 2));
  CHECK(ev("1 - 1/3").exact.value() == Rational(2, 3));
  CHECK(ev("abs(-5/7)").exact.value() == Rational(5, 7));
  CHECK(ev("min(1/3, 1/2)").exact.value() == Rational(1, 3));
  CHECK(ev("max(1/3, 1/2)").exact.value() == Rational(1, 2));
  CHECK(ev("-(3/4)").exact.value() == Rational(-3, 4));
  CHECK(ev("ind(1/2 < 1)").exact.value() == Rational(1));
  // Decimal literals carry the exact binary value of the double.
  auto tenth = ev("0.1").exact;
  REQUIRE(tenth.has_value());
  CHECK(tenth->to_double() == 0.1);
  CHECK(*tenth != Rational(1, 10));
  CHECK(ev("0.5").exact.value() == Rational(1, 2));
  CHECK_FALSE(ev("pow(2, 2)").exact.has_value());
  CHECK_FALSE(ev("sqrt(4)").exact.has_value());
  CHECK_FALSE(ev("ln(1)").exact.has_value());
  // Rational propagation survives through variables bound to exact points.
  Env env;
  env.s = Point(Rational(1, 3));
  CHECK(eval(parse("s + 1/6"), env).exact.value() == Rational(1, 2));
}

TEST_CASE("indicators evaluate to exact zero or one") {
  CHECK(evd("ind(s == 0)", {}, 0.0) == 1.0);
  CHECK(evd("ind(s == 0)", {}, 0.5) == 0.0);
  CHECK(evd("ind(s in [0, 1/2))", {}, 0.0) == 1.0);
  CHECK(evd("ind(s in [0, 1/2))", {}, 0.5) == 0.0);
  CHECK(evd("ind(s in (0, 1/2])", {}, 0.0) == 0.0);
  CHECK(evd("ind(s in (0, 1/2])", {}, 0.5) == 1.0);
  CHECK(ev("ind(s in [0, 1])", {}, 0.25).exact.value() == Rational(1));
  // Exact endpoint membership distinguishes open from closed at rationals.
  Env env;
  env.s = Point(Rational(1, 2));
  CHECK(eval(parse("ind(s in (0, 1/2))"), env).v == ExtendedReal(0.0));
  CHECK(eval(parse("ind(s in (0, 1/2])"), env).v == ExtendedReal(1.0));
  CHECK(evd("ind(s < 1/2) + 2 * ind(s >= 1/2)", {}, 0.75) == 2.0);
}

TEST_CASE("if selects branches") {
  CHECK(evd("if(s < 1/2, s, 1 - s)", {}, 0.25) == 0.25);
  CHECK(evd("if(s < 1/2, s, 1 - s)", {}, 0.75) == 0.25);
  CHECK(ev("if(1 < 2, 1/3, 1/4)").exact.value() == Rational(1, 3));
}

TEST_CASE("enumeration prefix membership needs the countable space") {
  Space q = Space::rationals01();
  Env env;
  env.space = &q;
  env.n = 4;
  env.s = Point(Rational(1, 2));
  CHECK(eval(parse("ind(s in D(2))"), env).v == ExtendedReal(1.0));
  CHECK(eval(parse("ind(s in D(1))"), env).v == ExtendedReal(0.0));
  CHECK(eval(parse("ind(s in D(n))"), env).v == ExtendedReal(1.0));

  Env no_space;
  no_space.s = Point(Rational(1, 2));
  no_space.n = 2;
  CHECK_THROWS_AS(eval(parse("ind(s in D(2))"), no_space), EvalError);

  // Prefix sizes beyond the materialized enumeration are refused, not guessed.
  Env big = env;
  big.n = 100000000;
  CHECK_THROWS_AS(eval(parse("ind(s in D(n))"), big), EvalError);
}

TEST_CASE("escape atom walks outside the enumerated prefix") {
  Space q = Space::rationals01();
  const Enumeration& en = q.enumeration();
  Rational prev(0);
  for (int n = 1; n <= 64; ++n) {
    Rational r = escape_atom(q, n);
    // k/(k+1) form, strictly increasing, outside the first n enumerated.
    CHECK(r.num() + 1 == r.den());
    CHECK(prev < r);
    auto idx = en.index_of(r);
    if (idx) CHECK(*idx > n);
    prev = r;
  }
  Env env;
  env.space = &q;
  env.n = 3;
  CHECK(eval(parse("kn(n)"), env).exact.value() == escape_atom(q, 3));
  CHECK_THROWS_AS(escape_atom(q, 0), EvalError);
}

TEST_CASE("variable mentions") {
  CHECK(mentions_var_s(parse("s + 1")));
  CHECK_FALSE(mentions_var_s(parse("n + 1")));
  CHECK(mentions_var_n(parse("ind(s in (0, 1 / n))")));
  CHECK(mentions_var_n(parse("ind(s in D(n))")));
  CHECK(mentions_var_n(parse("kn(n)")));
  CHECK_FALSE(mentions_var_n(parse("ln(s) * 2")));
}

TEST_CASE("unbound variables and malformed input fail loudly") {
  CHECK_THROWS_AS(ev("s"), EvalError);
  CHECK_THROWS_AS(ev("n"), EvalError);
  CHECK_THROWS_AS(parse("1 +"), ParseError);
  CHECK_THROWS_AS(parse("(1"), ParseError);
  CHECK_THROWS_AS(parse("foo(1)"), ParseError);
  CHECK_THROWS_AS(parse("1 2"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("ind(s)"), ParseError);
  CHECK_THROWS_AS(parse("min(1)"), ParseError);
}
