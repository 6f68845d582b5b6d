#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fatou/extended_real.hpp"
#include "fatou/point.hpp"
#include "fatou/space.hpp"

namespace fatou::expr {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line(line),
        col(col) {}
  int line, col;
};

class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Op {
  constant,
  var_s,
  var_n,
  neg,
  ln,
  sqrt_,
  abs_,
  add,
  sub,
  mul,
  div,
  pow_,
  min_,
  max_,
  indicator,
  piecewise,
  kn,  // escape-atom index rule on the countable space
};

enum class Rel { eq, ne, lt, le, gt, ge };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// Condition inside ind(...) and if(...): either a comparison of two
// expressions or membership of s in an interval or an enumeration prefix.
struct Condition {
  enum class Kind { compare, in_interval, in_prefix } kind = Kind::compare;
  Rel rel = Rel::eq;
  NodePtr a, b;        // compare
  NodePtr lo, hi;      // in_interval bounds
  bool lo_open = false, hi_open = false;
  NodePtr count;       // in_prefix size expression
};

struct Node {
  Op op = Op::constant;
  double cval = 0;
  std::optional<Rational> crat;  // exact value for integer literals
  NodePtr a, b, c;               // operands; piecewise uses cond/a/b
  std::optional<Condition> cond;
};

// Value of a subexpression: extended real plus the exact rational when every
// operation along the way stayed rational.
struct Value {
  ExtendedReal v = 0.0;
  std::optional<Rational> exact;
};

struct Env {
  std::optional<int> n;
  std::optional<Point> s;
  const Space* space = nullptr;  // needed for D(n) membership and kn(n)
};

// Grammar: + - | * / | unary - | ^ (right) | literals, s, n, parentheses and
// the calls ln sqrt abs min max pow ind if kn.  ind takes a comparison
// (a == b, a < b, ...) or a membership (s in [a,b], s in (a,b], s in D(k));
// if takes (condition, then, else).  Integer literals are exact; decimal
// literals are shortest-round-trip binary floats.
NodePtr parse(const std::string& text);

// Canonical text form; parse(print(x)) reproduces the tree.
std::string print(const NodePtr& node);

bool equal(const NodePtr& a, const NodePtr& b);
bool mentions_var_n(const NodePtr& node);
bool mentions_var_s(const NodePtr& node);

// Total over the extended reals with the limit conventions x/0 = sign(x) inf,
// 0/0 = 0, and 0 * anything = 0.  ln and sqrt of negative arguments and
// inf - inf raise EvalError.
Value eval(const NodePtr& node, const Env& env);

// Index rule for the escaping atoms on the countable space: the smallest
// k > kn(n-1) with k/(k+1) outside the first n enumerated values.
Rational escape_atom(const Space& space, int n);

}  // namespace fatou::expr
