#include "fatou/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace fatou::expr {

namespace {

struct Token {
  enum class Kind { number, ident, symbol, end } kind = Kind::end;
  std::string text;
  double num = 0;
  bool is_integer = false;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_.kind = Token::Kind::end;
      return;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      std::size_t start = pos_;
      bool integral = true;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
      if (pos_ < text_.size() && text_[pos_] == '.') {
        integral = false;
        bump();
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        integral = false;
        bump();
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) bump();
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
      }
      tok_.kind = Token::Kind::number;
      tok_.text = text_.substr(start, pos_ - start);
      tok_.num = std::stod(tok_.text);
      tok_.is_integer = integral;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_')) {
        bump();
      }
      tok_.kind = Token::Kind::ident;
      tok_.text = text_.substr(start, pos_ - start);
      return;
    }
    static const char* two[] = {"==", "!=", "<=", ">="};
    for (const char* t : two) {
      if (text_.compare(pos_, 2, t) == 0) {
        tok_.kind = Token::Kind::symbol;
        tok_.text = t;
        bump();
        bump();
        return;
      }
    }
    static const std::string singles = "+-*/^(),[]<>";
    if (singles.find(c) != std::string::npos) {
      tok_.kind = Token::Kind::symbol;
      tok_.text = std::string(1, c);
      bump();
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
  }

  void bump() {
    ++pos_;
    ++col_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

NodePtr make(Op op) {
  auto n = std::make_shared<Node>();
  n->op = op;
  return n;
}

NodePtr make_const(double v, std::optional<Rational> r) {
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->cval = v;
  n->crat = std::move(r);
  return n;
}

NodePtr make_unary(Op op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::end) throw ParseError("trailing input '" + t.text + "'", t.line, t.col);
    return e;
  }

 private:
  Lexer lex_;

  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = lex_.peek();
    throw ParseError(msg, t.line, t.col);
  }

  bool at_symbol(const std::string& s) {
    const Token& t = lex_.peek();
    return t.kind == Token::Kind::symbol && t.text == s;
  }

  void expect_symbol(const std::string& s) {
    if (!at_symbol(s)) fail("expected '" + s + "'");
    lex_.take();
  }

  NodePtr parse_expr() {
    NodePtr left = parse_term();
    while (at_symbol("+") || at_symbol("-")) {
      bool add = lex_.take().text == "+";
      NodePtr right = parse_term();
      left = make_binary(add ? Op::add : Op::sub, left, right);
    }
    return left;
  }

  NodePtr parse_term() {
    NodePtr left = parse_factor();
    while (at_symbol("*") || at_symbol("/")) {
      bool mul = lex_.take().text == "*";
      NodePtr right = parse_factor();
      left = make_binary(mul ? Op::mul : Op::div, left, right);
    }
    return left;
  }

  NodePtr parse_factor() {
    if (at_symbol("-")) {
      lex_.take();
      NodePtr inner = parse_factor();
      if (inner->op == Op::constant) {
        std::optional<Rational> r;
        if (inner->crat) r = -*inner->crat;
        return make_const(-inner->cval, r);
      }
      return make_unary(Op::neg, inner);
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (at_symbol("^")) {
      lex_.take();
      NodePtr exp = parse_factor();
      return make_binary(Op::pow_, base, exp);
    }
    return base;
  }

  NodePtr parse_atom() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::number) {
      Token num = lex_.take();
      std::optional<Rational> r;
      if (num.is_integer && num.num <= 9.0e15) {
        r = Rational(static_cast<std::int64_t>(num.num));
      } else {
        r = Rational::from_double_exact(num.num);
      }
      return make_const(num.num, r);
    }
    if (t.kind == Token::Kind::symbol && t.text == "(") {
      lex_.take();
      NodePtr e = parse_expr();
      expect_symbol(")");
      return e;
    }
    if (t.kind != Token::Kind::ident) fail("expected expression");
    Token id = lex_.take();
    const std::string& name = id.text;
    if (name == "s") return make(Op::var_s);
    if (name == "n") return make(Op::var_n);
    if (name == "ln" || name == "sqrt" || name == "abs" || name == "kn") {
      expect_symbol("(");
      NodePtr a = parse_expr();
      expect_symbol(")");
      Op op = name == "ln" ? Op::ln : name == "sqrt" ? Op::sqrt_ : name == "abs" ? Op::abs_ : Op::kn;
      return make_unary(op, a);
    }
    if (name == "min" || name == "max" || name == "pow") {
      expect_symbol("(");
      NodePtr a = parse_expr();
      expect_symbol(",");
      NodePtr b = parse_expr();
      expect_symbol(")");
      Op op = name == "min" ? Op::min_ : name == "max" ? Op::max_ : Op::pow_;
      return make_binary(op, a, b);
    }
    if (name == "ind") {
      expect_symbol("(");
      Condition c = parse_condition();
      expect_symbol(")");
      auto node = std::make_shared<Node>();
      node->op = Op::indicator;
      node->cond = std::move(c);
      return node;
    }
    if (name == "if") {
      expect_symbol("(");
      Condition c = parse_condition();
      expect_symbol(",");
      NodePtr a = parse_expr();
      expect_symbol(",");
      NodePtr b = parse_expr();
      expect_symbol(")");
      auto node = std::make_shared<Node>();
      node->op = Op::piecewise;
      node->cond = std::move(c);
      node->a = std::move(a);
      node->b = std::move(b);
      return node;
    }
    throw ParseError("unknown identifier '" + name + "'", id.line, id.col);
  }

  Condition parse_condition() {
    NodePtr a = parse_expr();
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::ident && t.text == "in") {
      if (a->op != Op::var_s) fail("membership condition needs s on the left");
      lex_.take();
      Condition c;
      const Token& u = lex_.peek();
      if (u.kind == Token::Kind::ident && u.text == "D") {
        lex_.take();
        expect_symbol("(");
        c.kind = Condition::Kind::in_prefix;
        c.count = parse_expr();
        expect_symbol(")");
        return c;
      }
      bool lo_open;
      if (at_symbol("[")) {
        lo_open = false;
      } else if (at_symbol("(")) {
        lo_open = true;
      } else {
        fail("expected interval or D(...)");
      }
      lex_.take();
      c.kind = Condition::Kind::in_interval;
      c.lo_open = lo_open;
      c.lo = parse_expr();
      expect_symbol(",");
      c.hi = parse_expr();
      if (at_symbol("]")) {
        c.hi_open = false;
      } else if (at_symbol(")")) {
        c.hi_open = true;
      } else {
        fail("expected ']' or ')'");
      }
      lex_.take();
      return c;
    }
    Condition c;
    c.kind = Condition::Kind::compare;
    if (at_symbol("==")) {
      c.rel = Rel::eq;
    } else if (at_symbol("!=")) {
      c.rel = Rel::ne;
    } else if (at_symbol("<=")) {
      c.rel = Rel::le;
    } else if (at_symbol(">=")) {
      c.rel = Rel::ge;
    } else if (at_symbol("<")) {
      c.rel = Rel::lt;
    } else if (at_symbol(">")) {
      c.rel = Rel::gt;
    } else {
      fail("expected comparison or 'in'");
    }
    lex_.take();
    c.a = std::move(a);
    c.b = parse_expr();
    return c;
  }
};

int precedence(Op op) {
  switch (op) {
    case Op::add:
    case Op::sub:
      return 1;
    case Op::mul:
    case Op::div:
      return 2;
    case Op::neg:
      return 3;
    case Op::pow_:
      return 4;
    default:
      return 5;
  }
}

void print_rec(const NodePtr& node, std::ostringstream& os);

void print_child(const NodePtr& child, int min_prec, std::ostringstream& os) {
  bool parens = precedence(child->op) < min_prec ||
                (child->op == Op::constant && !child->a && child->cval < 0 && min_prec > 1);
  if (parens) os << '(';
  print_rec(child, os);
  if (parens) os << ')';
}

const char* rel_text(Rel r) {
  switch (r) {
    case Rel::eq: return "==";
    case Rel::ne: return "!=";
    case Rel::lt: return "<";
    case Rel::le: return "<=";
    case Rel::gt: return ">";
    case Rel::ge: return ">=";
  }
  return "==";
}

void print_condition(const Condition& c, std::ostringstream& os) {
  switch (c.kind) {
    case Condition::Kind::compare:
      print_rec(c.a, os);
      os << ' ' << rel_text(c.rel) << ' ';
      print_rec(c.b, os);
      break;
    case Condition::Kind::in_interval:
      os << "s in " << (c.lo_open ? '(' : '[');
      print_rec(c.lo, os);
      os << ", ";
      print_rec(c.hi, os);
      os << (c.hi_open ? ')' : ']');
      break;
    case Condition::Kind::in_prefix:
      os << "s in D(";
      print_rec(c.count, os);
      os << ')';
      break;
  }
}

void print_rec(const NodePtr& node, std::ostringstream& os) {
  switch (node->op) {
    case Op::constant:
      if (node->crat && node->crat->is_integer()) {
        os << node->crat->to_string();
      } else {
        os << format_double(node->cval);
      }
      break;
    case Op::var_s:
      os << 's';
      break;
    case Op::var_n:
      os << 'n';
      break;
    case Op::neg:
      os << '-';
      print_child(node->a, 4, os);
      break;
    case Op::ln:
    case Op::sqrt_:
    case Op::abs_:
    case Op::kn: {
      const char* name = node->op == Op::ln       ? "ln"
                         : node->op == Op::sqrt_  ? "sqrt"
                         : node->op == Op::abs_   ? "abs"
                                                  : "kn";
      os << name << '(';
      print_rec(node->a, os);
      os << ')';
      break;
    }
    case Op::add:
    case Op::sub:
      print_child(node->a, 1, os);
      os << (node->op == Op::add ? " + " : " - ");
      print_child(node->b, 2, os);
      break;
    case Op::mul:
    case Op::div:
      print_child(node->a, 2, os);
      os << (node->op == Op::mul ? " * " : " / ");
      print_child(node->b, 3, os);
      break;
    case Op::pow_:
      print_child(node->a, 5, os);
      os << " ^ ";
      print_child(node->b, 4, os);
      break;
    case Op::min_:
    case Op::max_:
      os << (node->op == Op::min_ ? "min(" : "max(");
      print_rec(node->a, os);
      os << ", ";
      print_rec(node->b, os);
      os << ')';
      break;
    case Op::indicator:
      os << "ind(";
      print_condition(*node->cond, os);
      os << ')';
      break;
    case Op::piecewise:
      os << "if(";
      print_condition(*node->cond, os);
      os << ", ";
      print_rec(node->a, os);
      os << ", ";
      print_rec(node->b, os);
      os << ')';
      break;
  }
}

}  // namespace

NodePtr parse(const std::string& text) { return Parser(text).parse_all(); }

std::string print(const NodePtr& node) {
  std::ostringstream os;
  print_rec(node, os);
  return os.str();
}

bool equal(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return !a && !b;
  if (a->op != b->op) return false;
  if (a->op == Op::constant) {
    if (a->cval != b->cval) return false;
    if (a->crat.has_value() != b->crat.has_value()) return false;
    if (a->crat && *a->crat != *b->crat) return false;
  }
  if (a->cond.has_value() != b->cond.has_value()) return false;
  if (a->cond) {
    const Condition& ca = *a->cond;
    const Condition& cb = *b->cond;
    if (ca.kind != cb.kind) return false;
    switch (ca.kind) {
      case Condition::Kind::compare:
        if (ca.rel != cb.rel || !equal(ca.a, cb.a) || !equal(ca.b, cb.b)) return false;
        break;
      case Condition::Kind::in_interval:
        if (ca.lo_open != cb.lo_open || ca.hi_open != cb.hi_open) return false;
        if (!equal(ca.lo, cb.lo) || !equal(ca.hi, cb.hi)) return false;
        break;
      case Condition::Kind::in_prefix:
        if (!equal(ca.count, cb.count)) return false;
        break;
    }
  }
  return equal(a->a, b->a) && equal(a->b, b->b) && equal(a->c, b->c);
}

namespace {

bool mentions(const NodePtr& node, Op var) {
  if (!node) return false;
  if (node->op == var) return true;
  if (node->cond) {
    const Condition& c = *node->cond;
    if (c.kind == Condition::Kind::compare && (mentions(c.a, var) || mentions(c.b, var)))
      return true;
    if (c.kind == Condition::Kind::in_interval && (mentions(c.lo, var) || mentions(c.hi, var)))
      return true;
    if (c.kind == Condition::Kind::in_prefix && mentions(c.count, var)) return true;
    if (c.kind != Condition::Kind::compare && var == Op::var_s) return true;
  }
  return mentions(node->a, var) || mentions(node->b, var) || mentions(node->c, var);
}

Value from_rational(const Rational& r) {
  Value v;
  v.exact = r;
  v.v = r.to_double();
  return v;
}

Value from_double(double d) {
  Value v;
  v.v = ExtendedReal(d);
  return v;
}

Value from_extended(ExtendedReal e) {
  Value v;
  v.v = e;
  return v;
}

bool eval_condition(const Condition& c, const Env& env);

Value eval_rec(const NodePtr& node, const Env& env) {
  switch (node->op) {
    case Op::constant: {
      Value v;
      v.v = ExtendedReal(node->cval);
      v.exact = node->crat;
      return v;
    }
    case Op::var_s: {
      if (!env.s) throw EvalError("s is unbound");
      Value v;
      v.v = ExtendedReal(env.s->value);
      v.exact = env.s->exact;
      return v;
    }
    case Op::var_n: {
      if (!env.n) throw EvalError("n is unbound");
      return from_rational(Rational(*env.n));
    }
    case Op::neg: {
      Value a = eval_rec(node->a, env);
      Value v;
      v.v = -a.v;
      if (a.exact) v.exact = -*a.exact;
      return v;
    }
    case Op::ln: {
      Value a = eval_rec(node->a, env);
      if (a.v.is_pos_inf()) return from_extended(ExtendedReal::pos_inf());
      double x = a.v.raw();
      if (x < 0) throw EvalError("ln of a negative value");
      if (x == 0) return from_extended(ExtendedReal::neg_inf());
      return from_double(std::log(x));
    }
    case Op::sqrt_: {
      Value a = eval_rec(node->a, env);
      if (a.v.is_pos_inf()) return from_extended(ExtendedReal::pos_inf());
      double x = a.v.raw();
      if (x < 0) throw EvalError("sqrt of a negative value");
      return from_double(std::sqrt(x));
    }
    case Op::abs_: {
      Value a = eval_rec(node->a, env);
      Value v;
      v.v = a.v < ExtendedReal(0.0) ? -a.v : a.v;
      if (a.exact) v.exact = *a.exact < Rational(0) ? -*a.exact : *a.exact;
      return v;
    }
    case Op::add:
    case Op::sub: {
      Value a = eval_rec(node->a, env);
      Value b = eval_rec(node->b, env);
      ExtendedReal rb = node->op == Op::add ? b.v : -b.v;
      auto sum = try_add(a.v, rb);
      if (!sum) throw EvalError("inf - inf");
      if (a.exact && b.exact) {
        try {
          Rational r = node->op == Op::add ? *a.exact + *b.exact : *a.exact - *b.exact;
          return from_rational(r);
        } catch (const RationalOverflow&) {
        }
      }
      return from_extended(*sum);
    }
    case Op::mul: {
      Value a = eval_rec(node->a, env);
      Value b = eval_rec(node->b, env);
      if (a.v.raw() == 0.0 || b.v.raw() == 0.0) return from_rational(Rational(0));
      if (a.exact && b.exact) {
        try {
          return from_rational(*a.exact * *b.exact);
        } catch (const RationalOverflow&) {
        }
      }
      return from_extended(ExtendedReal(a.v.raw() * b.v.raw()));
    }
    case Op::div: {
      Value a = eval_rec(node->a, env);
      Value b = eval_rec(node->b, env);
      double x = a.v.raw(), y = b.v.raw();
      if (y == 0.0) {
        if (x == 0.0) return from_rational(Rational(0));
        return from_extended(x > 0 ? ExtendedReal::pos_inf() : ExtendedReal::neg_inf());
      }
      if (!a.v.is_finite() && !b.v.is_finite()) throw EvalError("inf / inf");
      if (a.exact && b.exact) {
        try {
          return from_rational(*a.exact / *b.exact);
        } catch (const RationalOverflow&) {
        }
      }
      return from_extended(ExtendedReal(x / y));
    }
    case Op::pow_: {
      Value a = eval_rec(node->a, env);
      Value b = eval_rec(node->b, env);
      double r = std::pow(a.v.raw(), b.v.raw());
      if (std::isnan(r)) throw EvalError("pow outside the real domain");
      return from_extended(ExtendedReal(r));
    }
    case Op::min_:
    case Op::max_: {
      Value a = eval_rec(node->a, env);
      Value b = eval_rec(node->b, env);
      bool a_less;
      if (a.exact && b.exact) {
        a_less = *a.exact < *b.exact;
      } else {
        a_less = a.v < b.v;
      }
      bool take_a = node->op == Op::min_ ? a_less : !a_less;
      return take_a ? a : b;
    }
    case Op::indicator:
      return eval_condition(*node->cond, env) ? from_rational(Rational(1))
                                              : from_rational(Rational(0));
    case Op::piecewise:
      return eval_condition(*node->cond, env) ? eval_rec(node->a, env) : eval_rec(node->b, env);
    case Op::kn: {
      Value a = eval_rec(node->a, env);
      if (!a.exact || !a.exact->is_integer() || a.exact->num() < 1)
        throw EvalError("kn needs a positive integer");
      if (!env.space) throw EvalError("kn needs the space");
      return from_rational(escape_atom(*env.space, static_cast<int>(a.exact->num())));
    }
  }
  throw EvalError("malformed expression node");
}

bool compare_values(Rel rel, const Value& a, const Value& b) {
  int cmp;
  if (a.exact && b.exact) {
    cmp = *a.exact < *b.exact ? -1 : (*a.exact == *b.exact ? 0 : 1);
  } else {
    cmp = a.v < b.v ? -1 : (a.v == b.v ? 0 : 1);
  }
  switch (rel) {
    case Rel::eq: return cmp == 0;
    case Rel::ne: return cmp != 0;
    case Rel::lt: return cmp < 0;
    case Rel::le: return cmp <= 0;
    case Rel::gt: return cmp > 0;
    case Rel::ge: return cmp >= 0;
  }
  return false;
}

bool eval_condition(const Condition& c, const Env& env) {
  switch (c.kind) {
    case Condition::Kind::compare:
      return compare_values(c.rel, eval_rec(c.a, env), eval_rec(c.b, env));
    case Condition::Kind::in_interval: {
      if (!env.s) throw EvalError("s is unbound");
      Value s;
      s.v = ExtendedReal(env.s->value);
      s.exact = env.s->exact;
      Value lo = eval_rec(c.lo, env);
      Value hi = eval_rec(c.hi, env);
      bool above = compare_values(c.lo_open ? Rel::gt : Rel::ge, s, lo);
      bool below = compare_values(c.hi_open ? Rel::lt : Rel::le, s, hi);
      return above && below;
    }
    case Condition::Kind::in_prefix: {
      if (!env.s) throw EvalError("s is unbound");
      if (!env.space || !env.space->is_countable())
        throw EvalError("prefix membership needs a countable space");
      Value cnt = eval_rec(c.count, env);
      if (!cnt.exact || !cnt.exact->is_integer() || cnt.exact->num() < 0)
        throw EvalError("prefix size must be a nonnegative integer");
      std::int64_t k = cnt.exact->num();
      const Enumeration& en = env.space->enumeration();
      if (k > en.size())
        throw EvalError("prefix membership beyond the materialized enumeration");
      if (!env.s->exact) return false;
      auto idx = en.index_of(*env.s->exact);
      return idx && *idx <= k;
    }
  }
  return false;
}

}  // namespace

bool mentions_var_n(const NodePtr& node) { return mentions(node, Op::var_n); }
bool mentions_var_s(const NodePtr& node) { return mentions(node, Op::var_s); }

Value eval(const NodePtr& node, const Env& env) { return eval_rec(node, env); }

Rational escape_atom(const Space& space, int n) {
  if (n < 1) throw EvalError("kn needs a positive integer");
  const Enumeration& en = space.enumeration();
  std::int64_t k = 0;
  for (int i = 1; i <= n; ++i) {
    ++k;
    for (;;) {
      auto idx = en.index_of(Rational(k, k + 1));
      if (!idx || *idx > i) break;
      ++k;
    }
  }
  return Rational(k, k + 1);
}

}  // namespace fatou::expr
