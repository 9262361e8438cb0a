#include "algebroid/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <system_error>

namespace algebroid {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += ", ";
    out += expected[i];
  }
  return out;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& detail)
    : Error(ErrorCategory::schema,
            "syntax error at offset " + std::to_string(offset) + ": " + detail +
                (expected.empty() ? std::string() : " (expected " + join_expected(expected) + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

std::string Variable::name() const {
  switch (kind) {
    case Kind::base: return "x" + std::to_string(index + 1);
    case Kind::fiber: return "y" + std::to_string(index + 1);
    case Kind::dissipation: return "z";
  }
  return "?";
}

struct Expr::Node {
  Op op = Op::number;
  double value = 0.0;
  Variable var{};
  Function fn = Function::sin;
  Expr a;
  Expr b;
};

Expr::Expr() : node_(nullptr) {}

Expr Expr::number(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::number;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Variable v) {
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  n->var = v;
  return Expr(std::move(n));
}

Expr Expr::make_unary(Op op, Expr operand) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::make_binary(Op op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::make_call(Function fn, Expr arg) {
  auto n = std::make_shared<Node>();
  n->op = Op::call;
  n->fn = fn;
  n->a = std::move(arg);
  return Expr(std::move(n));
}

// A null node stands for the constant 0 so default-constructed Exprs are cheap.
Op Expr::op() const { return node_ ? node_->op : Op::number; }
double Expr::value() const { return node_ ? node_->value : 0.0; }
Variable Expr::var() const { return node_ ? node_->var : Variable{}; }
Function Expr::function() const { return node_ ? node_->fn : Function::sin; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::number: return a.value() == b.value();
    case Op::variable: return a.var() == b.var();
    case Op::neg: return a.lhs() == b.lhs();
    case Op::call: return a.function() == b.function() && a.lhs() == b.lhs();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " is not finite");
  return v;
}

double apply_function(Function fn, double u) {
  switch (fn) {
    case Function::sin: return std::sin(u);
    case Function::cos: return std::cos(u);
    case Function::exp: return checked(std::exp(u), "exp");
    case Function::ln:
      if (!(u > 0.0)) throw DomainError("ln of non-positive value " + format_number(u));
      return std::log(u);
    case Function::sqrt:
      if (u < 0.0) throw DomainError("sqrt of negative value " + format_number(u));
      return std::sqrt(u);
  }
  return 0.0;
}

double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::add: return checked(a + b, "sum");
    case Op::sub: return checked(a - b, "difference");
    case Op::mul: return checked(a * b, "product");
    case Op::div:
      if (b == 0.0) throw DomainError("division by zero");
      return checked(a / b, "quotient");
    case Op::pow: return checked(std::pow(a, b), "power");
    default: return 0.0;
  }
}

}  // namespace

double eval(const Expr& e, const Env& env) {
  switch (e.op()) {
    case Op::number: return e.value();
    case Op::variable: {
      const Variable v = e.var();
      switch (v.kind) {
        case Variable::Kind::base:
          if (static_cast<std::size_t>(v.index) >= env.x.size()) throw UnboundVariable(v.name());
          return env.x[v.index];
        case Variable::Kind::fiber:
          if (static_cast<std::size_t>(v.index) >= env.y.size()) throw UnboundVariable(v.name());
          return env.y[v.index];
        case Variable::Kind::dissipation:
          if (!env.z) throw UnboundVariable("z");
          return *env.z;
      }
      return 0.0;
    }
    case Op::neg: return -eval(e.lhs(), env);
    case Op::call: return apply_function(e.function(), eval(e.lhs(), env));
    default: return apply_binary(e.op(), eval(e.lhs(), env), eval(e.rhs(), env));
  }
}

// ---------------------------------------------------------------------------
// Folding constructors

namespace {

// Folds a literal operation only when it evaluates cleanly; otherwise the
// node is kept so the domain error surfaces at evaluation time.
std::optional<double> try_binary(Op op, double a, double b) {
  try {
    return apply_binary(op, a, b);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace

Expr neg(const Expr& a) {
  if (a.is_number()) return Expr::number(a.value() == 0.0 ? 0.0 : -a.value());
  if (a.op() == Op::neg) return a.lhs();
  return Expr::make_unary(Op::neg, a);
}

Expr add(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) {
    if (auto v = try_binary(Op::add, a.value(), b.value())) return Expr::number(*v);
  }
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return Expr::make_binary(Op::add, a, b);
}

Expr sub(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) {
    if (auto v = try_binary(Op::sub, a.value(), b.value())) return Expr::number(*v);
  }
  if (b.is_zero()) return a;
  if (a.is_zero()) return neg(b);
  return Expr::make_binary(Op::sub, a, b);
}

Expr mul(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) {
    if (auto v = try_binary(Op::mul, a.value(), b.value())) return Expr::number(*v);
  }
  if (a.is_zero() || b.is_zero()) return Expr::number(0.0);
  if (a.is_number(1.0)) return b;
  if (b.is_number(1.0)) return a;
  if (a.is_number(-1.0)) return neg(b);
  if (b.is_number(-1.0)) return neg(a);
  return Expr::make_binary(Op::mul, a, b);
}

Expr div(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) {
    if (auto v = try_binary(Op::div, a.value(), b.value())) return Expr::number(*v);
  }
  if (b.is_number(1.0)) return a;
  if (a.is_zero() && b.is_number() && b.value() != 0.0) return Expr::number(0.0);
  return Expr::make_binary(Op::div, a, b);
}

Expr pow(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) {
    if (auto v = try_binary(Op::pow, a.value(), b.value())) return Expr::number(*v);
  }
  if (b.is_zero()) return Expr::number(1.0);
  if (b.is_number(1.0)) return a;
  return Expr::make_binary(Op::pow, a, b);
}

Expr call(Function fn, const Expr& a) {
  if (a.is_number()) {
    try {
      return Expr::number(apply_function(fn, a.value()));
    } catch (const DomainError&) {
    }
  }
  return Expr::make_call(fn, a);
}

Expr fold(const Expr& e) {
  switch (e.op()) {
    case Op::number:
    case Op::variable: return e;
    case Op::neg: return neg(fold(e.lhs()));
    case Op::call: return call(e.function(), fold(e.lhs()));
    case Op::add: return add(fold(e.lhs()), fold(e.rhs()));
    case Op::sub: return sub(fold(e.lhs()), fold(e.rhs()));
    case Op::mul: return mul(fold(e.lhs()), fold(e.rhs()));
    case Op::div: return div(fold(e.lhs()), fold(e.rhs()));
    case Op::pow: return pow(fold(e.lhs()), fold(e.rhs()));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation

bool depends_on(const Expr& e, Variable v) {
  switch (e.op()) {
    case Op::number: return false;
    case Op::variable: return e.var() == v;
    case Op::neg:
    case Op::call: return depends_on(e.lhs(), v);
    default: return depends_on(e.lhs(), v) || depends_on(e.rhs(), v);
  }
}

Expr diff(const Expr& e, Variable v) {
  if (!depends_on(e, v)) return Expr::number(0.0);
  switch (e.op()) {
    case Op::number: return Expr::number(0.0);
    case Op::variable: return Expr::number(e.var() == v ? 1.0 : 0.0);
    case Op::neg: return neg(diff(e.lhs(), v));
    case Op::add: return add(diff(e.lhs(), v), diff(e.rhs(), v));
    case Op::sub: return sub(diff(e.lhs(), v), diff(e.rhs(), v));
    case Op::mul: {
      const Expr& a = e.lhs();
      const Expr& b = e.rhs();
      return add(mul(diff(a, v), b), mul(a, diff(b, v)));
    }
    case Op::div: {
      const Expr& a = e.lhs();
      const Expr& b = e.rhs();
      Expr da = diff(a, v);
      Expr db = diff(b, v);
      if (db.is_zero()) return div(da, b);
      return div(sub(mul(da, b), mul(a, db)), pow(b, Expr::number(2.0)));
    }
    case Op::pow: {
      const Expr& base = e.lhs();
      const Expr& exponent = e.rhs();
      Expr dbase = diff(base, v);
      if (!depends_on(exponent, v)) {
        return mul(mul(exponent, pow(base, sub(exponent, Expr::number(1.0)))), dbase);
      }
      // d(u^w) = u^w (w' ln u + w u'/u)
      Expr dexp = diff(exponent, v);
      return mul(e, add(mul(dexp, call(Function::ln, base)), div(mul(exponent, dbase), base)));
    }
    case Op::call: {
      const Expr& u = e.lhs();
      Expr du = diff(u, v);
      switch (e.function()) {
        case Function::sin: return mul(call(Function::cos, u), du);
        case Function::cos: return mul(neg(call(Function::sin, u)), du);
        case Function::exp: return mul(e, du);
        case Function::ln: return div(du, u);
        case Function::sqrt: return div(du, mul(Expr::number(2.0), e));
      }
    }
  }
  return Expr::number(0.0);
}

VariableUsage usage(const Expr& e) {
  VariableUsage u;
  auto merge = [&u](const VariableUsage& o) {
    u.base_count = std::max(u.base_count, o.base_count);
    u.fiber_count = std::max(u.fiber_count, o.fiber_count);
    u.dissipation = u.dissipation || o.dissipation;
  };
  switch (e.op()) {
    case Op::number: break;
    case Op::variable: {
      const Variable v = e.var();
      if (v.kind == Variable::Kind::base) u.base_count = v.index + 1;
      if (v.kind == Variable::Kind::fiber) u.fiber_count = v.index + 1;
      if (v.kind == Variable::Kind::dissipation) u.dissipation = true;
      break;
    }
    case Op::neg:
    case Op::call: merge(usage(e.lhs())); break;
    default:
      merge(usage(e.lhs()));
      merge(usage(e.rhs()));
  }
  return u;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

const char* function_name(Function fn) {
  switch (fn) {
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::exp: return "exp";
    case Function::ln: return "ln";
    case Function::sqrt: return "sqrt";
  }
  return "?";
}

std::optional<Function> lookup_function(std::string_view name) {
  if (name == "sin") return Function::sin;
  if (name == "cos") return Function::cos;
  if (name == "exp") return Function::exp;
  if (name == "ln") return Function::ln;
  if (name == "sqrt") return Function::sqrt;
  return std::nullopt;
}

const std::vector<std::string> kOperandStart{"number", "variable", "function", "'('", "'-'"};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, kOperandStart, "empty expression");
    Expr e = parse_sum();
    skip_space();
    if (pos_ < text_.size()) {
      throw SyntaxError(pos_, {"operator", "end of input"},
                        std::string("unexpected '") + text_[pos_] + "'");
    }
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::make_binary(Op::add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = Expr::make_binary(Op::sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::make_binary(Op::mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = Expr::make_binary(Op::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) {
      // A minus directly on a literal that is not a power base is read as a
      // negative literal, matching how to_string renders negative numbers.
      skip_space();
      const std::size_t save = pos_;
      if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                  text_[pos_] == '.')) {
        const double v = lex_number();
        if (peek() != '^') return Expr::number(v == 0.0 ? -0.0 : -v);
        pos_ = save;
      }
      return Expr::make_unary(Op::neg, parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return Expr::make_binary(Op::pow, base, parse_unary());
    return base;
  }

  double lex_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw SyntaxError(start, {"digit"}, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw SyntaxError(pos_, {"digit"}, "malformed exponent");
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      throw SyntaxError(start, {"number"}, "number out of range");
    }
    return v;
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError(pos_, kOperandStart, "unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::number(lex_number());
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!accept(')')) throw SyntaxError(pos_, {"')'"}, "unbalanced parenthesis");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (auto fn = lookup_function(word)) {
        if (!accept('(')) throw SyntaxError(pos_, {"'('"}, "function name without argument");
        Expr arg = parse_sum();
        if (!accept(')')) throw SyntaxError(pos_, {"')'"}, "unclosed function call");
        return Expr::make_call(*fn, arg);
      }
      if (auto v = variable_from(word)) return Expr::variable(*v);
      throw SyntaxError(start, {"variable", "function"},
                        "unknown identifier '" + std::string(word) + "'");
    }
    throw SyntaxError(pos_, kOperandStart, std::string("unexpected '") + c + "'");
  }

  static std::optional<Variable> variable_from(std::string_view word) {
    if (word == "z") return Variable::z();
    if (word.size() < 2 || (word[0] != 'x' && word[0] != 'y')) return std::nullopt;
    if (word[1] == '0') return std::nullopt;
    int index = 0;
    const auto [ptr, ec] = std::from_chars(word.data() + 1, word.data() + word.size(), index);
    if (ec != std::errc() || ptr != word.data() + word.size() || index < 1) return std::nullopt;
    return word[0] == 'x' ? Variable::x(index - 1) : Variable::y(index - 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Binding strength used by the printer; must mirror the grammar.
int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    case Op::number: return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 5;
    default: return 5;
  }
}

void print(std::ostringstream& out, const Expr& e, int min_prec) {
  const bool paren = precedence(e) < min_prec;
  if (paren) out << '(';
  switch (e.op()) {
    case Op::number: out << format_number(e.value()); break;
    case Op::variable: out << e.var().name(); break;
    case Op::neg:
      out << '-';
      // Keeps "-(3)" distinct from the literal -3.
      print(out, e.lhs(), e.lhs().is_number() ? 6 : 3);
      break;
    case Op::call:
      out << function_name(e.function()) << '(';
      print(out, e.lhs(), 0);
      out << ')';
      break;
    case Op::add:
    case Op::sub:
      print(out, e.lhs(), 1);
      out << (e.op() == Op::add ? " + " : " - ");
      print(out, e.rhs(), 2);
      break;
    case Op::mul:
    case Op::div:
      print(out, e.lhs(), 2);
      out << (e.op() == Op::mul ? "*" : "/");
      print(out, e.rhs(), 3);
      break;
    case Op::pow:
      print(out, e.lhs(), 5);
      out << '^';
      print(out, e.rhs(), 3);
      break;
  }
  if (paren) out << ')';
}

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

std::string to_string(const Expr& e) {
  std::ostringstream out;
  print(out, e, 0);
  return out.str();
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace algebroid
