#pragma once

// Scalar expressions over base coordinates x1..xn, fiber coordinates y1..yk
// and the dissipation coordinate z. Used for anchor entries, structure
// coefficients, Hamiltonians and Lagrangians.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algebroid/error.hpp"

namespace algebroid {

/// A coordinate name. `index` is zero-based; x1 has index 0.
struct Variable {
  enum class Kind : unsigned char { base, fiber, dissipation };

  Kind kind = Kind::base;
  int index = 0;

  static Variable x(int i) { return {Kind::base, i}; }
  static Variable y(int i) { return {Kind::fiber, i}; }
  static Variable z() { return {Kind::dissipation, 0}; }

  std::string name() const;
  friend bool operator==(const Variable&, const Variable&) = default;
};

enum class Op : unsigned char { number, variable, neg, add, sub, mul, div, pow, call };
enum class Function : unsigned char { sin, cos, exp, ln, sqrt };

/// Immutable expression tree with shared subtrees; copies are cheap.
class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr number(double value);
  static Expr variable(Variable v);

  // Raw node constructors, no folding. The parser builds trees with these.
  static Expr make_unary(Op op, Expr operand);
  static Expr make_binary(Op op, Expr lhs, Expr rhs);
  static Expr make_call(Function fn, Expr arg);

  Op op() const;
  double value() const;        // number nodes
  Variable var() const;        // variable nodes
  Function function() const;   // call nodes
  const Expr& lhs() const;     // binary nodes, also the operand of neg/call
  const Expr& rhs() const;     // binary nodes

  bool is_number() const { return op() == Op::number; }
  bool is_number(double v) const { return is_number() && value() == v; }
  bool is_zero() const { return is_number(0.0); }

  /// Structural (tree) equality.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Folding constructors: literal subtrees are collapsed and additive or
// multiplicative identities dropped. Results never contain Neg(number).
Expr neg(const Expr& a);
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr pow(const Expr& a, const Expr& b);
Expr call(Function fn, const Expr& a);

/// Re-applies the folding constructors bottom-up.
Expr fold(const Expr& e);

/// Parses the textual grammar. Throws SyntaxError with a byte offset.
Expr parse(std::string_view text);

/// Minimal-parenthesis rendering; parse(to_string(e)) reproduces e.
std::string to_string(const Expr& e);

/// Shortest decimal text that round-trips the double.
std::string format_number(double v);

struct Env {
  std::span<const double> x;
  std::span<const double> y;
  std::optional<double> z;
};

/// Throws UnboundVariable or DomainError; never returns NaN or infinity.
double eval(const Expr& e, const Env& env);

/// Exact symbolic partial derivative with constant folding.
Expr diff(const Expr& e, Variable v);

bool depends_on(const Expr& e, Variable v);

/// Which coordinate slots an expression touches.
struct VariableUsage {
  int base_count = 0;   // 1 + largest x index seen, 0 if none
  int fiber_count = 0;  // 1 + largest y index seen, 0 if none
  bool dissipation = false;

  bool uses_base() const { return base_count > 0; }
  bool uses_fiber() const { return fiber_count > 0; }
};

VariableUsage usage(const Expr& e);

}  // namespace algebroid
