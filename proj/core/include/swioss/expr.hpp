#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swioss {

// Variables an expression may reference.  State and input variables are
// written x1..xd and v1..vm (1-based); `r` is the scalar argument of gain and
// comparison functions; `t` is time (input expressions only).
enum class VariableKind : std::uint8_t { State, Input, Scalar, Time };

struct Bindings {
  std::span<const double> x;
  std::span<const double> v;
  double r = 0.0;
  double t = 0.0;
};

// Immutable, cheaply copyable arithmetic expression.
//
// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | primary
//   primary := number | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
//   func    := sin | cos | abs | sat | exp | sqrt   (one argument)
//            | min | max                            (two arguments)
class Expression {
 public:
  enum class Op : std::uint8_t {
    Constant, Variable, Neg, Add, Sub, Mul, Div,
    Sin, Cos, Abs, Sat, Exp, Sqrt, Min, Max
  };

  struct Node {
    Op op = Op::Constant;
    VariableKind kind = VariableKind::State;
    std::int32_t lhs = -1;
    std::int32_t rhs = -1;
    double value = 0.0;   // Constant
    int index = 0;        // Variable (1-based for State/Input)
  };

  Expression();  // the constant 0

  double evaluate(const Bindings& b) const;

  // Convenience for scalar functions of `r`.
  double operator()(double r) const { return evaluate(Bindings{{}, {}, r, 0.0}); }

  // Largest 1-based index referenced for `kind` (0 when unused).
  int max_index(VariableKind kind) const;
  bool references(VariableKind kind) const;

  // Fully parenthesised text that parses back to an equivalent expression.
  std::string to_string() const;

  static Expression constant(double value);

 private:
  friend class ExpressionParser;
  Expression(std::shared_ptr<const std::vector<Node>> nodes, std::int32_t root);

  double eval(std::int32_t id, const Bindings& b) const;
  void print(std::int32_t id, std::string& out) const;

  std::shared_ptr<const std::vector<Node>> nodes_;
  std::int32_t root_ = 0;
};

// Throws ParseError on empty or non-ASCII input, syntax errors, unknown
// identifiers and arity mismatches.
Expression parse_expression(std::string_view src);

// sat(u) = min(1, max(-1, u)).
inline double saturate(double u) { return u > 1.0 ? 1.0 : (u < -1.0 ? -1.0 : u); }

// Locale-independent text with 17 significant digits (round-trips exactly).
std::string format_double(double value);

}  // namespace swioss
