#include "swioss/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <system_error>

#include "swioss/error.hpp"

namespace swioss {

namespace {

using Op = Expression::Op;

struct FunctionInfo {
  std::string_view name;
  Op op;
  int arity;
};

constexpr std::array<FunctionInfo, 8> kFunctions{{
    {"sin", Op::Sin, 1},
    {"cos", Op::Cos, 1},
    {"abs", Op::Abs, 1},
    {"sat", Op::Sat, 1},
    {"exp", Op::Exp, 1},
    {"sqrt", Op::Sqrt, 1},
    {"min", Op::Min, 2},
    {"max", Op::Max, 2},
}};

const FunctionInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view src) : src_(src) {}

  Expression parse() {
    if (src_.empty()) throw ParseError("empty expression", 0);
    for (std::size_t i = 0; i < src_.size(); ++i) {
      if (static_cast<unsigned char>(src_[i]) > 0x7f) {
        throw ParseError("non-ASCII character in expression", i);
      }
    }
    skip_ws();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    std::int32_t root = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) {
      throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    }
    return Expression(std::make_shared<const std::vector<Expression::Node>>(std::move(nodes_)),
                      root);
  }

 private:
  std::int32_t add(Expression::Node n) {
    nodes_.push_back(n);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t binary(Op op, std::int32_t a, std::int32_t b) {
    Expression::Node n;
    n.op = op;
    n.lhs = a;
    n.rhs = b;
    return add(n);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) {
        throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
      }
      throw ParseError(std::string("expected '") + c + "' but found '" + src_[pos_] + "'", pos_);
    }
  }

  std::int32_t parse_expr() {
    std::int32_t lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Op::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(Op::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_term() {
    std::int32_t lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Op::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_unary() {
    if (accept('-')) {
      Expression::Node n;
      n.op = Op::Neg;
      n.lhs = parse_unary();
      return add(n);
    }
    if (accept('+')) return parse_unary();
    return parse_primary();
  }

  std::int32_t parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && is_digit(src_[pos_])) {
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc{} || ptr != src_.data() + pos_) {
      throw ParseError("malformed number '" + std::string(src_.substr(start, pos_ - start)) + "'",
                       start);
    }
    Expression::Node n;
    n.op = Op::Constant;
    n.value = value;
    return add(n);
  }

  std::int32_t parse_variable(std::string_view name, std::size_t at) {
    Expression::Node n;
    n.op = Op::Variable;
    if (name == "r") {
      n.kind = VariableKind::Scalar;
      return add(n);
    }
    if (name == "t") {
      n.kind = VariableKind::Time;
      return add(n);
    }
    if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'v') &&
        std::all_of(name.begin() + 1, name.end(), is_digit) && name[1] != '0') {
      int index = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (ec == std::errc{} && ptr == name.data() + name.size()) {
        n.kind = name[0] == 'x' ? VariableKind::State : VariableKind::Input;
        n.index = index;
        return add(n);
      }
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", at);
  }

  std::int32_t parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (is_digit(c) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      std::int32_t inner = parse_expr();
      expect(')');
      return inner;
    }
    if (!is_ident_start(c)) throw ParseError(std::string("unexpected '") + c + "'", pos_);

    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);

    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      const FunctionInfo* fn = find_function(name);
      if (fn == nullptr) throw ParseError("unknown function '" + std::string(name) + "'", start);
      ++pos_;
      std::vector<std::int32_t> args;
      args.push_back(parse_expr());
      while (accept(',')) args.push_back(parse_expr());
      expect(')');
      if (static_cast<int>(args.size()) != fn->arity) {
        throw ParseError("function '" + std::string(name) + "' expects " +
                             std::to_string(fn->arity) + " argument(s), got " +
                             std::to_string(args.size()),
                         start);
      }
      Expression::Node n;
      n.op = fn->op;
      n.lhs = args[0];
      if (fn->arity == 2) n.rhs = args[1];
      return add(n);
    }
    if (find_function(name) != nullptr) {
      throw ParseError("function '" + std::string(name) + "' used without arguments", start);
    }
    return parse_variable(name, start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Expression::Node> nodes_;
};

Expression::Expression() : Expression(Expression::constant(0.0)) {}

Expression::Expression(std::shared_ptr<const std::vector<Node>> nodes, std::int32_t root)
    : nodes_(std::move(nodes)), root_(root) {}

Expression Expression::constant(double value) {
  Node n;
  n.op = Op::Constant;
  n.value = value;
  return Expression(std::make_shared<const std::vector<Node>>(1, n), 0);
}

double Expression::evaluate(const Bindings& b) const { return eval(root_, b); }

double Expression::eval(std::int32_t id, const Bindings& b) const {
  const Node& n = (*nodes_)[static_cast<std::size_t>(id)];
  switch (n.op) {
    case Op::Constant: return n.value;
    case Op::Variable:
      switch (n.kind) {
        case VariableKind::State:
          if (static_cast<std::size_t>(n.index) > b.x.size()) {
            throw DomainError("x" + std::to_string(n.index) + " is not bound");
          }
          return b.x[static_cast<std::size_t>(n.index - 1)];
        case VariableKind::Input:
          if (static_cast<std::size_t>(n.index) > b.v.size()) {
            throw DomainError("v" + std::to_string(n.index) + " is not bound");
          }
          return b.v[static_cast<std::size_t>(n.index - 1)];
        case VariableKind::Scalar: return b.r;
        case VariableKind::Time: return b.t;
      }
      return 0.0;
    case Op::Neg: return -eval(n.lhs, b);
    case Op::Add: return eval(n.lhs, b) + eval(n.rhs, b);
    case Op::Sub: return eval(n.lhs, b) - eval(n.rhs, b);
    case Op::Mul: return eval(n.lhs, b) * eval(n.rhs, b);
    case Op::Div: return eval(n.lhs, b) / eval(n.rhs, b);
    case Op::Sin: return std::sin(eval(n.lhs, b));
    case Op::Cos: return std::cos(eval(n.lhs, b));
    case Op::Abs: return std::abs(eval(n.lhs, b));
    case Op::Sat: return saturate(eval(n.lhs, b));
    case Op::Exp: return std::exp(eval(n.lhs, b));
    case Op::Sqrt: return std::sqrt(eval(n.lhs, b));
    case Op::Min: return std::min(eval(n.lhs, b), eval(n.rhs, b));
    case Op::Max: return std::max(eval(n.lhs, b), eval(n.rhs, b));
  }
  return 0.0;
}

int Expression::max_index(VariableKind kind) const {
  int result = 0;
  for (const Node& n : *nodes_) {
    if (n.op == Op::Variable && n.kind == kind) result = std::max(result, n.index);
  }
  return result;
}

bool Expression::references(VariableKind kind) const {
  return std::any_of(nodes_->begin(), nodes_->end(), [kind](const Node& n) {
    return n.op == Op::Variable && n.kind == kind;
  });
}

std::string Expression::to_string() const {
  std::string out;
  print(root_, out);
  return out;
}

void Expression::print(std::int32_t id, std::string& out) const {
  const Node& n = (*nodes_)[static_cast<std::size_t>(id)];
  auto infix = [&](const char* sym) {
    out += '(';
    print(n.lhs, out);
    out += sym;
    print(n.rhs, out);
    out += ')';
  };
  auto call = [&](std::string_view name) {
    out += name;
    out += '(';
    print(n.lhs, out);
    if (n.rhs >= 0) {
      out += ", ";
      print(n.rhs, out);
    }
    out += ')';
  };
  switch (n.op) {
    case Op::Constant: {
      // Negative literals are printed as a negation so they re-parse.
      if (std::signbit(n.value)) {
        out += "(-" + format_double(-n.value) + ")";
      } else {
        out += format_double(n.value);
      }
      return;
    }
    case Op::Variable:
      switch (n.kind) {
        case VariableKind::State: out += "x" + std::to_string(n.index); return;
        case VariableKind::Input: out += "v" + std::to_string(n.index); return;
        case VariableKind::Scalar: out += "r"; return;
        case VariableKind::Time: out += "t"; return;
      }
      return;
    case Op::Neg:
      out += "(-";
      print(n.lhs, out);
      out += ')';
      return;
    case Op::Add: infix(" + "); return;
    case Op::Sub: infix(" - "); return;
    case Op::Mul: infix(" * "); return;
    case Op::Div: infix(" / "); return;
    case Op::Sin: call("sin"); return;
    case Op::Cos: call("cos"); return;
    case Op::Abs: call("abs"); return;
    case Op::Sat: call("sat"); return;
    case Op::Exp: call("exp"); return;
    case Op::Sqrt: call("sqrt"); return;
    case Op::Min: call("min"); return;
    case Op::Max: call("max"); return;
  }
}

Expression parse_expression(std::string_view src) { return ExpressionParser(src).parse(); }

}  // namespace swioss
