#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace lbdie::expr {

// Scalar expressions over the variables x1, x2, x3 and r = |x|, with the
// unary functions sin cos exp sqrt log and the operators + - * / ^.
// Trees are immutable; derivative() returns a new simplified tree.

enum class Kind { Constant, Variable, Unary, Binary };
enum class Var { X1, X2, X3, R };
enum class Fn { Sin, Cos, Exp, Sqrt, Log, Neg };
enum class Op { Add, Sub, Mul, Div, Pow };

struct Node;
using Ast = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  double value = 0.0;  // Constant
  Var var = Var::X1;   // Variable
  Fn fn = Fn::Sin;     // Unary
  Op op = Op::Add;     // Binary
  Ast a, b;
  std::size_t pos = 0;  // byte offset of the originating token
};

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " (byte offset " + std::to_string(off) + ")"), offset(off) {}
};

struct DomainError : std::runtime_error {
  std::size_t offset;
  DomainError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " (byte offset " + std::to_string(off) + ")"), offset(off) {}
};

// Throws ParseError on malformed input.
Ast parse(const std::string& text);

// Evaluation with x bound (r derived). Throws DomainError on faults.
double evaluate(const Ast& e, double x1, double x2, double x3);

// Evaluation with only r bound; using x1..x3 throws DomainError. For radial
// profiles written in terms of r.
double evaluate_radial(const Ast& e, double r);

// Partial derivative. For spatial vars the chain rule d r / d xk = xk / r is
// applied to r-nodes; derivative w.r.t. R treats r as the independent variable.
Ast derivative(const Ast& e, Var v);

// Precedence-aware rendering; parse(to_string(e)) reproduces an equal tree.
std::string to_string(const Ast& e);

// Structural equality (shape, constants, variables).
bool equal(const Ast& a, const Ast& b);

Ast constant(double v);

}  // namespace lbdie::expr
