#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace epsolve::expr {

/// Error with 1-based line/column of the offending token or subexpression.
struct ExprError : std::runtime_error {
  ExprError(std::string msg, int line, int column)
      : std::runtime_error(std::move(msg) + " at " + std::to_string(line) + ":" +
                           std::to_string(column)),
        line(line),
        column(column) {}
  int line;
  int column;
};

enum class Func { Exp, Sin, Cos, Cosh, Tanh, Sqrt, Abs, Erfc, Sech };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Literal, Var, Time, Add, Sub, Mul, Div, Pow, Neg, Call };
  Kind kind;
  double literal = 0.0;
  int var = 0;  // 0-based axis for Kind::Var
  Func func = Func::Exp;
  NodePtr lhs, rhs;
  int pos = 0;  // byte offset in source, for diagnostics
};

class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, int dimension, std::string source)
      : root_(std::move(root)), dim_(dimension), source_(std::move(source)) {}

  bool empty() const { return root_ == nullptr; }
  int dimension() const { return dim_; }
  const NodePtr& root() const { return root_; }
  const std::string& source() const { return source_; }

 private:
  NodePtr root_;
  int dim_ = 0;
  std::string source_;
};

/// Parses with precedence ^ (right assoc) > unary minus > *,/ > +,-.
/// Variables x1..xd and t; whitespace-insensitive.
Expr parse(const std::string& source, int dimension);

/// Deterministic IEEE evaluation.  Non-finite results raise ExprError naming
/// the innermost offending subexpression.
double evaluate(const Expr& e, std::span<const double> point, double t);

std::string pretty_print(const Expr& e);

}  // namespace epsolve::expr
