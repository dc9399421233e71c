#include "epsolve/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace epsolve::expr {

namespace {

const std::map<std::string, Func> kFuncs = {
    {"exp", Func::Exp},   {"sin", Func::Sin},  {"cos", Func::Cos},
    {"cosh", Func::Cosh}, {"tanh", Func::Tanh}, {"sqrt", Func::Sqrt},
    {"abs", Func::Abs},   {"erfc", Func::Erfc}, {"sech", Func::Sech}};

const char* func_name(Func f) {
  for (const auto& [name, id] : kFuncs) {
    if (id == f) return name.c_str();
  }
  return "?";
}

struct Cursor {
  const std::string& src;
  std::size_t i = 0;

  void skip_ws() {
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
  }
  bool eof() {
    skip_ws();
    return i >= src.size();
  }
  char peek() {
    skip_ws();
    return i < src.size() ? src[i] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++i;
      return true;
    }
    return false;
  }
};

std::pair<int, int> line_col(const std::string& src, int pos) {
  int line = 1, col = 1;
  for (int k = 0; k < pos && k < static_cast<int>(src.size()); ++k) {
    if (src[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void fail(const std::string& src, int pos, const std::string& msg) {
  auto [line, col] = line_col(src, pos);
  throw ExprError(msg, line, col);
}

class Parser {
 public:
  Parser(const std::string& src, int dim) : cur_{src}, dim_(dim) {}

  NodePtr parse_all() {
    NodePtr e = parse_sum();
    if (!cur_.eof()) fail(cur_.src, static_cast<int>(cur_.i), "unexpected trailing input");
    return e;
  }

 private:
  NodePtr make(Node n) { return std::make_shared<Node>(std::move(n)); }

  NodePtr parse_sum() {
    NodePtr lhs = parse_term();
    for (;;) {
      int pos = static_cast<int>(cur_.i);
      if (cur_.accept('+')) {
        lhs = make({Node::Kind::Add, 0, 0, Func::Exp, lhs, parse_term(), pos});
      } else if (cur_.accept('-')) {
        lhs = make({Node::Kind::Sub, 0, 0, Func::Exp, lhs, parse_term(), pos});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      int pos = static_cast<int>(cur_.i);
      if (cur_.accept('*')) {
        lhs = make({Node::Kind::Mul, 0, 0, Func::Exp, lhs, parse_unary(), pos});
      } else if (cur_.accept('/')) {
        lhs = make({Node::Kind::Div, 0, 0, Func::Exp, lhs, parse_unary(), pos});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    int pos = static_cast<int>(cur_.i);
    if (cur_.accept('-')) {
      return make({Node::Kind::Neg, 0, 0, Func::Exp, parse_unary(), nullptr, pos});
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    int pos = static_cast<int>(cur_.i);
    if (cur_.accept('^')) {
      // Right-associative; exponent may carry a unary minus.
      return make({Node::Kind::Pow, 0, 0, Func::Exp, base, parse_unary(), pos});
    }
    return base;
  }

  NodePtr parse_atom() {
    cur_.skip_ws();
    int pos = static_cast<int>(cur_.i);
    if (cur_.i >= cur_.src.size()) fail(cur_.src, pos, "unexpected end of input");
    char c = cur_.src[cur_.i];

    if (c == '(') {
      ++cur_.i;
      NodePtr e = parse_sum();
      if (!cur_.accept(')')) fail(cur_.src, static_cast<int>(cur_.i), "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      double v = std::strtod(cur_.src.c_str() + cur_.i, &end);
      if (end == cur_.src.c_str() + cur_.i) fail(cur_.src, pos, "malformed number");
      cur_.i = static_cast<std::size_t>(end - cur_.src.c_str());
      return make({Node::Kind::Literal, v, 0, Func::Exp, nullptr, nullptr, pos});
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = cur_.i;
      while (j < cur_.src.size() &&
             (std::isalnum(static_cast<unsigned char>(cur_.src[j])) || cur_.src[j] == '_')) {
        ++j;
      }
      std::string name = cur_.src.substr(cur_.i, j - cur_.i);
      cur_.i = j;

      if (auto it = kFuncs.find(name); it != kFuncs.end()) {
        if (!cur_.accept('(')) fail(cur_.src, pos, "function '" + name + "' expects '('");
        NodePtr arg = parse_sum();
        if (cur_.peek() == ',') fail(cur_.src, static_cast<int>(cur_.i),
                                     "function '" + name + "' takes one argument");
        if (!cur_.accept(')')) fail(cur_.src, static_cast<int>(cur_.i), "expected ')'");
        return make({Node::Kind::Call, 0, 0, it->second, arg, nullptr, pos});
      }
      if (name == "t") {
        return make({Node::Kind::Time, 0, 0, Func::Exp, nullptr, nullptr, pos});
      }
      if (name.size() >= 2 && name[0] == 'x') {
        bool digits = true;
        for (std::size_t k = 1; k < name.size(); ++k) {
          digits = digits && std::isdigit(static_cast<unsigned char>(name[k]));
        }
        if (digits) {
          int axis = std::atoi(name.c_str() + 1);
          if (axis < 1 || axis > dim_) {
            fail(cur_.src, pos,
                 "variable '" + name + "' outside declared dimension " + std::to_string(dim_));
          }
          return make({Node::Kind::Var, 0, axis - 1, Func::Exp, nullptr, nullptr, pos});
        }
      }
      fail(cur_.src, pos, "unknown identifier '" + name + "'");
    }
    fail(cur_.src, pos, std::string("unexpected character '") + c + "'");
  }

  Cursor cur_;
  int dim_;
};

double apply_func(Func f, double x) {
  switch (f) {
    case Func::Exp: return std::exp(x);
    case Func::Sin: return std::sin(x);
    case Func::Cos: return std::cos(x);
    case Func::Cosh: return std::cosh(x);
    case Func::Tanh: return std::tanh(x);
    case Func::Sqrt: return std::sqrt(x);
    case Func::Abs: return std::abs(x);
    case Func::Erfc: return std::erfc(x);
    case Func::Sech: return 1.0 / std::cosh(x);
  }
  return 0.0;
}

struct EvalCtx {
  std::span<const double> point;
  double t;
  const std::string& src;
};

double eval_node(const Node& n, const EvalCtx& ctx) {
  double v = 0.0;
  switch (n.kind) {
    case Node::Kind::Literal: v = n.literal; break;
    case Node::Kind::Var: v = ctx.point[static_cast<std::size_t>(n.var)]; break;
    case Node::Kind::Time: v = ctx.t; break;
    case Node::Kind::Add: v = eval_node(*n.lhs, ctx) + eval_node(*n.rhs, ctx); break;
    case Node::Kind::Sub: v = eval_node(*n.lhs, ctx) - eval_node(*n.rhs, ctx); break;
    case Node::Kind::Mul: v = eval_node(*n.lhs, ctx) * eval_node(*n.rhs, ctx); break;
    case Node::Kind::Div: v = eval_node(*n.lhs, ctx) / eval_node(*n.rhs, ctx); break;
    case Node::Kind::Pow: v = std::pow(eval_node(*n.lhs, ctx), eval_node(*n.rhs, ctx)); break;
    case Node::Kind::Neg: v = -eval_node(*n.lhs, ctx); break;
    case Node::Kind::Call: v = apply_func(n.func, eval_node(*n.lhs, ctx)); break;
  }
  return v;
}

int precedence(Node::Kind k) {
  switch (k) {
    case Node::Kind::Add:
    case Node::Kind::Sub: return 1;
    case Node::Kind::Mul:
    case Node::Kind::Div: return 2;
    case Node::Kind::Neg: return 3;
    case Node::Kind::Pow: return 4;
    default: return 5;
  }
}

void print_node(const Node& n, std::ostream& os, int parent_prec) {
  const int prec = precedence(n.kind);
  const bool paren = prec < parent_prec;
  if (paren) os << '(';
  switch (n.kind) {
    case Node::Kind::Literal: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << n.literal;
      os << tmp.str();
      break;
    }
    case Node::Kind::Var: os << 'x' << (n.var + 1); break;
    case Node::Kind::Time: os << 't'; break;
    case Node::Kind::Add:
      print_node(*n.lhs, os, prec);
      os << '+';
      print_node(*n.rhs, os, prec + 1);
      break;
    case Node::Kind::Sub:
      print_node(*n.lhs, os, prec);
      os << '-';
      print_node(*n.rhs, os, prec + 1);
      break;
    case Node::Kind::Mul:
      print_node(*n.lhs, os, prec);
      os << '*';
      print_node(*n.rhs, os, prec + 1);
      break;
    case Node::Kind::Div:
      print_node(*n.lhs, os, prec);
      os << '/';
      print_node(*n.rhs, os, prec + 1);
      break;
    case Node::Kind::Neg:
      os << '-';
      print_node(*n.lhs, os, prec);
      break;
    case Node::Kind::Pow:
      print_node(*n.lhs, os, prec + 1);
      os << '^';
      print_node(*n.rhs, os, prec);
      break;
    case Node::Kind::Call:
      os << func_name(n.func) << '(';
      print_node(*n.lhs, os, 0);
      os << ')';
      break;
  }
  if (paren) os << ')';
}

/// Finds the innermost node producing a non-finite value, for diagnostics.
const Node* find_nonfinite(const Node& n, const EvalCtx& ctx) {
  if (n.lhs) {
    if (!std::isfinite(eval_node(*n.lhs, ctx))) return find_nonfinite(*n.lhs, ctx);
  }
  if (n.rhs) {
    if (!std::isfinite(eval_node(*n.rhs, ctx))) return find_nonfinite(*n.rhs, ctx);
  }
  return &n;
}

}  // namespace

Expr parse(const std::string& source, int dimension) {
  Parser p(source, dimension);
  return Expr(p.parse_all(), dimension, source);
}

double evaluate(const Expr& e, std::span<const double> point, double t) {
  if (e.empty()) return 0.0;
  if (static_cast<int>(point.size()) < e.dimension()) {
    throw std::invalid_argument("evaluate: point has fewer coordinates than dimension");
  }
  EvalCtx ctx{point, t, e.source()};
  double v = eval_node(*e.root(), ctx);
  if (!std::isfinite(v)) {
    const Node* bad = find_nonfinite(*e.root(), ctx);
    std::ostringstream sub;
    print_node(*bad, sub, 0);
    auto [line, col] = line_col(e.source(), bad->pos);
    throw ExprError("non-finite value in subexpression '" + sub.str() + "'", line, col);
  }
  return v;
}

std::string pretty_print(const Expr& e) {
  if (e.empty()) return "0";
  std::ostringstream os;
  print_node(*e.root(), os, 0);
  return os.str();
}

}  // namespace epsolve::expr
