#include <doctest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <random>

#include "epsolve/expr.hpp"

using namespace epsolve;

namespace {

double eval1(const std::string& src, double x, double t = 0.0) {
  auto e = expr::parse(src, 1);
  double pt[1] = {x};
  return expr::evaluate(e, pt, t);
}

}  // namespace

TEST_CASE("literal examples") {
  CHECK(eval1("exp(-x1^2/2)", 0.0) == doctest::Approx(1.0));
  CHECK(eval1("200*sin(6*3.141592653589793*t)", 0.0, 0.0) == doctest::Approx(0.0));
  CHECK(eval1("(3/cosh(2*x1))^0.25", 0.0) ==
        doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-14));
  CHECK(eval1("x1+t", 2.0, 3.0) == doctest::Approx(5.0));
  CHECK(eval1("abs(x1)", -4.0) == doctest::Approx(4.0));
  CHECK(eval1("erfc(0)", 1.0) == doctest::Approx(1.0));
  CHECK(eval1("sech(0)", 0.0) == doctest::Approx(1.0));
}

TEST_CASE("precedence: power binds tighter than unary minus and is right assoc") {
  CHECK(eval1("-x1^2", 3.0) == doctest::Approx(-9.0));
  CHECK(eval1("2^-2", 0.0) == doctest::Approx(0.25));
  CHECK(eval1("2^3^2", 0.0) == doctest::Approx(512.0));
  CHECK(eval1("2+3*4", 0.0) == doctest::Approx(14.0));
  CHECK(eval1("2*3^2", 0.0) == doctest::Approx(18.0));
  CHECK(eval1("1-2-3", 0.0) == doctest::Approx(-4.0));
  CHECK(eval1("12/3/2", 0.0) == doctest::Approx(2.0));
}

TEST_CASE("whitespace insensitivity") {
  CHECK(eval1("  exp ( - x1 ^ 2 / 2 )  ", 1.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("syntax errors carry positions") {
  CHECK_THROWS_AS(expr::parse("1 + ", 1), expr::ExprError);
  CHECK_THROWS_AS(expr::parse("foo(3)", 1), expr::ExprError);
  CHECK_THROWS_AS(expr::parse("x2", 1), expr::ExprError);  // outside dimension
  CHECK_THROWS_AS(expr::parse("sin()", 1), expr::ExprError);
  CHECK_THROWS_AS(expr::parse("(1+2", 1), expr::ExprError);
  try {
    expr::parse("1 +\n* 2", 1);
    CHECK(false);
  } catch (const expr::ExprError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 1);
  }
}

TEST_CASE("non-finite evaluation names the subexpression") {
  auto e = expr::parse("1/(x1-1)", 1);
  double pt[1] = {1.0};
  CHECK_THROWS_WITH_AS(expr::evaluate(e, pt, 0.0),
                       doctest::Contains("1/(x1-1)"), expr::ExprError);
}

TEST_CASE("erfc builtin matches a quadrature oracle at 50 points") {
  // Oracle: 2/sqrt(pi) int_x^{x+12} e^{-t^2} dt by long-double composite
  // Simpson; the discretization error is ~1e-15 relative on [-3, 3].
  auto erfc_quad = [](double x) -> double {
    if (x < 0.0) {
      // reflection handled by the caller via 2 - erfc(-x)
    }
    const long double a = x, b = x + 12.0L;
    const int n = 1 << 16;
    const long double h = (b - a) / n;
    long double sum = expl(-a * a) + expl(-b * b);
    for (int i = 1; i < n; ++i) {
      const long double t = a + h * i;
      sum += (i % 2 ? 4.0L : 2.0L) * expl(-t * t);
    }
    return static_cast<double>(sum * h / 3.0L * 2.0L / std::sqrt((long double)M_PI));
  };
  auto oracle = [&](double x) { return x < 0.0 ? 2.0 - erfc_quad(-x) : erfc_quad(x); };
  for (int i = 0; i < 50; ++i) {
    const double x = -3.0 + 6.0 * i / 49.0;
    CHECK(eval1("erfc(x1)", x) == doctest::Approx(oracle(x)).epsilon(1e-13));
  }
}

TEST_CASE("pretty-print round trip is a fixed point") {
  std::vector<std::string> sources = {
      "exp(-x1^2/2)",
      "(3/cosh(2*x1))^0.25",
      "1-2-3",
      "-x1^2+4*t",
      "2^-2",
      "sech(x1)*erfc(t)-abs(x1/(1+t))",
  };
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (const auto& src : sources) {
    auto e1 = expr::parse(src, 1);
    const std::string printed = expr::pretty_print(e1);
    auto e2 = expr::parse(printed, 1);
    CHECK(expr::pretty_print(e2) == printed);
    for (int i = 0; i < 10; ++i) {
      double pt[1] = {dist(rng)};
      const double t = dist(rng);
      CHECK(expr::evaluate(e1, pt, t) == doctest::Approx(expr::evaluate(e2, pt, t)));
    }
  }
}

TEST_CASE("evaluation agrees with a direct reference evaluator on random trees") {
  // Random trees over a safe operator set (no '/', '^' to keep totality).
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> leaf(-2.0, 2.0);
  std::uniform_int_distribution<int> pick(0, 5);

  struct Ref {
    virtual ~Ref() = default;
    virtual double eval(double x, double t) const = 0;
    virtual std::string print() const = 0;
  };
  struct Leaf : Ref {
    int kind;  // 0 literal, 1 x1, 2 t
    double v;
    double eval(double x, double t) const override {
      return kind == 0 ? v : (kind == 1 ? x : t);
    }
    std::string print() const override {
      if (kind == 1) return "x1";
      if (kind == 2) return "t";
      char buf[64];
      snprintf(buf, sizeof buf, "%.17g", v);
      return v < 0 ? "(0" + std::string(buf) + ")" : buf;  // negative literal as 0-...
    }
  };
  struct Bin : Ref {
    char op;
    std::unique_ptr<Ref> a, b;
    double eval(double x, double t) const override {
      const double u = a->eval(x, t), v = b->eval(x, t);
      switch (op) {
        case '+': return u + v;
        case '-': return u - v;
        default: return u * v;
      }
    }
    std::string print() const override {
      return "(" + a->print() + op + b->print() + ")";
    }
  };
  struct Fn : Ref {
    int which;
    std::unique_ptr<Ref> a;
    double eval(double x, double t) const override {
      const double u = a->eval(x, t);
      return which == 0 ? std::sin(u) : (which == 1 ? std::cos(u) : std::tanh(u));
    }
    std::string print() const override {
      static const char* names[] = {"sin", "cos", "tanh"};
      return std::string(names[which]) + "(" + a->print() + ")";
    }
  };

  std::function<std::unique_ptr<Ref>(int)> gen = [&](int depth) -> std::unique_ptr<Ref> {
    const int choice = depth <= 0 ? 0 : pick(rng);
    if (choice <= 1) {
      auto l = std::make_unique<Leaf>();
      l->kind = pick(rng) % 3;
      l->v = leaf(rng);
      return l;
    }
    if (choice <= 4) {
      auto b = std::make_unique<Bin>();
      b->op = "+-*"[choice - 2];
      b->a = gen(depth - 1);
      b->b = gen(depth - 1);
      return b;
    }
    auto f = std::make_unique<Fn>();
    f->which = pick(rng) % 3;
    f->a = gen(depth - 1);
    return f;
  };

  for (int trial = 0; trial < 50; ++trial) {
    auto tree = gen(4);
    auto e = expr::parse(tree->print(), 1);
    for (int i = 0; i < 5; ++i) {
      const double x = leaf(rng), t = leaf(rng);
      double pt[1] = {x};
      CHECK(expr::evaluate(e, pt, t) ==
            doctest::Approx(tree->eval(x, t)).epsilon(1e-12));
    }
  }
}
