#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <string>

#include "geoconvex/error.hpp"
#include "geoconvex/expr.hpp"
#include "geoconvex/functions.hpp"
#include "geoconvex/rng.hpp"
#include "geoconvex/search.hpp"

namespace geoconvex {
namespace {

const std::vector<std::string> kX{"x1", "x2"};
const std::vector<std::string> kAB{"a", "b"};

double eval(const std::string& src, std::vector<double> xs,
            const std::vector<std::string>& vars = kX) {
  return Expr::parse(src, vars).eval(xs);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::ConfigError;
}

TEST(Parse, DocumentedExamples) {
  EXPECT_DOUBLE_EQ(eval("x1^2 + exp(x2)", {1, 0}), 2.0);
  EXPECT_DOUBLE_EQ(eval("if(x1 >= 0, 1, -(x1^2))", {-2}, {"x1"}), -4.0);
  EXPECT_DOUBLE_EQ(eval("if(x1 >= 0, 1, -(x1^2))", {3}, {"x1"}), 1.0);
  EXPECT_DOUBLE_EQ(eval("a - 2*b", {-1, -1}, kAB), 1.0);
  EXPECT_DOUBLE_EQ(eval("a - b", {4.25, 4.25}, kAB), 0.0);
}

TEST(Parse, SyntaxErrorCarriesOffsetAndExpectedSet) {
  try {
    Expr::parse("x1 + ", kX);
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 5u);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Parse, ErrorKinds) {
  EXPECT_EQ(kind_of([] { Expr::parse("x3 + 1", kX); }), ErrorKind::UnknownIdentifier);
  EXPECT_EQ(kind_of([] { Expr::parse("foo(x1)", kX); }), ErrorKind::UnknownIdentifier);
  EXPECT_EQ(kind_of([] { Expr::parse("exp(x1, x2)", kX); }), ErrorKind::ArityMismatch);
  EXPECT_EQ(kind_of([] { Expr::parse("max(x1)", kX); }), ErrorKind::ArityMismatch);
  EXPECT_EQ(kind_of([] { Expr::parse("", kX); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { Expr::parse("(x1", kX); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { Expr::parse("x1 $ 2", kX); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { Expr::parse("1e999", kX); }), ErrorKind::SyntaxError);
}

TEST(Parse, DepthLimit) {
  std::string deep = "x1";
  for (int i = 0; i < 70; ++i) deep = "(" + deep + " + 1)";
  EXPECT_THROW(Expr::parse(deep, kX), Error);
  std::string ok = "x1";
  for (int i = 0; i < 20; ++i) ok = "(" + ok + " + 1)";
  EXPECT_DOUBLE_EQ(eval(ok, {0, 0}), 20.0);
}

TEST(Parse, SourceSizeLimit) {
  std::string big(kMaxSourceBytes + 1, ' ');
  big[0] = '1';
  EXPECT_THROW(Expr::parse(big, kX), Error);
}

TEST(Parse, Precedence) {
  EXPECT_DOUBLE_EQ(eval("2 + 3*4", {0, 0}), 14.0);
  EXPECT_DOUBLE_EQ(eval("2^3^2", {0, 0}), 512.0);  // right associative
  EXPECT_DOUBLE_EQ(eval("-x1^2", {3, 0}), 9.0);    // unary binds tighter than ^
  EXPECT_DOUBLE_EQ(eval("-(x1^2)", {3, 0}), -9.0);
  EXPECT_DOUBLE_EQ(eval("8/4/2", {0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(eval("1.5e1 - 5", {0, 0}), 10.0);
}

TEST(Parse, AllBuiltins) {
  EXPECT_NEAR(eval("exp(1)", {0, 0}), std::exp(1.0), 1e-15);
  EXPECT_NEAR(eval("log(2)", {0, 0}), std::log(2.0), 1e-15);
  EXPECT_NEAR(eval("sin(1) + cos(1)", {0, 0}), std::sin(1.0) + std::cos(1.0), 1e-15);
  EXPECT_NEAR(eval("tanh(0.5)", {0, 0}), std::tanh(0.5), 1e-15);
  EXPECT_NEAR(eval("artanh(0.5)", {0, 0}), std::atanh(0.5), 1e-15);
  EXPECT_NEAR(eval("sqrt(2)", {0, 0}), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(eval("abs(-3)", {0, 0}), 3.0);
  EXPECT_DOUBLE_EQ(eval("min(x1, x2)", {1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(eval("max(x1, x2)", {1, 2}), 2.0);
  EXPECT_NEAR(eval("acos(0)", {0, 0}), std::acos(0.0), 1e-15);
  for (const char* cmp : {"<", "<=", ">", ">=", "=="}) {
    const std::string src = std::string("if(x1 ") + cmp + " x2, 1, 0)";
    const double lt = eval(src, {1, 2}), eq = eval(src, {2, 2}), gt = eval(src, {3, 2});
    const std::string c = cmp;
    EXPECT_EQ(lt, (c == "<" || c == "<=") ? 1.0 : 0.0) << c;
    EXPECT_EQ(eq, (c == "<=" || c == ">=" || c == "==") ? 1.0 : 0.0) << c;
    EXPECT_EQ(gt, (c == ">" || c == ">=") ? 1.0 : 0.0) << c;
  }
}

TEST(Eval, DomainErrorsSurface) {
  EXPECT_EQ(kind_of([] { eval("log(x1)", {0, 0}); }), ErrorKind::EvalDomainError);
  EXPECT_EQ(kind_of([] { eval("log(x1)", {-1, 0}); }), ErrorKind::EvalDomainError);
  EXPECT_EQ(kind_of([] { eval("1/x1", {0, 0}); }), ErrorKind::EvalDomainError);
  EXPECT_EQ(kind_of([] { eval("x1^(-1)", {0, 0}); }), ErrorKind::EvalDomainError);
  EXPECT_EQ(kind_of([] { eval("sqrt(x1)", {-1, 0}); }), ErrorKind::EvalDomainError);
  EXPECT_EQ(kind_of([] { eval("exp(x1)", {1000, 0}); }), ErrorKind::EvalDomainError);
  EXPECT_EQ(kind_of([] { eval("artanh(x1)", {1, 0}); }), ErrorKind::EvalDomainError);
}

TEST(Eval, OnlyTakenBranchIsEvaluated) {
  EXPECT_DOUBLE_EQ(eval("if(x1 > 0, log(x1), 0)", {-1, 0}), 0.0);
}

TEST(Eval, NamedEnvironment) {
  const Expr e = Expr::parse("x1 - 2*x2", kX);
  EXPECT_DOUBLE_EQ(e.eval(std::map<std::string, double>{{"x1", 1}, {"x2", 3}}), -5.0);
  EXPECT_THROW(e.eval(std::map<std::string, double>{{"x1", 1}}), Error);
}

TEST(Expr, SubstituteAndRebind) {
  const Expr outer = Expr::parse("exp(x1)", {"x1"});
  const Expr inner = Expr::parse("x1 + x2", kX);
  const Expr composed = outer.substitute(std::vector<Expr>{inner});
  EXPECT_EQ(composed.variables(), kX);
  EXPECT_NEAR(composed.eval(std::vector<double>{1, 2}), std::exp(3.0), 1e-12);
  const Expr wide = Expr::parse("x1", {"x1"}).rebind(kX);
  EXPECT_DOUBLE_EQ(wide.eval(std::vector<double>{5, 7}), 5.0);
}

TEST(Expr, OperatorsBuildTrees) {
  const Expr x = Expr::variable("x1", kX), y = Expr::variable("x2", kX);
  const Expr e = (x + y) * (x - y) / Expr::constant(2, kX) + (-x);
  EXPECT_DOUBLE_EQ(e.eval(std::vector<double>{3, 1}), 1.0);
}

// Random expressions: the parser/evaluator must agree with a direct
// evaluation of the same tree built from std::function pieces.
struct Gen {
  std::string src;
  std::function<double(double, double)> f;
};

Gen random_expr(SampleStream& s, int depth) {
  const int choice = depth <= 0 ? static_cast<int>(s.uniform() * 3) : static_cast<int>(s.uniform() * 11);
  auto leaf = [&](int c) -> Gen {
    if (c == 0) return {"x1", [](double a, double) { return a; }};
    if (c == 1) return {"x2", [](double, double b) { return b; }};
    const double k = std::round(s.uniform(-3, 3) * 100) / 100;
    std::string text = std::to_string(k);
    if (k < 0) text = "(" + text + ")";
    const double kv = std::stod(std::to_string(k));
    return {text, [kv](double, double) { return kv; }};
  };
  if (choice < 3) return leaf(choice);
  Gen l = random_expr(s, depth - 1), r = random_expr(s, depth - 1);
  switch (choice) {
    case 3: return {"(" + l.src + " + " + r.src + ")", [=](double a, double b) { return l.f(a, b) + r.f(a, b); }};
    case 4: return {"(" + l.src + " - " + r.src + ")", [=](double a, double b) { return l.f(a, b) - r.f(a, b); }};
    case 5: return {"(" + l.src + " * " + r.src + ")", [=](double a, double b) { return l.f(a, b) * r.f(a, b); }};
    case 6: return {"sin(" + l.src + ")", [=](double a, double b) { return std::sin(l.f(a, b)); }};
    case 7: return {"tanh(" + l.src + ")", [=](double a, double b) { return std::tanh(l.f(a, b)); }};
    case 8: return {"abs(" + l.src + ")", [=](double a, double b) { return std::abs(l.f(a, b)); }};
    case 9: return {"max(" + l.src + ", " + r.src + ")", [=](double a, double b) { return std::max(l.f(a, b), r.f(a, b)); }};
    default:
      return {"if(" + l.src + " < " + r.src + ", " + l.src + ", -(" + r.src + "))",
              [=](double a, double b) { return l.f(a, b) < r.f(a, b) ? l.f(a, b) : -r.f(a, b); }};
  }
}

TEST(ExprProperty, AgreesWithDirectEvaluation) {
  for (std::uint64_t i = 0; i < 300; ++i) {
    SampleStream s(99, stream_id("test/expr-gen"), i);
    const Gen g = random_expr(s, 4);
    const Expr e = Expr::parse(g.src, kX);
    for (int k = 0; k < 5; ++k) {
      const double a = s.uniform(-2, 2), b = s.uniform(-2, 2);
      EXPECT_NEAR(e.eval(std::vector<double>{a, b}), g.f(a, b), 1e-12 * (1 + std::abs(g.f(a, b))))
          << g.src;
    }
  }
}

TEST(ExprProperty, PrintParseRoundTrip) {
  for (std::uint64_t i = 0; i < 300; ++i) {
    SampleStream s(98, stream_id("test/expr-gen"), i);
    const Expr e = Expr::parse(random_expr(s, 4).src, kX);
    const Expr back = Expr::parse(e.to_string(), kX);
    EXPECT_TRUE(back == e) << e.to_string();
    EXPECT_EQ(back.to_string(), e.to_string());
  }
}

TEST(ExprProperty, EvaluationIsBitIdentical) {
  const Expr e = Expr::parse("sin(x1)*exp(x2) + x1^3/7", kX);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> v{0.1 * i, -0.05 * i};
    EXPECT_EQ(e.eval(v), e.eval(v));
  }
}

TEST(Differentiate, DocumentedExamples) {
  const ScalarFn sq = ScalarFn::parse("x1^2", 1);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  EXPECT_NEAR(differentiate_numeric(sq, Point::Constant(1, 3.0), one), 6.0, 1e-6);
  const ScalarFn lin = ScalarFn::parse("2.5*x1", 1);
  for (double at : {-7.0, 0.0, 0.3, 1e3}) {
    EXPECT_NEAR(differentiate_numeric(lin, Point::Constant(1, at), one), 2.5, 1e-9);
  }
  const ScalarFn ex = ScalarFn::parse("exp(x1)", 1);
  EXPECT_NEAR(differentiate_numeric(ex, Point::Constant(1, 0.0), one), 1.0, 1e-6);
}

TEST(Differentiate, QuadraticsAreExact) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    SampleStream s(5, stream_id("test/quadratic"), i);
    const double a = s.uniform(-3, 3), b = s.uniform(-3, 3), c = s.uniform(-3, 3);
    const double x = s.uniform(-10, 10), y = s.uniform(-10, 10);
    const Eigen::Vector2d dir(s.uniform(-1, 1), s.uniform(-1, 1));
    const ScalarFn f = ScalarFn::parse(std::to_string(a) + "*x1^2 + " + std::to_string(b) +
                                           "*x1*x2 + " + std::to_string(c) + "*x2",
                                       2);
    const double ap = std::stod(std::to_string(a)), bp = std::stod(std::to_string(b)),
                 cp = std::stod(std::to_string(c));
    const double exact = (2 * ap * x + bp * y) * dir[0] + (bp * x + cp) * dir[1];
    EXPECT_NEAR(differentiate_numeric(f, Eigen::Vector2d(x, y), dir), exact,
                1e-9 * std::max(1.0, std::abs(exact)) * 100);
  }
}

TEST(Differentiate, LeavingTheDomainIsAnError) {
  const ScalarFn f = ScalarFn::parse("log(x1)", 1);
  EXPECT_EQ(kind_of([&] { differentiate_numeric(f, Point::Constant(1, 0.0), Eigen::VectorXd::Ones(1)); }),
            ErrorKind::EvalDomainError);
}

TEST(Functions, EndoMapAndBifunction) {
  const EndoMap E = EndoMap::parse({"x2", "x1 + 1"}, 2);
  EXPECT_TRUE(E(Eigen::Vector2d(1, 2)).isApprox(Eigen::Vector2d(2, 2)));
  EXPECT_FALSE(E.is_identity());
  EXPECT_TRUE(EndoMap::identity(3).is_identity());
  EXPECT_TRUE(EndoMap::parse({"-1"}, 1).is_constant());
  const EndoMap twice = E.compose(E);
  EXPECT_TRUE(twice(Eigen::Vector2d(1, 2)).isApprox(Eigen::Vector2d(2, 3)));
  EXPECT_DOUBLE_EQ(Bifunction::difference()(3, 5), -2.0);
  EXPECT_DOUBLE_EQ(Bifunction::parse("a - 2*b")(-1, -1), 1.0);
  EXPECT_THROW(Bifunction::parse("a + x1"), Error);
  EXPECT_THROW(ScalarFn::parse("x1 + x2", 1), Error);
}

}  // namespace
}  // namespace geoconvex
