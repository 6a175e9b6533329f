#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geoconvex {

/// Node operators of the expression language. Comparison operators appear
/// only as the condition of an `If` node.
enum class Op : std::uint8_t {
  Const,
  Var,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Exp,
  Log,
  Sin,
  Cos,
  Tanh,
  Artanh,
  Sqrt,
  Abs,
  Acos,
  Min,
  Max,
  If,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
};

inline constexpr int kMaxExprDepth = 64;
inline constexpr std::size_t kMaxSourceBytes = 64 * 1024;

/// Names accepted in call position.
const std::vector<std::string>& builtin_function_names();

/// Immutable expression over a fixed, ordered variable signature.
///
/// Grammar:
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := unary ("^" factor)?
///   unary  := "-" unary | atom
///   atom   := number | ident | call | "(" expr ")"
///   call   := ident "(" expr ("," expr)* ")"
///   if     := "if" "(" expr cmp expr "," expr "," expr ")"
///
/// Note that `-x^2` parses as `(-x)^2`; write `-(x^2)` for the negated square.
/// Evaluation is IEEE double arithmetic; any NaN or infinity, or an argument
/// outside a builtin's domain, raises Error(EvalDomainError).
class Expr {
 public:
  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    std::int32_t slot = -1;
    std::int32_t a = -1;
    std::int32_t b = -1;
    std::int32_t c = -1;
  };

  /// The constant 0 over an empty signature.
  Expr();

  static Expr parse(std::string_view src, std::vector<std::string> variables);

  static Expr constant(double value, std::vector<std::string> variables);
  static Expr variable(const std::string& name, std::vector<std::string> variables);
  static Expr unary(Op op, const Expr& arg);
  static Expr binary(Op op, const Expr& lhs, const Expr& rhs);
  static Expr if_then_else(Op comparison, const Expr& lhs, const Expr& rhs,
                           const Expr& then_branch, const Expr& else_branch);

  /// Replaces variable i by replacements[i]; the result takes the (shared)
  /// signature of the replacements.
  Expr substitute(std::span<const Expr> replacements) const;
  /// Re-expresses this expression over a signature containing all of its
  /// variable names.
  Expr rebind(std::vector<std::string> variables) const;

  double eval(std::span<const double> values) const;
  double eval(const std::map<std::string, double>& env) const;

  const std::vector<std::string>& variables() const noexcept { return variables_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  int depth() const noexcept { return depth_; }

  bool is_constant() const noexcept;
  /// True when the expression is exactly the variable in `slot`.
  bool is_variable(int slot) const noexcept;

  /// Fully parenthesized source text that parses back to the same tree.
  std::string to_string() const;

  bool operator==(const Expr& other) const;

 private:
  friend class ExprBuilder;
  Expr(std::vector<std::string> variables, std::vector<Node> nodes);

  double eval_node(std::int32_t index, std::span<const double> values) const;
  std::string print_node(std::int32_t index) const;
  bool equal_node(std::int32_t i, const Expr& other, std::int32_t j) const;

  std::vector<std::string> variables_;
  std::vector<Node> nodes_;  // post-order; root is nodes_.back()
  int depth_ = 1;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

}  // namespace geoconvex
