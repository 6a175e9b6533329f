#pragma once

#include <string>
#include <vector>

#include "geoconvex/expr.hpp"
#include "geoconvex/manifold.hpp"

namespace geoconvex {

/// Coordinate variable names x1..xk.
std::vector<std::string> coordinate_names(int k);

/// Variable names of a bifunction, {a, b}.
const std::vector<std::string>& bifunction_names();

/// Scalar function h over chart coordinates x1..xk.
struct ScalarFn {
  Expr expr;
  std::string label;

  static ScalarFn parse(const std::string& src, int arity, std::string label = {});
  static ScalarFn from_expr(Expr e, std::string label = {});

  int arity() const { return static_cast<int>(expr.variables().size()); }
  double operator()(const Point& p) const;
  double operator()(std::span<const double> coords) const { return expr.eval(coords); }
};

/// Map between chart coordinate spaces, one expression per output coordinate.
/// Used for E (same input and output dimension) and for diffeomorphism
/// charts H, H^-1 (dimensions may differ).
struct EndoMap {
  std::vector<Expr> exprs;
  std::string label;

  static EndoMap parse(const std::vector<std::string>& srcs, int in_dim, std::string label = {});
  static EndoMap identity(int dim);
  static EndoMap from_exprs(std::vector<Expr> exprs, std::string label = {});

  int in_dim() const;
  int out_dim() const { return static_cast<int>(exprs.size()); }
  bool is_identity() const;
  bool is_constant() const;

  Point operator()(const Point& p) const;

  /// Expression-level composition: (this ∘ inner)(x) = this(inner(x)).
  EndoMap compose(const EndoMap& inner) const;
  /// Substitutes this map into an expression over x1..x_out.
  Expr pull_back(const Expr& e) const;

  std::vector<std::string> sources() const;
};

/// Bifunction phi(a, b).
struct Bifunction {
  Expr expr;
  std::string label;

  static Bifunction parse(const std::string& src, std::string label = {});
  static Bifunction from_expr(Expr e, std::string label = {});
  /// phi(a, b) = a - b, which turns phi-convexity into ordinary convexity.
  static Bifunction difference();

  double operator()(double a, double b) const;
};

/// Central-difference directional derivative of f at `at` along `dir`.
///
/// The spatial step is max(1e-6, 1e-6 * |at|); the difference quotient is
/// divided by the step actually realized in floating point, which makes the
/// stencil exact (to rounding) for quadratics.
double differentiate_numeric(const ScalarFn& f, const Point& at, const Eigen::VectorXd& dir);

}  // namespace geoconvex
