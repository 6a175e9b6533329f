#pragma once

#include <Eigen/Dense>
#include <string>

namespace geoconvex {

/// Chart coordinates of a manifold point. Sphere(n) points live in R^{n+1};
/// Euclidean(n) and PoincareBall(n) points in R^n.
using Point = Eigen::VectorXd;

/// Tangent vectors use the same ambient coordinates as points.
using Tangent = Eigen::VectorXd;

enum class ManifoldKind { Euclidean, Sphere, PoincareBall };

std::string to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

/// One of the built-in manifolds with closed-form geodesics.
///
/// Geodesics follow the endpoint convention gamma_{mu1,mu2}(0) = mu2 and
/// gamma_{mu1,mu2}(1) = mu1, with constant-speed parameterization on [0, 1].
/// The Poincare ball carries curvature -1; the sphere is the unit sphere.
class Manifold {
 public:
  Manifold(ManifoldKind kind, int dim);

  static Manifold euclidean(int dim) { return {ManifoldKind::Euclidean, dim}; }
  static Manifold sphere(int dim) { return {ManifoldKind::Sphere, dim}; }
  static Manifold poincare_ball(int dim) {
    return {ManifoldKind::PoincareBall, dim};
  }

  ManifoldKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  int ambient_dim() const noexcept {
    return kind_ == ManifoldKind::Sphere ? dim_ + 1 : dim_;
  }
  std::string name() const;

  bool is_valid(const Point& p) const noexcept;
  /// Throws Error(InvalidPoint) when `p` violates the point invariants.
  void validate(const Point& p) const;
  /// Nearest valid point; used to keep refined samples on the manifold.
  Point project(const Point& p) const;

  double distance(const Point& p, const Point& q) const;
  Tangent log_map(const Point& p, const Point& q) const;
  Point exp_map(const Point& p, const Tangent& v) const;
  /// Riemannian norm of `v` at `p`.
  double norm(const Point& p, const Tangent& v) const;

  /// Point at parameter t of the minimal geodesic joining mu2 (t=0) to mu1
  /// (t=1).
  Point geodesic(const Point& mu1, const Point& mu2, double t) const;
  /// d/dt of geodesic(mu1, mu2, t).
  Tangent geodesic_velocity(const Point& mu1, const Point& mu2, double t) const;

  bool operator==(const Manifold&) const = default;

 private:
  void check_not_antipodal(const Point& p, const Point& q) const;
  void check_tangent(const Point& p, const Tangent& v) const;

  ManifoldKind kind_;
  int dim_;
};

/// Validated (manifold, mu1, mu2) triple naming gamma_{mu1,mu2}.
struct GeodesicSpec {
  Manifold manifold;
  Point mu1;
  Point mu2;
};

Point geodesic(const GeodesicSpec& spec, double t);

namespace mobius {
/// Mobius addition in the unit Poincare ball.
Eigen::VectorXd add(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
}  // namespace mobius

}  // namespace geoconvex
