#include "geoconvex/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geoconvex/error.hpp"

namespace geoconvex {
namespace {

constexpr double kSphereNormTol = 1e-12;
constexpr double kBallMargin = 1e-12;
constexpr double kAntipodalTol = 1e-9;
constexpr double kTangentTol = 1e-10;

std::string describe(const Point& p) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

// Angle between unit vectors, accurate at both ends of [0, pi].
double sphere_angle(const Point& p, const Point& q) {
  return 2.0 * std::atan2((p - q).norm(), (p + q).norm());
}

}  // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Euclidean: return "Euclidean";
    case ManifoldKind::Sphere: return "Sphere";
    case ManifoldKind::PoincareBall: return "PoincareBall";
  }
  return "?";
}

ManifoldKind manifold_kind_from_string(const std::string& name) {
  if (name == "Euclidean") return ManifoldKind::Euclidean;
  if (name == "Sphere") return ManifoldKind::Sphere;
  if (name == "PoincareBall" || name == "Poincare") return ManifoldKind::PoincareBall;
  throw Error(ErrorKind::InvalidArgument, "unknown manifold kind '" + name + "'");
}

namespace mobius {

Eigen::VectorXd add(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double xy = x.dot(y);
  const double xx = x.squaredNorm();
  const double yy = y.squaredNorm();
  const double den = 1.0 + 2.0 * xy + xx * yy;
  return ((1.0 + 2.0 * xy + yy) * x + (1.0 - xx) * y) / den;
}

}  // namespace mobius

Manifold::Manifold(ManifoldKind kind, int dim) : kind_(kind), dim_(dim) {
  if (dim < 1) {
    throw Error(ErrorKind::InvalidArgument, "manifold dimension must be >= 1");
  }
}

std::string Manifold::name() const {
  return to_string(kind_) + "(" + std::to_string(dim_) + ")";
}

bool Manifold::is_valid(const Point& p) const noexcept {
  if (p.size() != ambient_dim() || !p.allFinite()) return false;
  switch (kind_) {
    case ManifoldKind::Euclidean: return true;
    case ManifoldKind::Sphere: return std::abs(p.norm() - 1.0) <= kSphereNormTol;
    case ManifoldKind::PoincareBall: return p.norm() < 1.0 - kBallMargin;
  }
  return false;
}

void Manifold::validate(const Point& p) const {
  if (!is_valid(p)) {
    throw Error(ErrorKind::InvalidPoint,
                "point " + describe(p) + " is not a valid point of " + name());
  }
}

Point Manifold::project(const Point& p) const {
  switch (kind_) {
    case ManifoldKind::Euclidean: return p;
    case ManifoldKind::Sphere: {
      const double n = p.norm();
      if (!(n > 0.0)) {
        throw Error(ErrorKind::InvalidPoint, "cannot project the origin onto " + name());
      }
      return p / n;
    }
    case ManifoldKind::PoincareBall: {
      const double n = p.norm();
      const double limit = 1.0 - 1e-9;
      return n < limit ? p : Point(p * (limit / n));
    }
  }
  return p;
}

void Manifold::check_not_antipodal(const Point& p, const Point& q) const {
  if (kind_ == ManifoldKind::Sphere && (p + q).norm() <= kAntipodalTol) {
    throw Error(ErrorKind::AntipodalPoints,
                "antipodal points " + describe(p) + " and " + describe(q) +
                    " have no unique minimal geodesic");
  }
}

void Manifold::check_tangent(const Point& p, const Tangent& v) const {
  if (v.size() != ambient_dim() || !v.allFinite()) {
    throw Error(ErrorKind::InvalidTangent, "tangent vector has wrong size or non-finite entries");
  }
  if (kind_ == ManifoldKind::Sphere &&
      std::abs(p.dot(v)) > kTangentTol * std::max(1.0, v.norm())) {
    throw Error(ErrorKind::InvalidTangent,
                "vector " + describe(v) + " is not tangent to the sphere at " + describe(p));
  }
}

double Manifold::distance(const Point& p, const Point& q) const {
  validate(p);
  validate(q);
  switch (kind_) {
    case ManifoldKind::Euclidean: return (p - q).norm();
    case ManifoldKind::Sphere: return sphere_angle(p, q);
    case ManifoldKind::PoincareBall:
      return 2.0 * std::atanh(std::min(mobius::add(-p, q).norm(), 1.0 - 1e-16));
  }
  return 0.0;
}

Tangent Manifold::log_map(const Point& p, const Point& q) const {
  validate(p);
  validate(q);
  switch (kind_) {
    case ManifoldKind::Euclidean: return q - p;
    case ManifoldKind::Sphere: {
      check_not_antipodal(p, q);
      Tangent v = q - p.dot(q) * p;
      v -= p.dot(v) * p;
      const double vn = v.norm();
      if (vn == 0.0) return Tangent::Zero(p.size());
      return sphere_angle(p, q) * v / vn;
    }
    case ManifoldKind::PoincareBall: {
      const Eigen::VectorXd w = mobius::add(-p, q);
      const double wn = w.norm();
      if (wn == 0.0) return Tangent::Zero(p.size());
      return (1.0 - p.squaredNorm()) * std::atanh(wn) * w / wn;
    }
  }
  return Tangent::Zero(p.size());
}

Point Manifold::exp_map(const Point& p, const Tangent& v) const {
  validate(p);
  check_tangent(p, v);
  const double vn = v.norm();
  if (vn == 0.0) return p;
  switch (kind_) {
    case ManifoldKind::Euclidean: return p + v;
    case ManifoldKind::Sphere: {
      Point r = std::cos(vn) * p + std::sin(vn) * (v / vn);
      return r / r.norm();
    }
    case ManifoldKind::PoincareBall: {
      const double lambda = 2.0 / (1.0 - p.squaredNorm());
      return mobius::add(p, std::tanh(0.5 * lambda * vn) * (v / vn));
    }
  }
  return p;
}

double Manifold::norm(const Point& p, const Tangent& v) const {
  validate(p);
  check_tangent(p, v);
  if (kind_ == ManifoldKind::PoincareBall) {
    return 2.0 / (1.0 - p.squaredNorm()) * v.norm();
  }
  return v.norm();
}

Point Manifold::geodesic(const Point& mu1, const Point& mu2, double t) const {
  validate(mu1);
  validate(mu2);
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::ParamOutOfRange,
                "geodesic parameter " + std::to_string(t) + " outside [0, 1]");
  }
  check_not_antipodal(mu1, mu2);
  if (t == 0.0) return mu2;
  if (t == 1.0) return mu1;
  switch (kind_) {
    case ManifoldKind::Euclidean: return t * mu1 + (1.0 - t) * mu2;
    case ManifoldKind::Sphere: {
      const double theta = sphere_angle(mu1, mu2);
      Point r;
      if (theta < 1e-15) {
        r = t * mu1 + (1.0 - t) * mu2;
      } else {
        const double s = std::sin(theta);
        r = (std::sin((1.0 - t) * theta) / s) * mu2 + (std::sin(t * theta) / s) * mu1;
      }
      return r / r.norm();
    }
    case ManifoldKind::PoincareBall: {
      const Eigen::VectorXd w = mobius::add(-mu2, mu1);
      const double wn = w.norm();
      if (wn == 0.0) return mu2;
      return mobius::add(mu2, std::tanh(t * std::atanh(wn)) * (w / wn));
    }
  }
  return mu2;
}

Tangent Manifold::geodesic_velocity(const Point& mu1, const Point& mu2, double t) const {
  if (kind_ == ManifoldKind::Euclidean) {
    validate(mu1);
    validate(mu2);
    return mu1 - mu2;
  }
  // Constant speed: the velocity at gamma(t) points along the log toward
  // whichever endpoint is farther, scaled by the remaining parameter span.
  const Point at = geodesic(mu1, mu2, t);
  if (t <= 0.5) return log_map(at, mu1) / (1.0 - t);
  return -log_map(at, mu2) / t;
}

Point geodesic(const GeodesicSpec& spec, double t) {
  return spec.manifold.geodesic(spec.mu1, spec.mu2, t);
}

}  // namespace geoconvex
