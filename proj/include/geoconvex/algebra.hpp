#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geoconvex/expr.hpp"
#include "geoconvex/functions.hpp"
#include "geoconvex/manifold.hpp"
#include "geoconvex/report.hpp"
#include "geoconvex/rng.hpp"

namespace geoconvex {

/// Axis-aligned box in chart (ambient) coordinates.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Box cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lo.size()); }
  bool empty() const;
  /// Largest signed distance outside the box over all coordinates; negative
  /// inside.
  double excess(const Point& p) const;
  double diagonal() const;
  Box intersect(const Box& other) const;
  Box inset(double eps) const;
};

/// Subset of a manifold: points inside `box` whose membership expression (if
/// any) is strictly positive.
class DomainSet {
 public:
  DomainSet(Manifold manifold, Box box, std::optional<Expr> membership = std::nullopt);

  /// The default box of the manifold: [-1, 1]^k for the sphere and the ball,
  /// [lo, hi]^n for Euclidean space.
  static DomainSet whole(const Manifold& m, double lo = -1.0, double hi = 1.0);
  static DomainSet interval(double lo, double hi);

  const Manifold& manifold() const { return manifold_; }
  const Box& box() const { return box_; }
  const std::optional<Expr>& membership() const { return membership_; }

  bool contains(const Point& p) const;
  /// Signed membership depth: <= 0 inside, > 0 outside. Invalid manifold
  /// points are infinitely deep outside.
  double depth(const Point& p) const;
  /// Characteristic length used to scale radii and distances.
  double scale() const { return box_.diagonal(); }

  /// One raw draw from the manifold restricted to the box (not filtered).
  Point draw(SampleStream& s) const;
  /// Rejection sampling with at most `attempts` draws.
  std::optional<Point> sample(SampleStream& s, int attempts = kSampleAttempts) const;
  /// True when at least one of up to `max_draws` seeded draws is a member.
  bool probe_nonempty(std::uint64_t seed, std::int64_t max_draws = 1'000'000) const;

  DomainSet intersect(const DomainSet& other) const;

  static constexpr int kSampleAttempts = 64;

 private:
  Manifold manifold_;
  Box box_;
  std::optional<Expr> membership_;
};

/// The standing data (h, E, phi) on a domain of a manifold.
struct Instance {
  Manifold manifold;
  ScalarFn h;
  EndoMap E;
  Bifunction phi;
  DomainSet domain;
  std::string label;

  static Instance make(const Manifold& m, const std::string& h, const std::vector<std::string>& E,
                       const std::string& phi, DomainSet domain);
  /// Convenience constructor for instances on the real line.
  static Instance line(const std::string& h, const std::string& E, const std::string& phi,
                       double lo, double hi);

  /// Throws Error(InvalidArgument) on inconsistent arities.
  void validate() const;
  /// E(p), validated as a point of the manifold.
  Point apply_E(const Point& p) const;

  Instance with_h(ScalarFn fn) const;
  Instance with_phi(Bifunction f) const;
  Instance with_E(EndoMap map) const;
  Instance with_domain(DomainSet d) const;
};

/// Settings of the inverse search deciding whether u lies in E(B).
struct InverseSearchOptions {
  std::uint64_t seed = 0;
  std::int64_t candidates = 256;
  double tol = 1e-8;
};

/// Smallest ||E(z) - u|| found over z in B, with fast paths for identity,
/// constant and fixed-point cases.
double image_distance(const EndoMap& E, const DomainSet& B, const Point& u,
                      const InverseSearchOptions& opts);

/// Subset of N x R. A pair (u, v) is a member iff u is in the base set (and
/// in image_map(base) when set) and graph(u, v) >= 0.
struct ProductSet {
  DomainSet base;
  Expr graph;  // over x1..xk, v
  double v_lo = -10.0;
  double v_hi = 10.0;
  std::optional<Expr> anchor;        // over x1..xk: boundary v used when sampling
  std::optional<EndoMap> image_map;  // base points restricted to image_map(base)
  std::string label;

  static ProductSet from_graph(DomainSet base, const std::string& graph, double v_lo,
                               double v_hi, const std::optional<std::string>& anchor = {});
  /// {(u, v) in E(B) x R : h(u) <= v}.
  static ProductSet epigraph(const Instance& inst);

  static std::vector<std::string> variables(int k);

  /// A sampled member (u, v) together with the base point z it came from
  /// (u = image_map(z), or u = z without an image map).
  struct Member {
    Point z;
    Point u;
    double v = 0.0;
  };

  /// Signed membership depth (<= 0 inside).
  double depth(const Point& u, double v, const InverseSearchOptions& opts) const;
  /// graph(u, v), the slice predicate alone.
  double graph_value(const Point& u, double v) const;
  std::optional<Member> sample(SampleStream& s) const;
  ProductSet intersect(const ProductSet& other) const;
};

/// Bounded real sequences (u_i), (v_i) of equal length.
struct SequencePair {
  std::vector<double> u;
  std::vector<double> v;
};

/// phi(t a, t b) = t phi(a, b) for t >= 0.
Report check_nonneg_homogeneous(const Bifunction& phi, const CheckConfig& cfg);
/// phi(a1 + a2, b1 + b2) = phi(a1, b1) + phi(a2, b2).
Report check_additive(const Bifunction& phi, const CheckConfig& cfg);
/// phi(a, b) = -phi(b, a) (the adopted meaning of "antisymmetric").
Report check_antisymmetric(const Bifunction& phi, const CheckConfig& cfg);
/// Conjunction of the two checks above; flag "nonneg_linear".
Report check_nonneg_linear(const Bifunction& phi, const CheckConfig& cfg);
/// sup_i phi(E u_i, E v_i) <= phi(sup_i E u_i, sup_i E v_i) for every pair.
Report check_seq_upper_bounded(const Bifunction& phi, const EndoMap& E,
                               const std::vector<SequencePair>& sequences,
                               const CheckConfig& cfg);
/// Monotonicity probe for the epigraph theorems: v2 + t phi(v1, v2) must be
/// non-decreasing in v1 and v2 for every t in [0, 1], i.e. phi
/// non-decreasing in a and b + phi(a, b) non-decreasing in b. The stricter
/// "non-decreasing in each argument" reading is reported as a flag.
Report check_phi_nondecreasing(const Bifunction& phi, double lo, double hi,
                               const CheckConfig& cfg);

}  // namespace geoconvex
