#include "geoconvex/checker.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>

#include "geoconvex/error.hpp"
#include "geoconvex/search.hpp"

namespace geoconvex {
namespace {

// Pairs whose E-images are closer than this (relative to the domain scale)
// are exempt from the strict inequality.
constexpr double kStrictSeparation = 1e-3;
// Slope quotients need images at least this far apart (relative).
constexpr double kSlopeSeparation = 1e-4;
constexpr double kInverseTol = 1e-8;
constexpr int kBoundsDraws = 256;

// Everything the geodesic checks need to know about the space the sampled
// points live in. The native chart is the instance itself; a transported
// chart sees the instance through a diffeomorphism.
struct Chart {
  Manifold manifold = Manifold::euclidean(1);  // validity of chart points
  int k = 1;
  Eigen::VectorXd lo, hi;  // refinement bounds per coordinate
  double scale = 1.0;
  std::function<std::optional<Point>(SampleStream&)> sample;
  std::function<bool(const Point&)> contains;
  std::function<double(const Point&)> depth;
  std::function<Point(const Point&)> project;
  std::function<Point(const Point&)> E;
  std::function<Point(const Point&, const Point&, double)> geodesic;
  std::function<double(const Point&, const Point&)> distance;
  // Point at distance eps beyond b on the geodesic arriving from a.
  std::function<Point(const Point&, const Point&, double)> extend;
};

Point extend_on(const Manifold& m, const Point& a, const Point& b, double eps) {
  const Tangent back = m.log_map(b, a);
  const double len = m.norm(b, back);
  if (!(len > 0.0)) throw Error(ErrorKind::InvalidArgument, "cannot extend a degenerate pair");
  return m.exp_map(b, (-eps / len) * back);
}

Chart native_chart(const Manifold& m, const EndoMap& E, const DomainSet& B) {
  Chart c;
  c.manifold = m;
  c.k = m.ambient_dim();
  c.lo = B.box().lo;
  c.hi = B.box().hi;
  c.scale = B.scale();
  c.sample = [B](SampleStream& s) { return B.sample(s); };
  c.contains = [B](const Point& p) { return B.contains(p); };
  c.depth = [B](const Point& p) { return B.depth(p); };
  c.project = [m](const Point& p) { return m.project(p); };
  c.E = [m, E](const Point& p) {
    Point q = E(p);
    if (!m.is_valid(q)) {
      throw Error(ErrorKind::InvalidPoint, "E maps a domain point outside " + m.name());
    }
    return q;
  };
  c.geodesic = [m](const Point& a, const Point& b, double t) { return m.geodesic(a, b, t); };
  c.distance = [m](const Point& a, const Point& b) { return m.distance(a, b); };
  c.extend = [m](const Point& a, const Point& b, double eps) { return extend_on(m, a, b, eps); };
  return c;
}

// Splits a search vector into the two chart points it encodes, projecting
// refined coordinates back onto the manifold. nullopt when either point is
// not a member.
std::optional<std::pair<Point, Point>> member_pair(const Chart& c, const Eigen::VectorXd& z) {
  try {
    Point a = c.project(z.head(c.k));
    Point b = c.project(z.tail(c.k));
    if (!c.contains(a) || !c.contains(b)) return std::nullopt;
    return std::make_pair(std::move(a), std::move(b));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidPoint) return std::nullopt;
    throw;
  }
}

std::function<bool(SampleStream&, Eigen::VectorXd&)> pair_sampler(const Chart& c) {
  return [c](SampleStream& s, Eigen::VectorXd& z) {
    auto a = c.sample(s);
    if (!a) return false;
    auto b = c.sample(s);
    if (!b) return false;
    z.head(c.k) = *a;
    z.tail(c.k) = *b;
    return true;
  };
}

SearchProblem pair_problem(std::string name, std::string_view stream, const Chart& c,
                           bool with_t) {
  SearchProblem p;
  p.name = std::move(name);
  p.stream = stream_id(stream);
  p.dim = 2 * c.k;
  p.with_t = with_t;
  p.lo.resize(p.dim);
  p.hi.resize(p.dim);
  p.lo << c.lo, c.lo;
  p.hi << c.hi, c.hi;
  p.sample = pair_sampler(c);
  return p;
}

Report vacuous(std::string check, const CheckConfig& cfg) {
  Report r;
  r.check = std::move(check);
  r.seed = cfg.seed;
  r.notes.push_back("domain has no sampled members; holds vacuously");
  return r;
}

Report set_check(const Chart& c, const CheckConfig& cfg) {
  SearchProblem contain = pair_problem("geodesic_E_convex_set", "geodesic_E_convex_set", c, true);
  contain.eval = [c](const Eigen::VectorXd& z, double t) {
    Probe pr;
    auto pair = member_pair(c, z);
    if (!pair) return pr;
    const Point e1 = c.E(pair->first);
    const Point e2 = c.E(pair->second);
    Point g = c.geodesic(e1, e2, t);
    pr.admissible = true;
    pr.lhs = c.depth(g);
    pr.rhs = 0.0;
    pr.points = {pair->first, pair->second, std::move(g)};
    return pr;
  };
  Report out = run_search(contain, cfg, cfg.samples);

  SearchProblem length = pair_problem("geodesic_length", "geodesic_length", c, false);
  length.eval = [c](const Eigen::VectorXd& z, double) {
    Probe pr;
    auto pair = member_pair(c, z);
    if (!pair) return pr;
    pr.admissible = true;
    pr.two_sided = true;
    pr.lhs = c.distance(c.E(pair->first), c.E(pair->second));
    pr.rhs = c.distance(pair->first, pair->second);
    pr.points = {pair->first, pair->second};
    return pr;
  };
  Report len = run_search(length, cfg, cfg.samples);
  out.flags["length_condition"] = len.holds();
  if (len.witness) {
    out.notes.push_back("length condition d(E mu1, E mu2) = d(mu1, mu2) fails; off by " +
                        std::to_string(len.witness->violation));
  }
  return out;
}

// Core of the geodesic function check over an arbitrary chart.
Report fn_check(const Chart& c, std::function<double(const Point&)> h, const Bifunction& phi,
                const CheckConfig& cfg, bool strict) {
  const std::vector<double> grid = cfg.t_values();
  const double t_in = grid[1];
  const double t_out = grid[grid.size() - 2];
  const double min_sep = kStrictSeparation * c.scale;
  SearchProblem p = pair_problem(strict ? "strict_geodesic_phiE_convex" : "geodesic_phiE_convex",
                                 "phiE_convex", c, true);
  p.eval = [c, h, phi, strict, t_in, t_out, min_sep](const Eigen::VectorXd& z, double t) {
    Probe pr;
    auto pair = member_pair(c, z);
    if (!pair) return pr;
    const Point e1 = c.E(pair->first);
    const Point e2 = c.E(pair->second);
    Point g = c.geodesic(e1, e2, t);
    const double h1 = h(e1);
    const double h2 = h(e2);
    pr.admissible = true;
    pr.lhs = h(g);
    pr.rhs = h2 + t * phi(h1, h2);
    pr.strict = strict && t >= t_in && t <= t_out && c.distance(e1, e2) >= min_sep;
    pr.points = {pair->first, pair->second, std::move(g)};
    return pr;
  };
  return run_search(p, cfg, cfg.samples);
}

Report with_set_premise(Report set, const Chart& c, std::function<double(const Point&)> h,
                        const Bifunction& phi, const CheckConfig& cfg, bool strict) {
  if (!set.holds()) {
    Report out;
    out.check = strict ? "strict_geodesic_phiE_convex" : "geodesic_phiE_convex";
    out.seed = cfg.seed;
    out.verdict =
        set.verdict == Verdict::DomainError ? Verdict::DomainError : Verdict::PremiseFailed;
    out.error = set.error;
    out.notes.push_back("domain is not a geodesic E-convex set on samples; conclusion skipped");
    out.flags = set.flags;
    out.premises.push_back(std::move(set));
    return out;
  }
  Report out = fn_check(c, std::move(h), phi, cfg, strict);
  for (const auto& [k, v] : set.flags) out.flags[k] = v;
  out.premises.push_back(std::move(set));
  return out;
}

bool nonempty(const DomainSet& B, const CheckConfig& cfg) { return B.probe_nonempty(cfg.seed); }

}  // namespace

Report check_phiE_convex_interval(const Instance& inst, const CheckConfig& cfg) {
  cfg.validate();
  if (!(inst.manifold == Manifold::euclidean(1))) {
    throw Error(ErrorKind::InvalidArgument, "the interval check needs an instance on Euclidean(1)");
  }
  const DomainSet& U = inst.domain;
  SearchProblem p;
  p.name = "phiE_convex_interval";
  p.stream = stream_id("phiE_convex");
  p.dim = 2;
  p.with_t = true;
  p.lo = Eigen::Vector2d(U.box().lo[0], U.box().lo[0]);
  p.hi = Eigen::Vector2d(U.box().hi[0], U.box().hi[0]);
  p.sample = [U](SampleStream& s, Eigen::VectorXd& z) {
    auto a = U.sample(s);
    if (!a) return false;
    auto b = U.sample(s);
    if (!b) return false;
    z[0] = (*a)[0];
    z[1] = (*b)[0];
    return true;
  };
  p.eval = [&inst, U](const Eigen::VectorXd& z, double t) {
    Probe pr;
    const Point u1 = z.segment(0, 1);
    const Point u2 = z.segment(1, 1);
    if (!U.contains(u1) || !U.contains(u2)) return pr;
    const double e1 = inst.E(u1)[0];
    const double e2 = inst.E(u2)[0];
    const double x = t * e1 + (1.0 - t) * e2;
    const double h1 = inst.h(Point::Constant(1, e1));
    const double h2 = inst.h(Point::Constant(1, e2));
    pr.admissible = true;
    pr.lhs = inst.h(Point::Constant(1, x));
    pr.rhs = h2 + t * inst.phi(h1, h2);
    pr.points = {u1, u2, Point::Constant(1, x)};
    return pr;
  };
  return run_search(p, cfg, cfg.samples);
}

Report check_slope_inequality(const Instance& inst, const CheckConfig& cfg) {
  cfg.validate();
  if (!(inst.manifold == Manifold::euclidean(1))) {
    throw Error(ErrorKind::InvalidArgument, "the slope check needs an instance on Euclidean(1)");
  }
  const DomainSet& U = inst.domain;
  const double t_min = cfg.t_values()[1];
  SearchProblem p;
  p.name = "slope_inequality";
  p.stream = stream_id("phiE_convex");
  p.dim = 2;
  p.with_t = true;
  p.lo = Eigen::Vector2d(U.box().lo[0], U.box().lo[0]);
  p.hi = Eigen::Vector2d(U.box().hi[0], U.box().hi[0]);
  p.sample = [U](SampleStream& s, Eigen::VectorXd& z) {
    auto a = U.sample(s);
    if (!a) return false;
    auto b = U.sample(s);
    if (!b) return false;
    z[0] = (*a)[0];
    z[1] = (*b)[0];
    return true;
  };
  p.eval = [&inst, U, t_min](const Eigen::VectorXd& z, double t) {
    Probe pr;
    if (t < t_min) return pr;
    const Point u1 = z.segment(0, 1);
    const Point u2 = z.segment(1, 1);
    if (!U.contains(u1) || !U.contains(u2)) return pr;
    const double e1 = inst.E(u1)[0];
    const double e2 = inst.E(u2)[0];
    const double gap = std::abs(e1 - e2);
    if (gap < kSlopeSeparation * std::max({1.0, std::abs(e1), std::abs(e2)})) return pr;
    const double x = t * e1 + (1.0 - t) * e2;
    const double h1 = inst.h(Point::Constant(1, e1));
    const double h2 = inst.h(Point::Constant(1, e2));
    pr.admissible = true;
    pr.lhs = (inst.h(Point::Constant(1, x)) - h2) / std::abs(x - e2);
    pr.rhs = inst.phi(h1, h2) / gap;
    pr.points = {u1, u2, Point::Constant(1, x)};
    return pr;
  };
  Report r = run_search(p, cfg, cfg.samples);
  if (r.verdict == Verdict::HoldsOnSamples && r.samples_used == 0) {
    r.verdict = Verdict::PremiseFailed;
    r.notes.push_back("no admissible triple E(mu1) < E(mu) < E(mu2): E collapses the domain");
  }
  return r;
}

Report check_geodesic_E_convex_set(const Manifold& m, const EndoMap& E, const DomainSet& B,
                                   const CheckConfig& cfg) {
  cfg.validate();
  if (!nonempty(B, cfg)) return vacuous("geodesic_E_convex_set", cfg);
  return set_check(native_chart(m, E, B), cfg);
}

Report check_geodesic_phiE_convex_fn(const Instance& inst, const CheckConfig& cfg, bool strict) {
  cfg.validate();
  inst.validate();
  if (!nonempty(inst.domain, cfg)) return vacuous("geodesic_phiE_convex", cfg);
  const Chart c = native_chart(inst.manifold, inst.E, inst.domain);
  const ScalarFn h = inst.h;
  return with_set_premise(set_check(c, cfg), c, [h](const Point& p) { return h(p); }, inst.phi,
                          cfg, strict);
}

Report check_geodesic_phiE_convex_set(const Manifold& m, const EndoMap& E,
                                      const Bifunction& phi, const ProductSet& S,
                                      const CheckConfig& cfg) {
  cfg.validate();
  if (!(S.base.manifold() == m)) {
    throw Error(ErrorKind::InvalidArgument, "product set lives on a different manifold");
  }
  if (!nonempty(S.base, cfg)) return vacuous("geodesic_phiE_convex_set", cfg);
  const int k = m.ambient_dim();
  const InverseSearchOptions opts{cfg.seed, std::min<std::int64_t>(cfg.samples, 256), kInverseTol};
  auto validated_E = [m, E](const Point& p) {
    Point q = E(p);
    if (!m.is_valid(q)) {
      throw Error(ErrorKind::InvalidPoint, "E maps a set point outside " + m.name());
    }
    return q;
  };
  auto lift = [](const Point& u, double v) {
    Point out(u.size() + 1);
    out << u, v;
    return out;
  };

  SearchProblem p;
  p.name = "geodesic_phiE_convex_set";
  p.stream = stream_id(p.name);
  p.dim = 2 * k + 2;
  p.with_t = true;
  p.lo.resize(p.dim);
  p.hi.resize(p.dim);
  // Sampled v may sit outside [v_lo, v_hi] (anchored sets); widen the
  // refinement bounds to cover what the sampler produces.
  double v_lo = S.v_lo, v_hi = S.v_hi;
  for (int i = 0; i < kBoundsDraws; ++i) {
    SampleStream s(cfg.seed, stream_id("product-bounds"), static_cast<std::uint64_t>(i));
    try {
      if (auto a = S.sample(s)) {
        v_lo = std::min(v_lo, a->v);
        v_hi = std::max(v_hi, a->v);
      }
    } catch (const Error&) {
      // the search itself reports sampling failures
    }
  }
  const double v_pad = 0.1 * (v_hi - v_lo);
  v_lo -= v_pad;
  v_hi += v_pad;
  p.lo << S.base.box().lo, v_lo, S.base.box().lo, v_lo;
  p.hi << S.base.box().hi, v_hi, S.base.box().hi, v_hi;
  p.sample = [S](SampleStream& s, Eigen::VectorXd& z) {
    auto a = S.sample(s);
    if (!a) return false;
    auto b = S.sample(s);
    if (!b) return false;
    z << a->z, a->v, b->z, b->v;
    return true;
  };
  p.eval = [S, m, k, phi, opts, validated_E, lift](const Eigen::VectorXd& z, double t) {
    Probe pr;
    Point z1, z2;
    try {
      z1 = m.project(z.segment(0, k));
      z2 = m.project(z.segment(k + 1, k));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidPoint) return pr;
      throw;
    }
    if (!S.base.contains(z1) || !S.base.contains(z2)) return pr;
    const double v1 = z[k];
    const double v2 = z[2 * k + 1];
    const Point u1 = S.image_map ? Point((*S.image_map)(z1)) : z1;
    const Point u2 = S.image_map ? Point((*S.image_map)(z2)) : z2;
    if (!m.is_valid(u1) || !m.is_valid(u2)) return pr;
    if (S.graph_value(u1, v1) < 0.0 || S.graph_value(u2, v2) < 0.0) return pr;
    Point g = m.geodesic(validated_E(u1), validated_E(u2), t);
    const double w = v2 + t * phi(v1, v2);
    pr.admissible = true;
    pr.lhs = S.depth(g, w, opts);
    pr.rhs = 0.0;
    pr.points = {lift(u1, v1), lift(u2, v2), lift(g, w)};
    return pr;
  };
  return run_search(p, cfg, cfg.samples);
}

EpigraphMembership::EpigraphMembership(Instance inst, InverseSearchOptions opts, CheckConfig cfg)
    : inst_(std::move(inst)), opts_(opts), cfg_(cfg) {}

bool EpigraphMembership::operator()(const Point& u, double v) const {
  const double d = image_distance(inst_.E, inst_.domain, u, opts_);
  if (!(d <= opts_.tol)) {
    throw Error(ErrorKind::InverseSearchFailed,
                "no preimage under E found in the domain (closest image at distance " +
                    std::to_string(d) + ")");
  }
  return inst_.h(u) <= v + cfg_.threshold(v);
}

EpigraphMembership epigraph_membership(const Instance& inst, const CheckConfig& cfg) {
  cfg.validate();
  inst.validate();
  return {inst, InverseSearchOptions{cfg.seed, cfg.samples, kInverseTol}, cfg};
}

Report check_inverse_pair(const Diffeo& d, const DomainSet& B, const CheckConfig& cfg) {
  cfg.validate();
  if (!(B.manifold() == d.source)) {
    throw Error(ErrorKind::InvalidArgument, "domain does not live on the chart's source");
  }
  SearchProblem p;
  p.name = "diffeo_inverse_pair";
  p.stream = stream_id(p.name);
  p.dim = B.manifold().ambient_dim();
  p.with_t = false;
  p.lo = B.box().lo;
  p.hi = B.box().hi;
  p.sample = [B](SampleStream& s, Eigen::VectorXd& z) {
    auto x = B.sample(s);
    if (!x) return false;
    z = *x;
    return true;
  };
  p.eval = [B, d](const Eigen::VectorXd& z, double) {
    Probe pr;
    Point x;
    try {
      x = B.manifold().project(z);
    } catch (const Error&) {
      return pr;
    }
    if (!B.contains(x)) return pr;
    const Point y = d.H(x);
    const double back = (d.Hinv(y) - x).norm();
    const double forth = (d.H(d.Hinv(y)) - y).norm();
    pr.admissible = true;
    pr.lhs = std::max(back, forth);
    pr.rhs = kInverseTol;
    pr.points = {x, y};
    return pr;
  };
  return run_search(p, cfg, cfg.samples);
}

namespace {

struct TransportedChart {
  Chart chart;
  ScalarFn h;
};

TransportedChart transported_chart(const Instance& inst, const Diffeo& d, const CheckConfig& cfg) {
  if (!(inst.manifold == d.source)) {
    throw Error(ErrorKind::InvalidArgument, "instance does not live on the chart's source");
  }
  const DomainSet B = inst.domain;
  const Manifold src = inst.manifold;
  const Manifold dst = d.target;
  const EndoMap H = d.H;
  const EndoMap Hinv = d.Hinv;
  const EndoMap E_t = H.compose(inst.E.compose(Hinv));

  Chart c;
  c.manifold = dst;
  c.k = dst.ambient_dim();
  c.sample = [B, H](SampleStream& s) -> std::optional<Point> {
    auto x = B.sample(s);
    if (!x) return std::nullopt;
    return H(*x);
  };
  c.contains = [B, Hinv, src](const Point& y) {
    const Point x = Hinv(y);
    return src.is_valid(x) && B.contains(x);
  };
  c.depth = [B, Hinv](const Point& y) { return B.depth(Hinv(y)); };
  c.project = [dst](const Point& y) { return dst.project(y); };
  c.E = [E_t, dst](const Point& y) {
    Point q = E_t(y);
    if (!dst.is_valid(q)) {
      throw Error(ErrorKind::InvalidPoint, "E' maps a point outside " + dst.name());
    }
    return q;
  };
  c.geodesic = [H, Hinv, src](const Point& a, const Point& b, double t) {
    return H(src.geodesic(src.project(Hinv(a)), src.project(Hinv(b)), t));
  };
  c.distance = [Hinv, src](const Point& a, const Point& b) {
    return src.distance(src.project(Hinv(a)), src.project(Hinv(b)));
  };
  c.extend = [H, Hinv, src](const Point& a, const Point& b, double eps) {
    return H(extend_on(src, src.project(Hinv(a)), src.project(Hinv(b)), eps));
  };
  // Refinement bounds: bounding box of sampled images, padded by 10%.
  c.lo = Eigen::VectorXd::Constant(c.k, std::numeric_limits<double>::infinity());
  c.hi = -c.lo;
  const std::uint64_t stream = stream_id("chart-bounds");
  for (int i = 0; i < kBoundsDraws; ++i) {
    SampleStream s(cfg.seed, stream, static_cast<std::uint64_t>(i));
    if (auto y = c.sample(s)) {
      c.lo = c.lo.cwiseMin(*y);
      c.hi = c.hi.cwiseMax(*y);
    }
  }
  if (!c.lo.allFinite()) {
    c.lo.setConstant(-1.0);
    c.hi.setConstant(1.0);
  }
  const Eigen::VectorXd pad = 0.1 * (c.hi - c.lo) + Eigen::VectorXd::Constant(c.k, 1e-9);
  c.lo -= pad;
  c.hi += pad;
  c.scale = (c.hi - c.lo).norm();
  return {std::move(c),
          ScalarFn::from_expr(Hinv.pull_back(inst.h.expr), inst.h.label + " o H^-1")};
}

}  // namespace

Report check_geodesic_phiE_convex_fn_transported(const Instance& inst, const Diffeo& d,
                                                 const CheckConfig& cfg, bool strict) {
  cfg.validate();
  inst.validate();
  if (!nonempty(inst.domain, cfg)) return vacuous("transported_geodesic_phiE_convex", cfg);
  const TransportedChart tc = transported_chart(inst, d, cfg);
  const ScalarFn h_t = tc.h;
  Report r = with_set_premise(set_check(tc.chart, cfg), tc.chart,
                              [h_t](const Point& y) { return h_t(y); }, inst.phi, cfg, strict);
  r.check = "transported_" + r.check;
  r.notes.push_back("transported through '" + d.name +
                    "' with E' = H o E o H^-1 and geodesics H o gamma");
  return r;
}

Report check_lipschitz_bound(const Instance& inst, double L, double eps, const CheckConfig& cfg,
                             const Diffeo* chart) {
  cfg.validate();
  inst.validate();
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  Chart c;
  ScalarFn h = inst.h;
  if (chart) {
    TransportedChart tc = transported_chart(inst, *chart, cfg);
    c = std::move(tc.chart);
    h = std::move(tc.h);
  } else {
    c = native_chart(inst.manifold, inst.E, inst.domain);
  }
  SearchProblem p = pair_problem("lipschitz_bound", "lipschitz_bound", c, false);
  p.eval = [c, h, L, eps](const Eigen::VectorXd& z, double) {
    Probe pr;
    auto pair = member_pair(c, z);
    if (!pair) return pr;
    const Point p1 = c.E(pair->first);
    const Point p2 = c.E(pair->second);
    const double d = c.distance(p1, p2);
    if (!(d > 0.0)) return pr;
    Point p3;
    try {
      p3 = c.extend(p1, p2, eps);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::AntipodalPoints || e.kind() == ErrorKind::InvalidArgument ||
          e.kind() == ErrorKind::InvalidPoint) {
        return pr;
      }
      throw;
    }
    if (!c.contains(p3)) return pr;
    pr.admissible = true;
    pr.lhs = std::abs(h(p1) - h(p2));
    pr.rhs = L * d;
    pr.points = {p1, p2, std::move(p3)};
    return pr;
  };
  if (!nonempty(inst.domain, cfg)) return vacuous("lipschitz_bound", cfg);
  return run_search(p, cfg, cfg.samples);
}

}  // namespace geoconvex
