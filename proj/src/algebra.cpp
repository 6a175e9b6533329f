#include "geoconvex/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoconvex/error.hpp"
#include "geoconvex/search.hpp"

namespace geoconvex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Bifunction properties are probed on [-R, R]^2 (scales in [0, R]).
constexpr double kBifunctionRange = 10.0;

std::span<const double> coords_of(const Point& p) {
  return {p.data(), static_cast<std::size_t>(p.size())};
}

bool same_domain(const DomainSet& a, const DomainSet& b) {
  if (!(a.manifold() == b.manifold())) return false;
  if (a.box().lo != b.box().lo || a.box().hi != b.box().hi) return false;
  if (a.membership().has_value() != b.membership().has_value()) return false;
  return !a.membership() || *a.membership() == *b.membership();
}

}  // namespace

// ---------------------------------------------------------------------------
// Box

Box Box::cube(int dim, double lo, double hi) {
  return {Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)};
}

bool Box::empty() const { return lo.size() == 0 || (lo.array() > hi.array()).any(); }

double Box::excess(const Point& p) const {
  return std::max((lo - p).maxCoeff(), (p - hi).maxCoeff());
}

double Box::diagonal() const { return (hi - lo).norm(); }

Box Box::intersect(const Box& other) const {
  if (other.dim() != dim()) throw Error(ErrorKind::InvalidArgument, "box dimensions differ");
  return {lo.cwiseMax(other.lo), hi.cwiseMin(other.hi)};
}

Box Box::inset(double eps) const {
  return {(lo.array() + eps).matrix(), (hi.array() - eps).matrix()};
}

// ---------------------------------------------------------------------------
// DomainSet

DomainSet::DomainSet(Manifold manifold, Box box, std::optional<Expr> membership)
    : manifold_(manifold), box_(std::move(box)), membership_(std::move(membership)) {
  if (box_.dim() != manifold_.ambient_dim()) {
    throw Error(ErrorKind::InvalidArgument, "domain box has " + std::to_string(box_.dim()) +
                                                " coordinates but " + manifold_.name() +
                                                " needs " +
                                                std::to_string(manifold_.ambient_dim()));
  }
  if (box_.empty()) throw Error(ErrorKind::InvalidArgument, "domain box is empty");
  if (membership_ &&
      static_cast<int>(membership_->variables().size()) != manifold_.ambient_dim()) {
    throw Error(ErrorKind::ArityMismatch, "membership expression has the wrong arity");
  }
}

DomainSet DomainSet::whole(const Manifold& m, double lo, double hi) {
  if (m.kind() != ManifoldKind::Euclidean) {
    lo = -1.0;
    hi = 1.0;
  }
  return {m, Box::cube(m.ambient_dim(), lo, hi)};
}

DomainSet DomainSet::interval(double lo, double hi) {
  return {Manifold::euclidean(1), Box::cube(1, lo, hi)};
}

bool DomainSet::contains(const Point& p) const {
  if (!manifold_.is_valid(p) || box_.excess(p) > 0.0) return false;
  return !membership_ || membership_->eval(coords_of(p)) > 0.0;
}

double DomainSet::depth(const Point& p) const {
  if (!manifold_.is_valid(p)) return kInf;
  double d = box_.excess(p);
  if (membership_) d = std::max(d, -membership_->eval(coords_of(p)));
  return d;
}

Point DomainSet::draw(SampleStream& s) const {
  const int k = manifold_.ambient_dim();
  Point p(k);
  if (manifold_.kind() == ManifoldKind::Sphere) {
    for (int i = 0; i < k; ++i) p[i] = s.normal();
    const double n = p.norm();
    if (!(n > 0.0)) {
      p.setZero();
      p[0] = 1.0;
      return p;
    }
    return p / n;
  }
  for (int i = 0; i < k; ++i) p[i] = s.uniform(box_.lo[i], box_.hi[i]);
  return p;
}

std::optional<Point> DomainSet::sample(SampleStream& s, int attempts) const {
  for (int i = 0; i < attempts; ++i) {
    Point p = draw(s);
    if (contains(p)) return p;
  }
  return std::nullopt;
}

bool DomainSet::probe_nonempty(std::uint64_t seed, std::int64_t max_draws) const {
  const std::uint64_t stream = stream_id("domain-nonempty");
  for (std::int64_t i = 0; i < max_draws; ++i) {
    SampleStream s(seed, stream, static_cast<std::uint64_t>(i));
    if (contains(draw(s))) return true;
  }
  return false;
}

DomainSet DomainSet::intersect(const DomainSet& other) const {
  if (!(manifold_ == other.manifold_)) {
    throw Error(ErrorKind::InvalidArgument, "cannot intersect domains on different manifolds");
  }
  Box b = box_.intersect(other.box_);
  std::optional<Expr> m;
  if (membership_ && other.membership_) {
    m = Expr::binary(Op::Min, *membership_, *other.membership_);
  } else {
    m = membership_ ? membership_ : other.membership_;
  }
  if (b.empty()) {
    // Keep a valid box but make membership impossible.
    b = Box{b.lo, b.lo};
    m = Expr::constant(-1.0, coordinate_names(manifold_.ambient_dim()));
  }
  return {manifold_, std::move(b), std::move(m)};
}

// ---------------------------------------------------------------------------
// Instance

Instance Instance::make(const Manifold& m, const std::string& h, const std::vector<std::string>& E,
                        const std::string& phi, DomainSet domain) {
  const int k = m.ambient_dim();
  const bool identity = E.empty() || (E.size() == 1 && E.front() == "identity");
  Instance inst{m,
                ScalarFn::parse(h, k),
                identity ? EndoMap::identity(k) : EndoMap::parse(E, k),
                Bifunction::parse(phi),
                std::move(domain),
                {}};
  inst.validate();
  return inst;
}

Instance Instance::line(const std::string& h, const std::string& E, const std::string& phi,
                        double lo, double hi) {
  return make(Manifold::euclidean(1), h, {E}, phi, DomainSet::interval(lo, hi));
}

void Instance::validate() const {
  const int k = manifold.ambient_dim();
  if (h.arity() != k) {
    throw Error(ErrorKind::ArityMismatch, "h must be a function of " + std::to_string(k) +
                                              " coordinates on " + manifold.name());
  }
  if (E.in_dim() != k || E.out_dim() != k) {
    throw Error(ErrorKind::ArityMismatch,
                "E must map " + std::to_string(k) + " coordinates to " + std::to_string(k));
  }
  if (!(domain.manifold() == manifold)) {
    throw Error(ErrorKind::InvalidArgument, "domain lives on a different manifold");
  }
}

Point Instance::apply_E(const Point& p) const {
  Point q = E(p);
  if (!manifold.is_valid(q)) {
    throw Error(ErrorKind::InvalidPoint, "E maps a domain point outside " + manifold.name());
  }
  return q;
}

Instance Instance::with_h(ScalarFn fn) const {
  Instance out = *this;
  out.h = std::move(fn);
  out.validate();
  return out;
}

Instance Instance::with_phi(Bifunction f) const {
  Instance out = *this;
  out.phi = std::move(f);
  return out;
}

Instance Instance::with_E(EndoMap map) const {
  Instance out = *this;
  out.E = std::move(map);
  out.validate();
  return out;
}

Instance Instance::with_domain(DomainSet d) const {
  Instance out = *this;
  out.domain = std::move(d);
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Inverse search

namespace {

// Damped Gauss-Newton on ||E(z) - u||^2 with a central-difference Jacobian;
// iterates stay in B.
double polish_preimage(const EndoMap& E, const DomainSet& B, Point z, const Point& u) {
  const Manifold& m = B.manifold();
  auto residual = [&](const Point& x) -> std::optional<Eigen::VectorXd> {
    try {
      return Eigen::VectorXd(E(x) - u);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  auto r = residual(z);
  if (!r) return kInf;
  double cost = r->squaredNorm();
  double lambda = 1e-3;
  const int n = static_cast<int>(z.size());
  for (int iter = 0; iter < 60 && cost > 1e-30; ++iter) {
    Eigen::MatrixXd J(r->size(), n);
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(z[j]));
      Point zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      auto rp = residual(zp);
      auto rm = residual(zm);
      if (!rp || !rm) {
        ok = false;
        break;
      }
      J.col(j) = (*rp - *rm) / (zp[j] - zm[j]);
    }
    if (!ok) break;
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * *r;
    bool accepted = false;
    for (int tries = 0; tries < 8 && !accepted; ++tries) {
      Eigen::MatrixXd Ad = A;
      Ad.diagonal().array() += lambda * (1.0 + A.diagonal().array());
      const Eigen::VectorXd step = Ad.ldlt().solve(-g);
      Point next = z + step;
      if (m.kind() != ManifoldKind::Euclidean) {
        try {
          next = m.project(next);
        } catch (const Error&) {
          lambda *= 10.0;
          continue;
        }
      }
      if (!next.allFinite() || !B.contains(next)) {
        lambda *= 10.0;
        continue;
      }
      auto rn = residual(next);
      if (rn && rn->squaredNorm() < cost) {
        z = next;
        r = rn;
        cost = rn->squaredNorm();
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) break;
  }
  return std::sqrt(cost);
}

}  // namespace

double image_distance(const EndoMap& E, const DomainSet& B, const Point& u,
                      const InverseSearchOptions& opts) {
  if (E.is_identity()) return std::max(0.0, B.depth(u));
  if (E.is_constant()) {
    return (E(Point::Zero(E.in_dim())) - u).norm();
  }
  if (u.size() == E.in_dim() && B.contains(u)) {
    try {
      if ((E(u) - u).norm() <= opts.tol) return 0.0;  // u is a fixed point of E
    } catch (const Error&) {
    }
  }
  struct Seed {
    double dist;
    std::int64_t index;
    Point z;
  };
  std::vector<Seed> seeds;
  const std::uint64_t stream = stream_id("inverse-search");
  for (std::int64_t i = 0; i < opts.candidates; ++i) {
    SampleStream s(opts.seed, stream, static_cast<std::uint64_t>(i));
    auto z = B.sample(s);
    if (!z) continue;
    double d;
    try {
      d = (E(*z) - u).norm();
    } catch (const Error&) {
      continue;
    }
    seeds.push_back({d, i, *z});
  }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.index < b.index;
  });
  double best = kInf;
  for (std::size_t k = 0; k < std::min<std::size_t>(seeds.size(), 4); ++k) {
    best = std::min(best, seeds[k].dist);
    if (best <= opts.tol) break;
    best = std::min(best, polish_preimage(E, B, seeds[k].z, u));
  }
  return best;
}

// ---------------------------------------------------------------------------
// ProductSet

std::vector<std::string> ProductSet::variables(int k) {
  auto vars = coordinate_names(k);
  vars.emplace_back("v");
  return vars;
}

ProductSet ProductSet::from_graph(DomainSet base, const std::string& graph, double v_lo,
                                  double v_hi, const std::optional<std::string>& anchor) {
  const int k = base.manifold().ambient_dim();
  if (!(v_lo <= v_hi)) throw Error(ErrorKind::InvalidArgument, "empty v range");
  ProductSet s{std::move(base), Expr::parse(graph, variables(k)), v_lo, v_hi, std::nullopt,
               std::nullopt, graph};
  if (anchor) s.anchor = Expr::parse(*anchor, coordinate_names(k));
  return s;
}

ProductSet ProductSet::epigraph(const Instance& inst) {
  const int k = inst.manifold.ambient_dim();
  const auto vars = variables(k);
  // graph(u, v) = v - h(u)
  std::vector<Expr> lift;
  for (int i = 0; i < k; ++i) lift.push_back(Expr::variable(vars[static_cast<std::size_t>(i)], vars));
  const Expr h_lifted = inst.h.expr.substitute(lift);
  ProductSet s{inst.domain, Expr::variable("v", vars) - h_lifted, -10.0, 10.0, inst.h.expr,
               inst.E, "epi(" + inst.h.label + ")"};
  return s;
}

double ProductSet::graph_value(const Point& u, double v) const {
  std::vector<double> xs(u.data(), u.data() + u.size());
  xs.push_back(v);
  return graph.eval(xs);
}

double ProductSet::depth(const Point& u, double v, const InverseSearchOptions& opts) const {
  const double d = image_map ? image_distance(*image_map, base, u, opts) : base.depth(u);
  if (!std::isfinite(d)) return d;
  return std::max(d, -graph_value(u, v));
}

std::optional<ProductSet::Member> ProductSet::sample(SampleStream& s) const {
  auto z = base.sample(s);
  if (!z) return std::nullopt;
  Point u = *z;
  if (image_map) {
    u = (*image_map)(*z);
    base.manifold().validate(u);
  }
  double v;
  if (anchor) {
    const double a = anchor->eval(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
    // Half the samples sit exactly on the boundary, where violations live.
    v = s.uniform() < 0.5 ? a : a + 0.5 * (v_hi - v_lo) * s.uniform();
  } else {
    v = s.uniform(v_lo, v_hi);
  }
  if (graph_value(u, v) < 0.0) return std::nullopt;
  return Member{*z, std::move(u), v};
}

ProductSet ProductSet::intersect(const ProductSet& other) const {
  ProductSet out = *this;
  if (image_map || other.image_map) {
    if (!image_map || !other.image_map || image_map->sources() != other.image_map->sources() ||
        !same_domain(base, other.base)) {
      throw Error(ErrorKind::InvalidArgument,
                  "intersection needs both sets over the same E-image of the same base");
    }
  } else {
    out.base = base.intersect(other.base);
  }
  out.graph = Expr::binary(Op::Min, graph, other.graph);
  out.v_lo = std::max(v_lo, other.v_lo);
  out.v_hi = std::max(out.v_lo, std::min(v_hi, other.v_hi));
  if (anchor && other.anchor) {
    out.anchor = Expr::binary(Op::Max, *anchor, *other.anchor);
  } else {
    out.anchor = anchor ? anchor : other.anchor;
  }
  out.label = label + " & " + other.label;
  return out;
}

// ---------------------------------------------------------------------------
// Bifunction properties

namespace {

SearchProblem bifunction_problem(std::string name, int dim) {
  SearchProblem p;
  p.name = std::move(name);
  p.stream = stream_id(p.name);
  p.dim = dim;
  p.with_t = false;
  p.lo = Eigen::VectorXd::Constant(dim, -kBifunctionRange);
  p.hi = Eigen::VectorXd::Constant(dim, kBifunctionRange);
  p.sample = [dim](SampleStream& s, Eigen::VectorXd& z) {
    for (int i = 0; i < dim; ++i) z[i] = s.uniform(-kBifunctionRange, kBifunctionRange);
    return true;
  };
  return p;
}

Point pair_point(double a, double b) { return Eigen::Vector2d(a, b); }

}  // namespace

Report check_nonneg_homogeneous(const Bifunction& phi, const CheckConfig& cfg) {
  SearchProblem p = bifunction_problem("nonneg_homogeneous", 3);
  p.lo[2] = 0.0;
  p.sample = [](SampleStream& s, Eigen::VectorXd& z) {
    z[0] = s.uniform(-kBifunctionRange, kBifunctionRange);
    z[1] = s.uniform(-kBifunctionRange, kBifunctionRange);
    z[2] = s.uniform(0.0, kBifunctionRange);
    return true;
  };
  p.eval = [&phi](const Eigen::VectorXd& z, double) {
    Probe pr;
    pr.admissible = true;
    pr.two_sided = true;
    pr.lhs = phi(z[2] * z[0], z[2] * z[1]);
    pr.rhs = z[2] * phi(z[0], z[1]);
    pr.points = {pair_point(z[0], z[1])};
    pr.param = z[2];
    return pr;
  };
  return run_search(p, cfg, cfg.samples);
}

Report check_additive(const Bifunction& phi, const CheckConfig& cfg) {
  SearchProblem p = bifunction_problem("additive", 4);
  p.eval = [&phi](const Eigen::VectorXd& z, double) {
    Probe pr;
    pr.admissible = true;
    pr.two_sided = true;
    pr.lhs = phi(z[0] + z[2], z[1] + z[3]);
    pr.rhs = phi(z[0], z[1]) + phi(z[2], z[3]);
    pr.points = {pair_point(z[0], z[1]), pair_point(z[2], z[3])};
    return pr;
  };
  return run_search(p, cfg, cfg.samples);
}

Report check_antisymmetric(const Bifunction& phi, const CheckConfig& cfg) {
  SearchProblem p = bifunction_problem("antisymmetric", 2);
  p.eval = [&phi](const Eigen::VectorXd& z, double) {
    Probe pr;
    pr.admissible = true;
    pr.two_sided = true;
    pr.lhs = phi(z[0], z[1]);
    pr.rhs = -phi(z[1], z[0]);
    pr.points = {pair_point(z[0], z[1])};
    return pr;
  };
  Report r = run_search(p, cfg, cfg.samples);
  r.notes.push_back("antisymmetry read as phi(a, b) = -phi(b, a)");
  return r;
}

Report check_nonneg_linear(const Bifunction& phi, const CheckConfig& cfg) {
  Report homogeneous = check_nonneg_homogeneous(phi, cfg);
  Report additive = check_additive(phi, cfg);
  Report out;
  out.check = "nonneg_linear";
  out.seed = cfg.seed;
  out.samples_used = homogeneous.samples_used + additive.samples_used;
  out.max_violation = std::max(homogeneous.max_violation, additive.max_violation);
  out.verdict = combine(homogeneous.verdict, additive.verdict);
  out.flags["nonneg_homogeneous"] = homogeneous.holds();
  out.flags["additive"] = additive.holds();
  out.flags["nonneg_linear"] = homogeneous.holds() && additive.holds();
  if (out.verdict == Verdict::Violated) {
    out.witness = homogeneous.witness ? homogeneous.witness : additive.witness;
  }
  if (out.verdict == Verdict::DomainError) {
    out.error = !homogeneous.error.empty() ? homogeneous.error : additive.error;
  }
  out.premises = {std::move(homogeneous), std::move(additive)};
  return out;
}

Report check_seq_upper_bounded(const Bifunction& phi, const EndoMap& E,
                               const std::vector<SequencePair>& sequences,
                               const CheckConfig& cfg) {
  if (E.in_dim() != 1 || E.out_dim() != 1) {
    throw Error(ErrorKind::InvalidArgument, "sequential upper bound needs E: R -> R");
  }
  if (sequences.empty()) throw Error(ErrorKind::EmptySequence, "no sequence pairs supplied");
  Report out;
  out.check = "seq_upper_bounded";
  out.seed = cfg.seed;
  out.max_violation = -kInf;
  out.notes.push_back("componentwise reading: sup phi(E u_i, E v_i) <= phi(sup E u_i, sup E v_i)");
  auto apply = [&E](double x) { return E(Eigen::VectorXd::Constant(1, x))[0]; };
  try {
    for (std::size_t k = 0; k < sequences.size(); ++k) {
      const auto& sp = sequences[k];
      if (sp.u.empty() || sp.v.empty()) {
        throw Error(ErrorKind::EmptySequence, "sequence pair " + std::to_string(k) + " is empty");
      }
      if (sp.u.size() != sp.v.size()) {
        throw Error(ErrorKind::InvalidArgument,
                    "sequence pair " + std::to_string(k) + " has different lengths");
      }
      double sup_phi = -kInf, sup_u = -kInf, sup_v = -kInf;
      for (std::size_t i = 0; i < sp.u.size(); ++i) {
        const double eu = apply(sp.u[i]);
        const double ev = apply(sp.v[i]);
        sup_phi = std::max(sup_phi, phi(eu, ev));
        sup_u = std::max(sup_u, eu);
        sup_v = std::max(sup_v, ev);
      }
      const double rhs = phi(sup_u, sup_v);
      const double violation = sup_phi - rhs;
      out.max_violation = std::max(out.max_violation, violation);
      ++out.samples_used;
      if (violation > cfg.threshold(rhs) && !out.witness) {
        Witness w;
        w.points = {Eigen::Map<const Eigen::VectorXd>(sp.u.data(), static_cast<Eigen::Index>(sp.u.size())),
                    Eigen::Map<const Eigen::VectorXd>(sp.v.data(), static_cast<Eigen::Index>(sp.v.size()))};
        w.lhs = sup_phi;
        w.rhs = rhs;
        w.violation = violation;
        w.sample_index = static_cast<std::int64_t>(k);
        out.witness = w;
        out.refined.push_back(w);
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::EmptySequence || e.kind() == ErrorKind::InvalidArgument) throw;
    out.verdict = Verdict::DomainError;
    out.error = std::string(to_string(e.kind())) + ": " + e.what();
    out.witness.reset();
    out.max_violation = 0.0;
    return out;
  }
  out.verdict = out.witness ? Verdict::Violated : Verdict::HoldsOnSamples;
  return out;
}

Report check_phi_nondecreasing(const Bifunction& phi, double lo, double hi,
                               const CheckConfig& cfg) {
  if (!(lo < hi)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double span = hi - lo;
  auto monotone = [&](std::string name, auto fn) {
    SearchProblem p;
    p.name = std::move(name);
    p.stream = stream_id(p.name);
    p.dim = 3;
    p.with_t = false;
    p.lo = Eigen::Vector3d(lo, lo, 0.0);
    p.hi = Eigen::Vector3d(hi, hi, 0.25 * span);
    p.sample = [=](SampleStream& s, Eigen::VectorXd& z) {
      z[0] = s.uniform(lo, hi);
      z[1] = s.uniform(lo, hi);
      z[2] = s.uniform(0.0, 0.25 * span);
      return true;
    };
    // lhs = value at the lower argument, rhs = value after the increase.
    p.eval = [fn](const Eigen::VectorXd& z, double) {
      Probe pr;
      pr.admissible = true;
      const auto [before, after] = fn(z[0], z[1], z[2]);
      pr.lhs = before;
      pr.rhs = after;
      pr.points = {pair_point(z[0], z[1])};
      pr.param = z[2];
      return pr;
    };
    return run_search(p, cfg, cfg.samples);
  };
  Report in_a = monotone("phi_nondecreasing_a", [&phi](double a, double b, double d) {
    return std::make_pair(phi(a, b), phi(a + d, b));
  });
  Report update_b = monotone("phi_update_nondecreasing_b", [&phi](double a, double b, double d) {
    return std::make_pair(b + phi(a, b), b + d + phi(a, b + d));
  });
  Report in_b = monotone("phi_nondecreasing_b", [&phi](double a, double b, double d) {
    return std::make_pair(phi(a, b), phi(a, b + d));
  });

  Report out;
  out.check = "phi_nondecreasing";
  out.seed = cfg.seed;
  out.samples_used = in_a.samples_used + update_b.samples_used;
  out.max_violation = std::max(in_a.max_violation, update_b.max_violation);
  out.verdict = combine(in_a.verdict, update_b.verdict);
  if (out.verdict == Verdict::Violated) out.witness = in_a.witness ? in_a.witness : update_b.witness;
  if (out.verdict == Verdict::DomainError) {
    out.error = !in_a.error.empty() ? in_a.error : update_b.error;
  }
  out.flags["nondecreasing_in_a"] = in_a.holds();
  out.flags["update_nondecreasing_in_b"] = update_b.holds();
  out.flags["nondecreasing_each_argument"] = in_a.holds() && in_b.holds();
  out.notes.push_back("monotonicity read as: v2 + t*phi(v1, v2) non-decreasing in v1 and v2 for t in [0, 1]");
  out.premises = {std::move(in_a), std::move(update_b), std::move(in_b)};
  return out;
}

}  // namespace geoconvex
