#include "geoconvex/theorems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "geoconvex/error.hpp"
#include "geoconvex/search.hpp"

namespace geoconvex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMeanValueGrid = 64;
constexpr int kGoldenSteps = 40;
constexpr std::int64_t kMeanValueBudget = 10'000;
constexpr int kHarvestPairs = 64;
constexpr int kRangeDraws = 4096;
constexpr int kDeviationPairs = 1024;
constexpr std::int64_t kLocalMinDirections = 4096;
constexpr std::array<double, 3> kLocalMinLadder{1e-2, 1e-3, 1e-4};

const std::array<std::pair<TheoremId, const char*>, 17> kNames{{
    {TheoremId::MeanValue31, "MeanValue31"},
    {TheoremId::ThreePoint32, "ThreePoint32"},
    {TheoremId::Scaling41a, "Scaling41a"},
    {TheoremId::Sum41b, "Sum41b"},
    {TheoremId::Composition, "Composition"},
    {TheoremId::WeightedSum, "WeightedSum"},
    {TheoremId::DiffeoInvariance, "DiffeoInvariance"},
    {TheoremId::ContinuityBound, "ContinuityBound"},
    {TheoremId::SupFamily, "SupFamily"},
    {TheoremId::LocalMin, "LocalMin"},
    {TheoremId::ChartContinuity, "ChartContinuity"},
    {TheoremId::PhiLimit, "PhiLimit"},
    {TheoremId::PhiSeriesLimit, "PhiSeriesLimit"},
    {TheoremId::StrictDifferential, "StrictDifferential"},
    {TheoremId::EpigraphEquiv, "EpigraphEquiv"},
    {TheoremId::Intersection52, "Intersection52"},
    {TheoremId::SupEpigraphCor, "SupEpigraphCor"},
}};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// A single inequality lhs <= rhs evaluated once, reported like a sampled
// check. Strict reports demand lhs < rhs beyond the threshold.
Report scalar_check(std::string name, double lhs, double rhs, std::vector<Point> points,
                    const CheckConfig& cfg, bool strict = false) {
  Report r;
  r.check = std::move(name);
  r.seed = cfg.seed;
  r.samples_used = 1;
  r.max_violation = lhs - rhs;
  const double thr = cfg.threshold(rhs);
  const bool bad = strict ? lhs - rhs >= -thr : lhs - rhs > thr;
  if (bad) {
    r.verdict = Verdict::Violated;
    Witness w;
    w.points = std::move(points);
    w.lhs = lhs;
    w.rhs = rhs;
    w.violation = lhs - rhs;
    w.sample_index = 0;
    w.strict = strict;
    r.witness = w;
  }
  return r;
}

Report labelled(Report r, const std::string& label) {
  if (!label.empty()) r.check += "[" + label + "]";
  return r;
}

void finish(TheoremReport& t) {
  bool premises_ok = true;
  for (const auto& p : t.premise_reports) premises_ok = premises_ok && p.holds();
  t.verdict = premises_ok ? t.conclusion_report.verdict : Verdict::PremiseFailed;
  if (!premises_ok) {
    for (const auto& p : t.premise_reports) {
      if (!p.holds()) {
        t.notes.push_back("premise '" + p.check + "' not satisfied: " + to_string(p.verdict));
        break;
      }
    }
  }
}

Report not_evaluated(std::string name, const std::string& why, const CheckConfig& cfg) {
  Report r;
  r.check = std::move(name);
  r.seed = cfg.seed;
  r.notes.push_back("not evaluated: " + why);
  return r;
}

Expr balanced(Op op, std::vector<Expr> terms) {
  if (terms.empty()) throw Error(ErrorKind::InvalidArgument, "empty combination");
  while (terms.size() > 1) {
    std::vector<Expr> next;
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2) {
      next.push_back(Expr::binary(op, terms[i], terms[i + 1]));
    }
    if (terms.size() % 2 == 1) next.push_back(terms.back());
    terms = std::move(next);
  }
  return terms.front();
}

double h_at(const Instance& inst, double x) { return inst.h(Point::Constant(1, x)); }

void require_line(const Instance& inst, const char* what) {
  if (!(inst.manifold == Manifold::euclidean(1))) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " needs an instance on Euclidean(1)");
  }
}

bool same_family(const Instance& a, const Instance& b) {
  return a.manifold == b.manifold && a.E.sources() == b.E.sources() && a.phi.expr == b.phi.expr &&
         a.domain.box().lo == b.domain.box().lo && a.domain.box().hi == b.domain.box().hi &&
         a.domain.membership().has_value() == b.domain.membership().has_value() &&
         (!a.domain.membership() || *a.domain.membership() == *b.domain.membership());
}

void require_family(const std::vector<Instance>& insts) {
  if (insts.empty()) throw Error(ErrorKind::InvalidArgument, "no instances supplied");
  for (const auto& inst : insts) {
    inst.validate();
    if (!same_family(insts.front(), inst)) {
      throw Error(ErrorKind::InvalidArgument,
                  "instances must share manifold, domain, E and phi");
    }
  }
}

// Range of f over sampled domain points and their E-images.
std::pair<double, double> sampled_range(const Instance& inst, const ScalarFn& f,
                                        const CheckConfig& cfg, bool include_raw) {
  double lo = kInf, hi = -kInf;
  const std::uint64_t stream = stream_id("value-range");
  for (int i = 0; i < kRangeDraws; ++i) {
    SampleStream s(cfg.seed, stream, static_cast<std::uint64_t>(i));
    auto mu = inst.domain.sample(s);
    if (!mu) continue;
    try {
      const double v = f(inst.apply_E(*mu));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (include_raw) {
        const double w = f(*mu);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
    } catch (const Error&) {
    }
  }
  if (!(lo <= hi)) return {0.0, 0.0};
  return {lo, hi};
}

// Sampled problem over single domain points mu (vector of ambient coords).
SearchProblem point_problem(std::string name, const DomainSet& B) {
  SearchProblem p;
  p.name = std::move(name);
  p.stream = stream_id(p.name);
  p.dim = B.manifold().ambient_dim();
  p.with_t = false;
  p.lo = B.box().lo;
  p.hi = B.box().hi;
  p.sample = [B](SampleStream& s, Eigen::VectorXd& z) {
    auto mu = B.sample(s);
    if (!mu) return false;
    z = *mu;
    return true;
  };
  return p;
}

std::optional<Point> member(const DomainSet& B, const Eigen::VectorXd& z) {
  try {
    Point p = B.manifold().project(z);
    if (!B.contains(p)) return std::nullopt;
    return p;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidPoint) return std::nullopt;
    throw;
  }
}

// Sampled problem over pairs (mu1, mu2) of domain points.
SearchProblem pair_point_problem(std::string name, const DomainSet& B) {
  const int k = B.manifold().ambient_dim();
  SearchProblem p;
  p.name = std::move(name);
  p.stream = stream_id(p.name);
  p.dim = 2 * k;
  p.with_t = false;
  p.lo.resize(p.dim);
  p.hi.resize(p.dim);
  p.lo << B.box().lo, B.box().lo;
  p.hi << B.box().hi, B.box().hi;
  p.sample = [B, k](SampleStream& s, Eigen::VectorXd& z) {
    auto a = B.sample(s);
    if (!a) return false;
    auto b = B.sample(s);
    if (!b) return false;
    z.head(k) = *a;
    z.tail(k) = *b;
    return true;
  };
  return p;
}

// phi(h(E mu1), h(E mu2)) <= K on sampled pairs.
Report phi_bound(const Instance& inst, double K, const CheckConfig& cfg) {
  SearchProblem p = pair_point_problem("phi_upper_bound", inst.domain);
  const int k = inst.manifold.ambient_dim();
  p.eval = [&inst, K, k](const Eigen::VectorXd& z, double) {
    Probe pr;
    auto a = member(inst.domain, z.head(k));
    auto b = member(inst.domain, z.tail(k));
    if (!a || !b) return pr;
    const Point e1 = inst.apply_E(*a);
    const Point e2 = inst.apply_E(*b);
    pr.admissible = true;
    pr.lhs = inst.phi(inst.h(e1), inst.h(e2));
    pr.rhs = K;
    pr.points = {*a, *b};
    return pr;
  };
  return run_search(p, cfg, cfg.samples);
}

// f(x) <= f(x + d) for x, x + d in [lo, hi].
Report nondecreasing_on(const ScalarFn& f, double lo, double hi, const CheckConfig& cfg) {
  SearchProblem p;
  p.name = "nondecreasing";
  p.stream = stream_id(p.name);
  p.dim = 2;
  p.with_t = false;
  p.lo = Eigen::Vector2d(lo, lo);
  p.hi = Eigen::Vector2d(hi, hi);
  p.sample = [lo, hi](SampleStream& s, Eigen::VectorXd& z) {
    z[0] = s.uniform(lo, hi);
    z[1] = s.uniform(lo, hi);
    return true;
  };
  p.eval = [f, lo, hi](const Eigen::VectorXd& z, double) {
    Probe pr;
    const double x = std::min(z[0], z[1]);
    const double y = std::max(z[0], z[1]);
    if (x < lo || y > hi) return pr;
    pr.admissible = true;
    pr.lhs = f(Point::Constant(1, x));
    pr.rhs = f(Point::Constant(1, y));
    pr.points = {Point::Constant(1, x), Point::Constant(1, y)};
    return pr;
  };
  return run_search(p, cfg, cfg.samples);
}

// ||E(E mu) - E mu|| <= tol on samples.
Report idempotent_E(const Instance& inst, const CheckConfig& cfg) {
  SearchProblem p = point_problem("E_idempotent", inst.domain);
  p.eval = [&inst](const Eigen::VectorXd& z, double) {
    Probe pr;
    auto mu = member(inst.domain, z);
    if (!mu) return pr;
    const Point e = inst.apply_E(*mu);
    pr.admissible = true;
    pr.lhs = (inst.E(e) - e).norm();
    pr.rhs = 0.0;
    pr.points = {*mu, e};
    return pr;
  };
  return run_search(p, cfg, cfg.samples);
}

Report weights_nonnegative(const std::vector<double>& weights, const CheckConfig& cfg) {
  double worst = 0.0;
  for (double w : weights) worst = std::max(worst, -w);
  Eigen::VectorXd all(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) all[static_cast<Eigen::Index>(i)] = weights[i];
  return scalar_check("weights_nonnegative", worst, 0.0, {all}, cfg);
}

// Golden-section maximization of f on [a, b].
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, int steps) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < steps; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

}  // namespace

std::string to_string(TheoremId id) {
  for (const auto& [k, name] : kNames) {
    if (k == id) return name;
  }
  return "?";
}

TheoremId theorem_from_string(const std::string& name) {
  for (const auto& [k, n] : kNames) {
    if (name == n) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown theorem '" + name + "'");
}

const std::vector<TheoremId>& all_theorems() {
  static const std::vector<TheoremId> ids = [] {
    std::vector<TheoremId> out;
    for (const auto& [k, name] : kNames) out.push_back(k);
    return out;
  }();
  return ids;
}

std::string theorem_summary(TheoremId id) {
  switch (id) {
    case TheoremId::MeanValue31:
      return "derivative pair h'(E a) >= R h'(E b) >= h'(E b) inside (E u2, E u1)";
    case TheoremId::ThreePoint32:
      return "(E m1 - E m3)(h'(E m2) + h'(E m3)) <= phi(h1, h2) + phi(h2, h3)";
    case TheoremId::Scaling41a: return "x h is geodesic phi_E-convex for x >= 0, phi nonneg-linear";
    case TheoremId::Sum41b: return "h1 + h2 is geodesic phi_E-convex for additive phi";
    case TheoremId::Composition: return "h2 o h1 for h1 geodesic E-convex, h2 non-decreasing phi-convex";
    case TheoremId::WeightedSum: return "sum x_i h_i for x_i >= 0, phi nonneg-linear";
    case TheoremId::DiffeoInvariance: return "h o H^-1 on H(B) for a diffeomorphism H";
    case TheoremId::ContinuityBound: return "|h(E m1) - h(E m2)| <= (K / eps) d(E m1, E m2) when phi <= K";
    case TheoremId::SupFamily: return "sup_i h_i for sequentially upper bounded phi";
    case TheoremId::LocalMin: return "phi(h(E m), h(E m*)) >= 0 at a local minimum E(m*)";
    case TheoremId::ChartContinuity: return "the continuity bound read through a chart";
    case TheoremId::PhiLimit: return "convexity survives phi^i -> phi";
    case TheoremId::PhiSeriesLimit: return "convexity survives partial sums of phi^l -> phi";
    case TheoremId::StrictDifferential:
      return "strict convexity and antisymmetric phi give distinct end derivatives";
    case TheoremId::EpigraphEquiv: return "h convex iff its phi_E-epigraph is a convex set";
    case TheoremId::Intersection52: return "intersections of geodesic phi_E-convex sets";
    case TheoremId::SupEpigraphCor: return "sup of a family with convex epigraphs";
  }
  return "?";
}

std::string to_string(ClosureKind kind) {
  switch (kind) {
    case ClosureKind::Scaling: return "Scaling";
    case ClosureKind::Sum: return "Sum";
    case ClosureKind::WeightedSum: return "WeightedSum";
    case ClosureKind::SupFamily: return "SupFamily";
  }
  return "?";
}

// ---------------------------------------------------------------------------

TheoremReport verify_mean_value(const Instance& inst, double u1, double u2,
                                const CheckConfig& cfg) {
  cfg.validate();
  require_line(inst, "the mean-value theorem");
  TheoremReport t;
  t.id = TheoremId::MeanValue31;
  const double e1 = inst.E(Point::Constant(1, u1))[0];
  const double e2 = inst.E(Point::Constant(1, u2))[0];
  const double h1 = h_at(inst, e1);
  const double h2 = h_at(inst, e2);
  const double ph = inst.phi(h1, h2);
  const std::vector<Point> ends{Point::Constant(1, e1), Point::Constant(1, e2)};

  t.premise_reports.push_back(
      scalar_check("distinct_values", -std::abs(h1 - h2), 0.0, ends, cfg, /*strict=*/true));
  t.premise_reports.push_back(check_phiE_convex_interval(inst, cfg));
  t.premise_reports.push_back(scalar_check("phi_dominates_difference", h1 - h2, ph, ends, cfg));

  if (!t.premise_reports.front().holds() || e1 == e2) {
    t.conclusion_report = not_evaluated("mean_value_pair", "R is undefined", cfg);
    finish(t);
    return t;
  }
  const double R = ph / (h1 - h2);
  const double lo = std::min(e1, e2);
  const double hi = std::max(e1, e2);
  std::int64_t evaluations = 0;
  const ScalarFn& h = inst.h;
  auto deriv = [&](double x) {
    evaluations += 2;
    return differentiate_numeric(h, Point::Constant(1, x), Eigen::VectorXd::Ones(1));
  };
  const double cell = (hi - lo) / (kMeanValueGrid + 1);
  std::vector<double> grid, dgrid;
  for (int j = 1; j <= kMeanValueGrid; ++j) {
    grid.push_back(lo + j * cell);
    dgrid.push_back(deriv(grid.back()));
  }
  // alpha: where h' is largest.
  auto jmax = static_cast<std::size_t>(std::max_element(dgrid.begin(), dgrid.end()) - dgrid.begin());
  auto [alpha, A] = golden_max(deriv, std::max(lo + 0.5 * cell, grid[jmax] - cell),
                               std::min(hi - 0.5 * cell, grid[jmax] + cell), kGoldenSteps);
  if (dgrid[jmax] > A) {
    alpha = grid[jmax];
    A = dgrid[jmax];
  }
  // beta: best slack of both inequalities given alpha.
  auto slack_of = [&](double d) { return std::min(A - R * d, R * d - d); };
  std::size_t jb = 0;
  for (std::size_t j = 1; j < dgrid.size(); ++j) {
    if (slack_of(dgrid[j]) > slack_of(dgrid[jb])) jb = j;
  }
  auto [beta, slack] = golden_max([&](double x) { return slack_of(deriv(x)); },
                                  std::max(lo + 0.5 * cell, grid[jb] - cell),
                                  std::min(hi - 0.5 * cell, grid[jb] + cell), kGoldenSteps);
  if (slack_of(dgrid[jb]) >= slack) {
    beta = grid[jb];
    slack = slack_of(dgrid[jb]);
  }
  const double B = deriv(beta);
  t.values = {{"alpha", alpha}, {"beta", beta},         {"R", R},
              {"h_prime_alpha", A}, {"h_prime_beta", B}, {"evaluations", static_cast<double>(evaluations)}};

  // Report the tighter of the two inequalities as lhs <= rhs.
  const bool first = A - R * B <= R * B - B;
  const double lhs = first ? R * B : B;
  const double rhs = first ? A : R * B;
  Report c = scalar_check("mean_value_pair", lhs, rhs,
                          {Point::Constant(1, alpha), Point::Constant(1, beta)}, cfg);
  c.samples_used = evaluations;
  if (evaluations > kMeanValueBudget) {
    c.notes.push_back("evaluation budget exceeded: " + std::to_string(evaluations));
  }
  t.conclusion_report = std::move(c);
  t.flags["within_budget"] = evaluations <= kMeanValueBudget;
  finish(t);
  return t;
}

TheoremReport verify_three_point(const Instance& inst, double mu1, double mu2, double mu3,
                                 const CheckConfig& cfg) {
  cfg.validate();
  require_line(inst, "the three-point theorem");
  TheoremReport t;
  t.id = TheoremId::ThreePoint32;
  const double e1 = inst.E(Point::Constant(1, mu1))[0];
  const double e2 = inst.E(Point::Constant(1, mu2))[0];
  const double e3 = inst.E(Point::Constant(1, mu3))[0];
  const std::vector<Point> pts{Point::Constant(1, e1), Point::Constant(1, e2),
                               Point::Constant(1, e3)};
  Report order = scalar_check("ordering", std::max(e1 - e2, e2 - e3), 0.0, pts, cfg, true);
  const bool ordered = order.holds();
  t.premise_reports.push_back(std::move(order));
  if (!ordered) {
    t.conclusion_report = not_evaluated("three_point_undivided", "E-images are not ordered", cfg);
    finish(t);
    return t;
  }
  const Instance on_images = inst.with_E(EndoMap::identity(1));
  t.premise_reports.push_back(labelled(
      check_phiE_convex_interval(on_images.with_domain(DomainSet::interval(e1, e2)), cfg), "W1"));
  t.premise_reports.push_back(labelled(
      check_phiE_convex_interval(on_images.with_domain(DomainSet::interval(e2, e3)), cfg), "W2"));

  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  const double d2 = differentiate_numeric(inst.h, pts[1], one);
  const double d3 = differentiate_numeric(inst.h, pts[2], one);
  const double h1 = h_at(inst, e1), h2 = h_at(inst, e2), h3 = h_at(inst, e3);
  const double phis = inst.phi(h1, h2) + inst.phi(h2, h3);
  const double lhs = (e1 - e3) * (d2 + d3);
  t.conclusion_report = scalar_check("three_point_undivided", lhs, phis, pts, cfg);
  t.values = {{"lhs", lhs}, {"rhs", phis}, {"h_prime_2", d2}, {"h_prime_3", d3}};

  const double divided_rhs = phis / (e1 - e3);
  const bool divided_ok = d2 + d3 <= divided_rhs + cfg.threshold(divided_rhs);
  t.flags["divided_form_holds"] = divided_ok;
  t.flags["nonneg_derivative_condition"] = d2 >= 0.0 && d3 >= 0.0;
  t.values["divided_lhs"] = d2 + d3;
  t.values["divided_rhs"] = divided_rhs;
  if (!divided_ok) {
    t.notes.push_back("printed divided form fails: h'(E m2) + h'(E m3) = " + fmt(d2 + d3) +
                      " > " + fmt(divided_rhs));
  }
  if (!t.flags["nonneg_derivative_condition"]) {
    t.notes.push_back("a derivative at E(m2) or E(m3) is negative; the undivided form is not implied");
  }
  finish(t);
  return t;
}

TheoremReport verify_closure(ClosureKind kind, const std::vector<Instance>& insts,
                             const std::vector<double>& weights, const CheckConfig& cfg) {
  cfg.validate();
  require_family(insts);
  TheoremReport t;
  const Instance& base = insts.front();
  for (std::size_t i = 0; i < insts.size(); ++i) {
    t.premise_reports.push_back(labelled(check_geodesic_phiE_convex_fn(insts[i], cfg),
                                         "h" + std::to_string(i + 1)));
  }
  const auto vars = insts.front().h.expr.variables();
  std::vector<Expr> terms;
  Expr combined;
  switch (kind) {
    case ClosureKind::Scaling: {
      t.id = TheoremId::Scaling41a;
      if (insts.size() != 1 || weights.size() != 1) {
        throw Error(ErrorKind::InvalidArgument, "scaling takes one instance and one factor");
      }
      t.premise_reports.push_back(weights_nonnegative(weights, cfg));
      t.premise_reports.push_back(check_nonneg_linear(base.phi, cfg));
      combined = Expr::constant(weights[0], vars) * base.h.expr;
      break;
    }
    case ClosureKind::Sum: {
      t.id = TheoremId::Sum41b;
      if (insts.size() < 2) throw Error(ErrorKind::InvalidArgument, "a sum needs two instances");
      t.premise_reports.push_back(check_additive(base.phi, cfg));
      for (const auto& inst : insts) terms.push_back(inst.h.expr);
      combined = balanced(Op::Add, terms);
      break;
    }
    case ClosureKind::WeightedSum: {
      t.id = TheoremId::WeightedSum;
      if (weights.size() != insts.size()) {
        throw Error(ErrorKind::InvalidArgument, "one weight per instance is required");
      }
      t.premise_reports.push_back(weights_nonnegative(weights, cfg));
      t.premise_reports.push_back(check_nonneg_linear(base.phi, cfg));
      for (std::size_t i = 0; i < insts.size(); ++i) {
        terms.push_back(Expr::constant(weights[i], vars) * insts[i].h.expr);
      }
      combined = balanced(Op::Add, terms);
      break;
    }
    case ClosureKind::SupFamily: {
      t.id = TheoremId::SupFamily;
      // h-value streams at sampled pairs: u_i = h_i(E mu1), v_i = h_i(E mu2).
      std::vector<SequencePair> seqs;
      const std::uint64_t stream = stream_id("sup-family-harvest");
      for (int j = 0; j < kHarvestPairs; ++j) {
        SampleStream s(cfg.seed, stream, static_cast<std::uint64_t>(j));
        auto a = base.domain.sample(s);
        auto b = base.domain.sample(s);
        if (!a || !b) continue;
        SequencePair sp;
        try {
          const Point ea = base.apply_E(*a), eb = base.apply_E(*b);
          for (const auto& inst : insts) {
            sp.u.push_back(inst.h(ea));
            sp.v.push_back(inst.h(eb));
          }
        } catch (const Error&) {
          continue;
        }
        seqs.push_back(std::move(sp));
      }
      if (seqs.empty()) {
        t.premise_reports.push_back(
            not_evaluated("seq_upper_bounded", "no sampled pairs to harvest", cfg));
      } else {
        t.premise_reports.push_back(
            check_seq_upper_bounded(base.phi, EndoMap::identity(1), seqs, cfg));
      }
      for (const auto& inst : insts) terms.push_back(inst.h.expr);
      combined = balanced(Op::Max, terms);
      break;
    }
  }
  const Instance combo = base.with_h(ScalarFn::from_expr(combined, to_string(kind)));
  t.conclusion_report = check_geodesic_phiE_convex_fn(combo, cfg);
  t.notes.push_back("combined function: " + combined.to_string());
  finish(t);
  return t;
}

TheoremReport verify_composition(const Instance& h1, const ScalarFn& h2, const CheckConfig& cfg) {
  cfg.validate();
  h1.validate();
  if (h2.arity() != 1) throw Error(ErrorKind::ArityMismatch, "h2 must be a function of x1");
  TheoremReport t;
  t.id = TheoremId::Composition;
  t.premise_reports.push_back(labelled(
      check_geodesic_phiE_convex_fn(h1.with_phi(Bifunction::difference()), cfg), "h1 E-convex"));
  auto [lo, hi] = sampled_range(h1, h1.h, cfg, true);
  const double pad = 1e-9 + 1e-3 * (hi - lo);
  lo -= pad;
  hi += pad;
  t.values = {{"range_lo", lo}, {"range_hi", hi}};
  t.premise_reports.push_back(labelled(nondecreasing_on(h2, lo, hi, cfg), "h2"));
  const Instance outer{Manifold::euclidean(1),      h2, EndoMap::identity(1), h1.phi,
                       DomainSet::interval(lo, hi), "h2"};
  t.premise_reports.push_back(labelled(check_phiE_convex_interval(outer, cfg), "h2 on range"));
  const Expr composed = h2.expr.substitute(std::vector<Expr>{h1.h.expr});
  t.conclusion_report =
      check_geodesic_phiE_convex_fn(h1.with_h(ScalarFn::from_expr(composed, "h2 o h1")), cfg);
  t.notes.push_back("composed function: " + composed.to_string());
  finish(t);
  return t;
}

TheoremReport verify_diffeo_invariance(const Instance& inst, const Diffeo& d,
                                       const CheckConfig& cfg) {
  cfg.validate();
  TheoremReport t;
  t.id = TheoremId::DiffeoInvariance;
  t.premise_reports.push_back(check_inverse_pair(d, inst.domain, cfg));
  t.premise_reports.push_back(check_geodesic_phiE_convex_fn(inst, cfg));
  t.conclusion_report = check_geodesic_phiE_convex_fn_transported(inst, d, cfg);
  t.notes.push_back("interpretation: the map on the image is E' = H o E o H^-1");
  finish(t);
  return t;
}

TheoremReport verify_continuity_bound(const Instance& inst, double K, double eps,
                                      const CheckConfig& cfg) {
  cfg.validate();
  TheoremReport t;
  t.id = TheoremId::ContinuityBound;
  t.premise_reports.push_back(phi_bound(inst, K, cfg));
  t.premise_reports.push_back(check_geodesic_phiE_convex_fn(inst, cfg));
  const double L = K / eps;
  t.values = {{"L", L}, {"K", K}, {"eps", eps}};
  t.conclusion_report = check_lipschitz_bound(inst, L, eps, cfg);
  finish(t);
  return t;
}

TheoremReport verify_chart_continuity(const Instance& inst, const Diffeo& chart, double K,
                                      double eps, const CheckConfig& cfg) {
  cfg.validate();
  TheoremReport t;
  t.id = TheoremId::ChartContinuity;
  t.premise_reports.push_back(check_inverse_pair(chart, inst.domain, cfg));
  t.premise_reports.push_back(phi_bound(inst, K, cfg));
  t.premise_reports.push_back(check_geodesic_phiE_convex_fn(inst, cfg));
  const double L = K / eps;
  t.values = {{"L", L}, {"K", K}, {"eps", eps}};
  t.conclusion_report = check_lipschitz_bound(inst, L, eps, cfg, &chart);
  t.notes.push_back("chart '" + chart.name + "': h o psi^-1 checked along psi o gamma");
  finish(t);
  return t;
}

TheoremReport verify_local_min(const Instance& inst, const Point& mu_star,
                               const CheckConfig& cfg) {
  cfg.validate();
  inst.validate();
  TheoremReport t;
  t.id = TheoremId::LocalMin;
  const Manifold& m = inst.manifold;
  const DomainSet& B = inst.domain;
  m.validate(mu_star);
  const Point star = inst.apply_E(mu_star);
  const double h_star = inst.h(star);
  CheckConfig probe_cfg = cfg;
  probe_cfg.samples = std::min(cfg.samples, kLocalMinDirections);
  const int k = m.ambient_dim();

  // Interior in the manifold sense: short geodesic steps in every sampled
  // tangent direction stay in B. Touching a face of the chart box is not a
  // boundary on its own (the pole of a cap sits on the face x3 = 1).
  {
    const double r = kLocalMinLadder.back() * B.scale();
    const double star_depth = B.depth(star);
    SearchProblem p;
    p.name = "interior";
    p.stream = stream_id(p.name);
    p.dim = k;
    p.with_t = false;
    p.lo = Eigen::VectorXd::Constant(k, -1.0);
    p.hi = Eigen::VectorXd::Constant(k, 1.0);
    p.sample = [k](SampleStream& s, Eigen::VectorXd& z) {
      for (int i = 0; i < k; ++i) z[i] = s.normal();
      return true;
    };
    p.eval = [&m, &B, star, star_depth, r](const Eigen::VectorXd& z, double) {
      Probe pr;
      Tangent v = z;
      if (m.kind() == ManifoldKind::Sphere) v -= star.dot(v) * star;
      const double n = m.norm(star, v);
      if (!(n > 1e-12)) return pr;
      const Point q = m.exp_map(star, (r / n) * v);
      pr.admissible = true;
      pr.lhs = std::max(star_depth, B.depth(q));
      pr.rhs = 0.0;
      pr.points = {star, q};
      return pr;
    };
    t.premise_reports.push_back(run_search(p, probe_cfg, probe_cfg.samples));
  }
  for (std::size_t j = 0; j < kLocalMinLadder.size(); ++j) {
    const double r = kLocalMinLadder[j] * B.scale();
    SearchProblem p;
    p.name = "local_min_r" + std::to_string(j);
    p.stream = stream_id(p.name);
    p.dim = k;
    p.with_t = false;
    p.lo = Eigen::VectorXd::Constant(k, -1.0);
    p.hi = Eigen::VectorXd::Constant(k, 1.0);
    p.sample = [k](SampleStream& s, Eigen::VectorXd& z) {
      for (int i = 0; i < k; ++i) z[i] = s.normal();
      return true;
    };
    p.eval = [&inst, &m, &B, star, h_star, r](const Eigen::VectorXd& z, double) {
      Probe pr;
      Tangent v = z;
      if (m.kind() == ManifoldKind::Sphere) v -= star.dot(v) * star;
      const double n = m.norm(star, v);
      if (!(n > 1e-12)) return pr;
      const Point q = m.exp_map(star, (r / n) * v);
      if (!B.contains(q)) return pr;
      pr.admissible = true;
      pr.lhs = h_star;
      pr.rhs = inst.h(q);
      pr.points = {star, q};
      return pr;
    };
    Report rep = run_search(p, probe_cfg, probe_cfg.samples);
    if (rep.holds() && rep.samples_used == 0) {
      rep.verdict = Verdict::PremiseFailed;
      rep.notes.push_back("no probe point at this radius lies in the domain");
    }
    t.premise_reports.push_back(std::move(rep));
  }
  t.premise_reports.push_back(check_geodesic_phiE_convex_fn(inst, cfg));

  SearchProblem c = point_problem("local_min_phi_sign", B);
  c.eval = [&inst, &B, h_star](const Eigen::VectorXd& z, double) {
    Probe pr;
    auto mu = member(B, z);
    if (!mu) return pr;
    const Point e = inst.apply_E(*mu);
    pr.admissible = true;
    pr.lhs = -inst.phi(inst.h(e), h_star);
    pr.rhs = 0.0;
    pr.points = {*mu, e};
    return pr;
  };
  t.conclusion_report = run_search(c, cfg, cfg.samples);
  finish(t);
  return t;
}

TheoremReport verify_phi_limit(const Instance& inst, const std::vector<Bifunction>& phis,
                               LimitMode mode, const CheckConfig& cfg) {
  cfg.validate();
  if (phis.empty()) throw Error(ErrorKind::InvalidArgument, "empty bifunction sequence");
  TheoremReport t;
  t.id = mode == LimitMode::Pointwise ? TheoremId::PhiLimit : TheoremId::PhiSeriesLimit;
  std::vector<Bifunction> seq;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (mode == LimitMode::Pointwise) {
      seq.push_back(phis[i]);
    } else {
      std::vector<Expr> terms;
      for (std::size_t l = 0; l <= i; ++l) terms.push_back(phis[l].expr);
      seq.push_back(Bifunction::from_expr(balanced(Op::Add, terms),
                                          "partial sum " + std::to_string(i + 1)));
    }
  }
  for (std::size_t i = 0; i < seq.size(); ++i) {
    t.premise_reports.push_back(
        labelled(check_geodesic_phiE_convex_fn(inst.with_phi(seq[i]), cfg),
                 "phi^" + std::to_string(i + 1)));
  }
  t.conclusion_report = check_geodesic_phiE_convex_fn(inst, cfg);

  // Convergence evidence: sup deviation from the limit on sampled pairs.
  std::vector<double> dev(seq.size(), 0.0);
  const std::uint64_t stream = stream_id("phi-limit-deviation");
  for (int j = 0; j < kDeviationPairs; ++j) {
    SampleStream s(cfg.seed, stream, static_cast<std::uint64_t>(j));
    const double a = s.uniform(-10.0, 10.0);
    const double b = s.uniform(-10.0, 10.0);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      try {
        dev[i] = std::max(dev[i], std::abs(seq[i](a, b) - inst.phi(a, b)));
      } catch (const Error&) {
      }
    }
  }
  const double first = dev.front();
  const double last = dev.back();
  const double peak = *std::max_element(dev.begin(), dev.end());
  bool tail_monotone = true;
  for (std::size_t i = dev.size() - dev.size() / 4; i + 1 < dev.size() && i > 0; ++i) {
    tail_monotone = tail_monotone && dev[i + 1] <= dev[i];
  }
  const bool converged = last <= 1e-9 || (tail_monotone && last <= 0.1 * peak);
  t.flags["converged"] = converged;
  t.values = {{"initial_deviation", first}, {"final_deviation", last}, {"peak_deviation", peak}};
  if (!converged) {
    t.notes.push_back("no convergence evidence: final deviation " + fmt(last) + " from the limit");
  }
  finish(t);
  return t;
}

TheoremReport verify_strict_differential(const Instance& inst, const CheckConfig& cfg,
                                         double strict_tol) {
  cfg.validate();
  inst.validate();
  TheoremReport t;
  t.id = TheoremId::StrictDifferential;
  t.premise_reports.push_back(check_geodesic_phiE_convex_fn(inst, cfg, /*strict=*/true));
  t.premise_reports.push_back(check_antisymmetric(inst.phi, cfg));

  const Manifold& m = inst.manifold;
  const DomainSet& B = inst.domain;
  const int k = m.ambient_dim();
  const double min_sep = 1e-3 * B.scale();
  SearchProblem p = pair_point_problem("strict_differential", B);
  p.eval = [&inst, &m, &B, k, min_sep, strict_tol](const Eigen::VectorXd& z, double) {
    Probe pr;
    auto a = member(B, z.head(k));
    auto b = member(B, z.tail(k));
    if (!a || !b) return pr;
    const Point e1 = inst.apply_E(*a);
    const Point e2 = inst.apply_E(*b);
    if (m.distance(e1, e2) < min_sep) return pr;
    // gamma(1) = E(mu1), gamma(0) = E(mu2).
    const double d1 = differentiate_numeric(inst.h, e1, m.geodesic_velocity(e1, e2, 1.0));
    const double d2 = differentiate_numeric(inst.h, e2, m.geodesic_velocity(e1, e2, 0.0));
    pr.admissible = true;
    pr.strict = true;
    pr.lhs = strict_tol;
    pr.rhs = std::abs(d1 - d2);
    pr.points = {e1, e2};
    return pr;
  };
  t.conclusion_report = run_search(p, cfg, cfg.samples);
  finish(t);
  return t;
}

TheoremReport verify_epigraph_equiv(const Instance& inst, const CheckConfig& cfg) {
  cfg.validate();
  inst.validate();
  TheoremReport t;
  t.id = TheoremId::EpigraphEquiv;
  t.premise_reports.push_back(check_geodesic_E_convex_set(inst.manifold, inst.E, inst.domain, cfg));
  t.premise_reports.push_back(idempotent_E(inst, cfg));
  const ProductSet epi = ProductSet::epigraph(inst);
  auto [lo, hi] = sampled_range(inst, inst.h, cfg, false);
  t.premise_reports.push_back(
      check_phi_nondecreasing(inst.phi, lo - 1.0, hi + 0.5 * (epi.v_hi - epi.v_lo), cfg));

  Report fn = check_geodesic_phiE_convex_fn(inst, cfg);
  Report set = check_geodesic_phiE_convex_set(inst.manifold, inst.E, inst.phi, epi, cfg);
  Report c;
  c.check = "epigraph_agreement";
  c.seed = cfg.seed;
  c.samples_used = fn.samples_used + set.samples_used;
  c.max_violation = std::max(fn.max_violation, set.max_violation);
  const bool decided = [](Verdict v) {
    return v == Verdict::HoldsOnSamples || v == Verdict::Violated;
  }(fn.verdict) && (set.verdict == Verdict::HoldsOnSamples || set.verdict == Verdict::Violated);
  if (fn.verdict == Verdict::DomainError || set.verdict == Verdict::DomainError) {
    c.verdict = Verdict::DomainError;
    c.error = fn.verdict == Verdict::DomainError ? fn.error : set.error;
  } else if (!decided) {
    c.verdict = Verdict::PremiseFailed;
    c.notes.push_back("a sub-check did not reach a verdict");
  } else if (fn.verdict != set.verdict) {
    c.verdict = Verdict::Violated;
    c.witness = fn.witness ? fn.witness : set.witness;
    c.notes.push_back("function check says " + to_string(fn.verdict) + ", epigraph check says " +
                      to_string(set.verdict));
  }
  t.flags["function_holds"] = fn.holds();
  t.flags["epigraph_holds"] = set.holds();
  t.flags["agreement"] = fn.verdict == set.verdict;
  c.premises = {std::move(fn), std::move(set)};
  t.conclusion_report = std::move(c);
  finish(t);
  return t;
}

TheoremReport verify_intersection(const Manifold& m, const EndoMap& E, const Bifunction& phi,
                                  const std::vector<ProductSet>& sets, const CheckConfig& cfg) {
  cfg.validate();
  if (sets.empty()) throw Error(ErrorKind::InvalidArgument, "no sets supplied");
  TheoremReport t;
  t.id = TheoremId::Intersection52;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    t.premise_reports.push_back(labelled(check_geodesic_phiE_convex_set(m, E, phi, sets[i], cfg),
                                         "B" + std::to_string(i + 1)));
  }
  ProductSet all = sets.front();
  for (std::size_t i = 1; i < sets.size(); ++i) all = all.intersect(sets[i]);
  t.conclusion_report = check_geodesic_phiE_convex_set(m, E, phi, all, cfg);
  if (t.conclusion_report.samples_used == 0) {
    t.notes.push_back("intersection has no sampled member pairs; holds vacuously");
  }
  finish(t);
  return t;
}

TheoremReport verify_sup_epigraph(const std::vector<Instance>& insts, const CheckConfig& cfg) {
  cfg.validate();
  require_family(insts);
  TheoremReport t;
  t.id = TheoremId::SupEpigraphCor;
  const Instance& base = insts.front();
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const std::string tag = "h" + std::to_string(i + 1);
    t.premise_reports.push_back(labelled(check_geodesic_phiE_convex_fn(insts[i], cfg), tag));
    t.premise_reports.push_back(labelled(
        check_geodesic_phiE_convex_set(base.manifold, base.E, base.phi,
                                       ProductSet::epigraph(insts[i]), cfg),
        "epi " + tag));
    auto [l, h] = sampled_range(insts[i], insts[i].h, cfg, false);
    lo = std::min(lo, l);
    hi = std::max(hi, h);
  }
  t.premise_reports.push_back(check_phi_nondecreasing(base.phi, lo - 1.0, hi + 10.0, cfg));
  std::vector<Expr> terms;
  for (const auto& inst : insts) terms.push_back(inst.h.expr);
  const Expr sup = balanced(Op::Max, terms);
  t.conclusion_report = check_geodesic_phiE_convex_fn(base.with_h(ScalarFn::from_expr(sup, "sup")), cfg);
  finish(t);
  return t;
}

}  // namespace geoconvex
