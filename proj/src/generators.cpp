#include "geoconvex/generators.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "geoconvex/error.hpp"
#include "geoconvex/search.hpp"

namespace geoconvex::gen {
namespace {

class Draw {
 public:
  Draw(std::uint64_t seed, const char* family, std::uint64_t index)
      : s_(seed, stream_id(family), index) {}

  double uniform(double lo, double hi) { return s_.uniform(lo, hi); }
  // Rounded to a 1/1000 grid so that generated expressions stay readable.
  double nice(double lo, double hi) { return std::round(s_.uniform(lo, hi) * 1000.0) / 1000.0; }
  int pick(int n) { return std::min(n - 1, static_cast<int>(s_.uniform() * n)); }
  bool coin(double p) { return s_.uniform() < p; }

 private:
  SampleStream s_;
};

std::string num(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string out(buf, res.ptr);
  return x < 0.0 ? "(" + out + ")" : out;
}

std::string var(int i) { return "x" + std::to_string(i + 1); }

struct Frame {
  int dim = 1;
  Box box;
  std::vector<std::string> E;
};

Frame convex_frame(Draw& d, int dim, bool allow_contraction) {
  Frame f;
  f.dim = dim;
  const double c = d.nice(-1.0, 1.0);
  const double L = d.nice(1.0, 2.0);
  f.box = Box::cube(dim, c - L, c + L);
  const bool contract = allow_contraction && d.coin(0.4);
  const double a = d.nice(0.3, 0.9);
  for (int i = 0; i < dim; ++i) {
    if (!contract) {
      f.E.push_back(var(i));
      continue;
    }
    const double room = 0.9 * (1.0 - a) * L;
    const double shift = d.nice(-room, room);
    f.E.push_back(num(a) + "*(" + var(i) + " - " + num(c) + ") + " + num(c + shift));
  }
  return f;
}

// A sum of one to three convex terms in the frame's coordinates.
std::string convex_h(Draw& d, const Frame& f) {
  const int terms = 1 + d.pick(3);
  std::string h;
  for (int j = 0; j < terms; ++j) {
    const int i = d.pick(f.dim);
    const std::string x = var(i);
    const double m = d.nice(f.box.lo[i], f.box.hi[i]);
    std::string term;
    switch (d.pick(6)) {
      case 0: term = num(d.nice(0.2, 2.0)) + "*(" + x + " - " + num(m) + ")^2"; break;
      case 1: term = num(d.nice(0.1, 1.0)) + "*exp(" + num(d.nice(-1.5, 1.5)) + "*" + x + ")"; break;
      case 2:
        term = num(d.nice(0.2, 1.5)) + "*log(1 + exp(" + num(d.nice(-2.0, 2.0)) + "*" + x + "))";
        break;
      case 3: term = num(d.nice(0.2, 1.5)) + "*abs(" + x + " - " + num(m) + ")"; break;
      case 4: term = num(d.nice(0.1, 1.0)) + "*(" + x + " - " + num(m) + ")^4"; break;
      default: term = num(d.nice(-1.0, 1.0)) + "*" + x; break;
    }
    h += (h.empty() ? "" : " + ") + term;
  }
  return h;
}

Instance frame_instance(const Frame& f, const std::string& h, const std::string& label) {
  const Manifold m = Manifold::euclidean(f.dim);
  Instance inst = Instance::make(m, h, f.E, "a - b", DomainSet(m, f.box));
  inst.label = label;
  return inst;
}

std::string label(const char* family, std::uint64_t index) {
  return std::string(family) + "#" + std::to_string(index);
}

}  // namespace

Instance line_instance(std::uint64_t seed, std::uint64_t index) {
  Draw d(seed, "gen/line", index);
  const double lo = d.nice(-2.0, 1.0);
  const double hi = lo + d.nice(0.5, 3.0);
  std::string h;
  if (d.coin(0.6)) {
    h = num(d.nice(-2.0, 2.0)) + " + " + num(d.nice(-2.0, 2.0)) + "*x1 + " +
        num(d.nice(-2.0, 2.0)) + "*x1^2";
    if (d.coin(0.5)) h += " + " + num(d.nice(-1.0, 1.0)) + "*x1^3";
  } else {
    h = num(d.nice(-1.5, 1.5)) + "*exp(" + num(d.nice(-1.5, 1.5)) + "*x1) + " +
        num(d.nice(-1.0, 1.0)) + "*x1";
  }
  std::string E = "x1";
  if (!d.coin(0.25)) {
    const double a = (d.coin(0.5) ? 1.0 : -1.0) * d.nice(0.2, 1.0);
    const double w = std::abs(a) * (hi - lo);
    const double mid = 0.5 * (lo + hi);
    const double margin = 1e-6 * (hi - lo);
    const double center = d.uniform(lo + 0.5 * w + margin, hi - 0.5 * w - margin);
    E = num(a) + "*(x1 - " + num(mid) + ") + " + num(center);
  }
  const double p = std::round(d.uniform(-0.5, 2.5) * 4.0) / 4.0;
  const double q = std::round(d.uniform(-2.5, 0.5) * 4.0) / 4.0;
  Instance inst = Instance::make(Manifold::euclidean(1), h, {E},
                                 num(p) + "*a + " + num(q) + "*b", DomainSet::interval(lo, hi));
  inst.label = label("line", index);
  return inst;
}

Instance epigraph_instance(std::uint64_t seed, std::uint64_t index) {
  Draw d(seed, "gen/epigraph", index);
  const double L = d.nice(1.0, 2.0);
  std::string E;
  switch (d.pick(3)) {
    case 0: E = "x1"; break;
    case 1: E = num(d.nice(-L, L)); break;
    default: E = "abs(x1)"; break;
  }
  std::string phi;
  if (d.coin(0.2)) {
    phi = "max(a - b, 0)";
  } else {
    const double p = std::round(d.uniform(0.0, 2.0) * 4.0) / 4.0;
    const double q = std::round(d.uniform(-1.0, 1.0) * 4.0) / 4.0;
    phi = num(p) + "*a + " + num(q) + "*b";
  }
  const double m = d.nice(-L, L);
  const double c = d.nice(0.2, 2.0);
  std::string h;
  switch (d.pick(6)) {
    case 0: h = num(c) + "*(x1 - " + num(m) + ")^2"; break;
    case 1: h = "-" + num(c) + "*(x1 - " + num(m) + ")^2"; break;
    case 2: h = num(c) + "*x1^3"; break;
    case 3: h = "exp(" + num(d.nice(-1.5, 1.5)) + "*x1)"; break;
    case 4: h = num(c) + "*sin(x1)"; break;
    default: h = num(c) + "*abs(x1 - " + num(m) + ")"; break;
  }
  Instance inst =
      Instance::make(Manifold::euclidean(1), h, {E}, phi, DomainSet::interval(-L, L));
  inst.label = label("epigraph", index);
  return inst;
}

Instance convex_instance(std::uint64_t seed, std::uint64_t index) {
  Draw d(seed, "gen/convex", index);
  const Frame f = convex_frame(d, 1 + static_cast<int>(index % 2), true);
  return frame_instance(f, convex_h(d, f), label("convex", index));
}

LineCase smooth_line_case(std::uint64_t seed, std::uint64_t index) {
  Draw d(seed, "gen/smooth-line", index);
  const double lo = d.nice(-3.0, 1.0);
  const double hi = lo + d.nice(1.0, 4.0);
  const double m = d.nice(lo - 1.0, hi + 1.0);
  const double c = d.nice(0.2, 2.0);
  std::string h;
  switch (d.pick(4)) {
    case 0: h = num(c) + "*(x1 - " + num(m) + ")^2 + " + num(d.nice(-1.0, 1.0)) + "*x1"; break;
    case 1: h = num(c) + "*exp(" + num(d.nice(-1.5, 1.5)) + "*x1)"; break;
    case 2: {
      const std::string k = num(d.nice(0.3, 1.5));
      const std::string y = "(x1 - " + num(m) + ")";
      h = num(0.5 * c) + "*(exp(" + k + "*" + y + ") + exp(-" + k + "*" + y + "))";
      break;
    }
    default: h = "(x1 - " + num(m) + ")^4 + " + num(c) + "*(x1 - " + num(m) + ")^2"; break;
  }
  std::string phi = "a - b";
  switch (d.pick(4)) {
    case 0: phi = "2*(a - b)"; break;
    case 1: phi = "a - b + " + num(d.nice(0.0, 1.0)); break;
    default: break;
  }
  LineCase out{Instance::make(Manifold::euclidean(1), h, {"x1"}, phi,
                              DomainSet::interval(lo, hi)),
               d.uniform(lo, hi), d.uniform(lo, hi), {}};
  out.inst.label = label("smooth-line", index);
  // Three sorted points at least 5% of the width apart.
  const double w = hi - lo;
  const double a = d.uniform(lo, hi - 0.1 * w);
  const double b = d.uniform(a + 0.05 * w, hi - 0.05 * w);
  const double e = d.uniform(b + 0.05 * w, hi);
  out.mu = {a, b, e};
  return out;
}

const char* to_string(ClosureFamily f) {
  switch (f) {
    case ClosureFamily::Scaling: return "Scaling";
    case ClosureFamily::Sum: return "Sum";
    case ClosureFamily::WeightedSum: return "WeightedSum";
    case ClosureFamily::Composition: return "Composition";
    case ClosureFamily::Intersection: return "Intersection";
  }
  return "?";
}

ClosureCase closure_case(ClosureFamily family, std::uint64_t seed, std::uint64_t index) {
  Draw d(seed, "gen/closure", index * 8 + static_cast<std::uint64_t>(family));
  const int dim = 1 + static_cast<int>(index % 2);
  ClosureCase c;
  c.family = family;
  const Frame f = convex_frame(d, dim, family != ClosureFamily::Intersection);
  const std::string tag = label(to_string(family), index);
  auto add = [&](int n) {
    for (int i = 0; i < n; ++i) {
      c.insts.push_back(frame_instance(f, convex_h(d, f), tag + "/h" + std::to_string(i + 1)));
    }
  };
  switch (family) {
    case ClosureFamily::Scaling:
      add(1);
      c.weights = {d.nice(0.0, 5.0)};
      break;
    case ClosureFamily::Sum: add(2 + d.pick(2)); break;
    case ClosureFamily::WeightedSum:
      add(2 + d.pick(3));
      for (std::size_t i = 0; i < c.insts.size(); ++i) c.weights.push_back(d.nice(0.0, 3.0));
      break;
    case ClosureFamily::Composition: {
      add(1);
      static const char* kOuter[] = {"exp(x1)", "x1", "log(1 + exp(x1))", "if(x1 > 0, x1^2, 0)",
                                     "2*x1 + 1", "exp(0.5*x1) + x1"};
      c.outer = ScalarFn::parse(kOuter[d.pick(6)], 1, "h2");
      break;
    }
    case ClosureFamily::Intersection:
      add(2 + d.pick(2));
      for (const auto& inst : c.insts) c.sets.push_back(ProductSet::epigraph(inst));
      break;
  }
  c.manifold = c.insts.front().manifold;
  c.E = c.insts.front().E;
  c.phi = c.insts.front().phi;
  return c;
}

TheoremReport verify_case(const ClosureCase& c, const CheckConfig& cfg) {
  switch (c.family) {
    case ClosureFamily::Scaling: return verify_closure(ClosureKind::Scaling, c.insts, c.weights, cfg);
    case ClosureFamily::Sum: return verify_closure(ClosureKind::Sum, c.insts, {}, cfg);
    case ClosureFamily::WeightedSum:
      return verify_closure(ClosureKind::WeightedSum, c.insts, c.weights, cfg);
    case ClosureFamily::Composition: return verify_composition(c.insts.front(), *c.outer, cfg);
    case ClosureFamily::Intersection: return verify_intersection(c.manifold, c.E, c.phi, c.sets, cfg);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown closure family");
}

}  // namespace geoconvex::gen
