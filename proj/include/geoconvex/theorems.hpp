#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoconvex/algebra.hpp"
#include "geoconvex/checker.hpp"
#include "geoconvex/diffeo.hpp"
#include "geoconvex/report.hpp"

namespace geoconvex {

enum class TheoremId {
  MeanValue31,
  ThreePoint32,
  Scaling41a,
  Sum41b,
  Composition,
  WeightedSum,
  DiffeoInvariance,
  ContinuityBound,
  SupFamily,
  LocalMin,
  ChartContinuity,
  PhiLimit,
  PhiSeriesLimit,
  StrictDifferential,
  EpigraphEquiv,
  Intersection52,
  SupEpigraphCor,
};

std::string to_string(TheoremId id);
TheoremId theorem_from_string(const std::string& name);
const std::vector<TheoremId>& all_theorems();
/// One-line statement of what the verifier checks.
std::string theorem_summary(TheoremId id);

/// A theorem checked as premises => conclusion on one concrete instance.
struct TheoremReport {
  TheoremId id = TheoremId::MeanValue31;
  std::vector<Report> premise_reports;
  Report conclusion_report;
  Verdict verdict = Verdict::HoldsOnSamples;
  std::vector<std::string> notes;
  std::map<std::string, bool> flags;
  std::map<std::string, double> values;  // named scalars (witness coordinates, counters)

  bool holds() const { return verdict == Verdict::HoldsOnSamples; }
};

/// E(alpha), E(beta) strictly between E(u2) and E(u1) with
/// h'(E alpha) >= R h'(E beta) >= h'(E beta), R = phi(h1, h2) / (h1 - h2).
/// The search (grid of 64 plus golden refinement) is capped at 1e4
/// evaluations of h, reported as values["evaluations"].
TheoremReport verify_mean_value(const Instance& inst, double u1, double u2,
                                const CheckConfig& cfg);

/// For E(mu1) < E(mu2) < E(mu3):
///   (E mu1 - E mu3)(h'(E mu2) + h'(E mu3)) <= phi(h1, h2) + phi(h2, h3).
/// The printed divided form is evaluated and logged only.
TheoremReport verify_three_point(const Instance& inst, double mu1, double mu2, double mu3,
                                 const CheckConfig& cfg);

enum class ClosureKind { Scaling, Sum, WeightedSum, SupFamily };

std::string to_string(ClosureKind kind);

/// x h, h1 + h2 + ..., sum x_i h_i or max_i h_i of instances sharing the
/// manifold, domain, E and phi.
TheoremReport verify_closure(ClosureKind kind, const std::vector<Instance>& insts,
                             const std::vector<double>& weights, const CheckConfig& cfg);

/// h2 o h1 for h1 geodesic E-convex and h2 non-decreasing and phi-convex on
/// the sampled range of h1.
TheoremReport verify_composition(const Instance& h1, const ScalarFn& h2, const CheckConfig& cfg);

/// h o H^-1 on H(B) with E' = H o E o H^-1.
TheoremReport verify_diffeo_invariance(const Instance& inst, const Diffeo& d,
                                       const CheckConfig& cfg);

/// |h(E mu1) - h(E mu2)| <= (K / eps) d(E mu1, E mu2) on pairs with eps room
/// inside the domain, given phi <= K on sampled h-values.
TheoremReport verify_continuity_bound(const Instance& inst, double K, double eps,
                                      const CheckConfig& cfg);

/// The continuity bound read through a chart map psi.
TheoremReport verify_chart_continuity(const Instance& inst, const Diffeo& chart, double K,
                                      double eps, const CheckConfig& cfg);

/// phi(h(E mu), h(E mu*)) >= 0 on the domain when E(mu*) is a local minimum.
TheoremReport verify_local_min(const Instance& inst, const Point& mu_star,
                               const CheckConfig& cfg);

enum class LimitMode { Pointwise, PartialSums };

/// Convexity under each phi^i (or each partial sum) implies convexity under
/// the instance's phi. Convergence evidence is the flag "converged".
TheoremReport verify_phi_limit(const Instance& inst, const std::vector<Bifunction>& phis,
                               LimitMode mode, const CheckConfig& cfg);

/// Strict convexity plus antisymmetric phi imply distinct derivatives of h
/// along the geodesic at its two ends.
TheoremReport verify_strict_differential(const Instance& inst, const CheckConfig& cfg,
                                         double strict_tol = 1e-6);

/// The function check and the epigraph-set check agree.
TheoremReport verify_epigraph_equiv(const Instance& inst, const CheckConfig& cfg);

/// Intersection of geodesic phi_E-convex sets is geodesic phi_E-convex.
TheoremReport verify_intersection(const Manifold& m, const EndoMap& E, const Bifunction& phi,
                                  const std::vector<ProductSet>& sets, const CheckConfig& cfg);

/// sup_i h_i is geodesic phi_E-convex when every epigraph is a geodesic
/// phi_E-convex set and phi is non-decreasing.
TheoremReport verify_sup_epigraph(const std::vector<Instance>& insts, const CheckConfig& cfg);

}  // namespace geoconvex
