#pragma once

#include "geoconvex/algebra.hpp"
#include "geoconvex/diffeo.hpp"
#include "geoconvex/report.hpp"

namespace geoconvex {

/// h(t E(u1) + (1 - t) E(u2)) <= h(E(u2)) + t phi(h(E(u1)), h(E(u2))) on an
/// interval of the real line.
Report check_phiE_convex_interval(const Instance& inst, const CheckConfig& cfg);

/// Slope form of the interval inequality. For E(u1) < x < E(u2):
///
///   [h(E u2) - h(x)] / [E u2 - x] >= phi(h(E u1), h(E u2)) / [E u1 - E u2]
///
/// and the mirrored statement when E(u1) > E(u2). Samples share the stream of
/// check_phiE_convex_interval; pairs whose images nearly coincide are skipped.
/// PremiseFailed when no admissible triple exists (e.g. constant E).
Report check_slope_inequality(const Instance& inst, const CheckConfig& cfg);

/// The geodesic between E(mu1) and E(mu2) stays in B for sampled member pairs.
/// The length condition d(E mu1, E mu2) = d(mu1, mu2) is reported as the flag
/// "length_condition" and does not affect the verdict.
Report check_geodesic_E_convex_set(const Manifold& m, const EndoMap& E, const DomainSet& B,
                                   const CheckConfig& cfg);

/// h(gamma_{E mu1, E mu2}(t)) <= h(E mu2) + t phi(h(E mu1), h(E mu2)), after
/// checking that the domain is a geodesic E-convex set. In strict mode the
/// inequality must be strict for t inside the grid interior whenever the
/// images are apart.
Report check_geodesic_phiE_convex_fn(const Instance& inst, const CheckConfig& cfg,
                                     bool strict = false);

/// For sampled members (u1, v1), (u2, v2) of S:
/// (gamma_{E u1, E u2}(t), v2 + t phi(v1, v2)) must be a member of S.
Report check_geodesic_phiE_convex_set(const Manifold& m, const EndoMap& E,
                                      const Bifunction& phi, const ProductSet& S,
                                      const CheckConfig& cfg);

/// Membership predicate of {(u, v) in E(B) x R : h(u) <= v}.
class EpigraphMembership {
 public:
  EpigraphMembership(Instance inst, InverseSearchOptions opts, CheckConfig cfg);

  /// Throws Error(InverseSearchFailed) when u has no preimage in the domain.
  bool operator()(const Point& u, double v) const;

 private:
  Instance inst_;
  InverseSearchOptions opts_;
  CheckConfig cfg_;
};

EpigraphMembership epigraph_membership(const Instance& inst, const CheckConfig& cfg);

/// H o H^-1 = id and H^-1 o H = id within 1e-8 on samples of B and H(B).
Report check_inverse_pair(const Diffeo& d, const DomainSet& B, const CheckConfig& cfg);

/// The instance carried through a chart map: points y = H(x), function
/// h o H^-1, map E' = H o E o H^-1, domain H(B) and geodesics H o gamma.
Report check_geodesic_phiE_convex_fn_transported(const Instance& inst, const Diffeo& d,
                                                 const CheckConfig& cfg, bool strict = false);

/// |h(p1) - h(p2)| <= L d(p1, p2) for p_i = E(mu_i), over pairs where the
/// point at distance eps beyond p2 (continuing the geodesic from p1) is still
/// in the domain. With a chart every quantity is read through it.
Report check_lipschitz_bound(const Instance& inst, double L, double eps, const CheckConfig& cfg,
                             const Diffeo* chart = nullptr);

}  // namespace geoconvex
