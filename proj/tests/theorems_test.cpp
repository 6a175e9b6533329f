#include <gtest/gtest.h>

#include <cmath>

#include "geoconvex/error.hpp"
#include "geoconvex/generators.hpp"
#include "geoconvex/theorems.hpp"
#include "oracles.hpp"

namespace geoconvex {
namespace {

CheckConfig cfg_n(std::int64_t samples = 3000, std::uint64_t seed = 1) {
  CheckConfig cfg;
  cfg.seed = seed;
  cfg.samples = samples;
  return cfg;
}

Instance line(const std::string& h, const std::string& phi = "a - b", double lo = -2,
              double hi = 2) {
  return Instance::line(h, "x1", phi, lo, hi);
}

DomainSet north_cap() {
  return DomainSet(Manifold::sphere(2), Box::cube(3, -1, 1),
                   Expr::parse("x3 - 0.5", coordinate_names(3)));
}

Instance cap_distance() {
  return Instance::make(Manifold::sphere(2), "acos(x3)^2", {"x1", "x2", "x3"}, "a - b",
                        north_cap());
}

TEST(Catalog, NamesRoundTrip) {
  EXPECT_EQ(all_theorems().size(), 17u);
  for (TheoremId id : all_theorems()) {
    EXPECT_EQ(theorem_from_string(to_string(id)), id);
    EXPECT_FALSE(theorem_summary(id).empty());
  }
  EXPECT_THROW(theorem_from_string("NoSuchTheorem"), Error);
}

TEST(MeanValue, QuadraticWitnessSatisfiesBothInequalities) {
  const TheoremReport t = verify_mean_value(line("x1^2"), 1.0, 0.0, cfg_n());
  EXPECT_EQ(t.verdict, Verdict::HoldsOnSamples);
  EXPECT_DOUBLE_EQ(t.values.at("R"), 1.0);
  const double a = t.values.at("alpha"), b = t.values.at("beta");
  EXPECT_GT(a, 0.0);
  EXPECT_LT(a, 1.0);
  EXPECT_GT(b, 0.0);
  EXPECT_LT(b, 1.0);
  // Oracle derivative 2x.
  EXPECT_GE(2 * a, 1.0 * 2 * b - 1e-6);
  EXPECT_LE(t.values.at("evaluations"), 1e4);
  EXPECT_TRUE(t.flags.at("within_budget"));
}

TEST(MeanValue, ConstantFailsPremise) {
  const TheoremReport t = verify_mean_value(line("3"), 1.0, 0.0, cfg_n());
  EXPECT_EQ(t.verdict, Verdict::PremiseFailed);
}

bool oracle_pair_exists(const Instance& inst, double e1, double e2, double R) {
  return oracle::mean_value_pair_exists(
      [&](double x) { return inst.h(Point::Constant(1, x)); }, e1, e2, R);
}

TEST(MeanValue, ExpWithDoubledDifference) {
  const TheoremReport t =
      verify_mean_value(line("exp(x1)", "2*(a - b)", 0, 1), 1.0, 0.0, cfg_n());
  // phi >= h1 - h2 holds at the given pair, but exp is not phi-convex under
  // 2(a - b) on the whole interval: at t = 1 the inequality reads
  // h1 <= 2 h1 - h2, which fails for every pair with h1 < h2.
  EXPECT_EQ(t.verdict, Verdict::PremiseFailed);
  for (const Report& p : t.premise_reports) {
    if (p.check == "phi_dominates_difference") {
      EXPECT_TRUE(p.holds());
    }
    if (p.check == "phiE_convex_interval") {
      EXPECT_EQ(p.verdict, Verdict::Violated);
    }
  }
  // The conclusion itself is still evaluated: exp(alpha) >= 2 exp(beta)
  // needs a spread of at least log 2, available on (0, 1).
  EXPECT_TRUE(t.conclusion_report.holds());
  EXPECT_GE(t.values.at("alpha") - t.values.at("beta"), std::log(2.0) - 1e-6);
}

TEST(MeanValue, VerdictMatchesDenseOracle) {
  int decided = 0;
  for (std::uint64_t i = 0; i < 12; ++i) {
    const gen::LineCase c = gen::smooth_line_case(5, i);
    const TheoremReport t = verify_mean_value(c.inst, c.u1, c.u2, cfg_n(2000, i));
    if (t.verdict == Verdict::PremiseFailed) continue;
    ++decided;
    EXPECT_LE(t.values.at("evaluations"), 1e4);
    const bool exists = oracle_pair_exists(c.inst, c.u1, c.u2, t.values.at("R"));
    EXPECT_EQ(t.verdict == Verdict::HoldsOnSamples, exists)
        << c.inst.h.expr.to_string() << " phi=" << c.inst.phi.expr.to_string() << " u1=" << c.u1
        << " u2=" << c.u2;
  }
  EXPECT_GT(decided, 0);
}

TEST(MeanValue, ShiftedDifferenceCanHaveNoPair) {
  // h decreasing and convex, phi = a - b + c with c > 0: h is phi-convex and
  // the values differ, yet R < 0 while h' < 0 everywhere, so no pair exists.
  const Instance inst = line("exp(-x1)", "a - b + 1", 0, 1);
  const TheoremReport t = verify_mean_value(inst, 1.0, 0.0, cfg_n());
  for (const Report& p : t.premise_reports) EXPECT_TRUE(p.holds()) << p.check;
  EXPECT_LT(t.values.at("R"), 0.0);
  EXPECT_FALSE(oracle_pair_exists(inst, 1.0, 0.0, t.values.at("R")));
  EXPECT_EQ(t.verdict, Verdict::Violated);
}

TEST(ThreePoint, QuadraticHandArithmetic) {
  const TheoremReport t = verify_three_point(line("x1^2", "a - b", -1, 3), 0, 1, 2, cfg_n());
  EXPECT_EQ(t.verdict, Verdict::HoldsOnSamples);
  // (0 - 2)(2 + 4) = -12 against (0 - 1) + (1 - 4) = -4.
  EXPECT_NEAR(t.values.at("lhs"), -12.0, 1e-5);
  EXPECT_NEAR(t.values.at("rhs"), -4.0, 1e-12);
}

TEST(ThreePoint, AffineWithNonnegativeSlope) {
  const TheoremReport t = verify_three_point(line("2*x1 + 1", "a - b", -1, 3), 0, 1, 2, cfg_n());
  EXPECT_EQ(t.verdict, Verdict::HoldsOnSamples);
  // lhs = (0 - 2) * 4 = -8, rhs = 2 * (0 - 2) = -4.
  EXPECT_NEAR(t.values.at("lhs"), -8.0, 1e-6);
  EXPECT_NEAR(t.values.at("rhs"), -4.0, 1e-12);
}

TEST(ThreePoint, WrongOrderFailsPremise) {
  EXPECT_EQ(verify_three_point(line("x1^2", "a - b", -1, 3), 2, 1, 0, cfg_n()).verdict,
            Verdict::PremiseFailed);
}

TEST(ThreePoint, NegativeDerivativesCanBreakTheUndividedForm) {
  // h' < 0 at the two right points: the undivided form fails even though
  // every premise holds; the report exposes why.
  const TheoremReport t = verify_three_point(line("x1^2", "a - b", -4, 0), -3, -2, -1, cfg_n());
  EXPECT_FALSE(t.flags.at("nonneg_derivative_condition"));
  // (-3 + 1)(-4 - 2) = 12 against (9 - 4) + (4 - 1) = 8.
  EXPECT_NEAR(t.values.at("lhs"), 12.0, 1e-5);
  EXPECT_NEAR(t.values.at("rhs"), 8.0, 1e-12);
  EXPECT_EQ(t.verdict, Verdict::Violated);
}

TEST(Closure, ScalingAndSum) {
  const TheoremReport s = verify_closure(ClosureKind::Scaling, {line("x1^2", "a - 2*b")}, {3.0},
                                         cfg_n());
  // a - 2b is non-negatively linear but x^2 is not phi-convex under it on
  // [-2, 2], so the premise is what fails here; the positive case uses a - b.
  EXPECT_NE(s.verdict, Verdict::Violated);
  const TheoremReport s2 =
      verify_closure(ClosureKind::Scaling, {line("x1^2")}, {3.0}, cfg_n());
  EXPECT_EQ(s2.verdict, Verdict::HoldsOnSamples);
  const TheoremReport sum =
      verify_closure(ClosureKind::Sum, {line("x1^2"), line("exp(x1)")}, {}, cfg_n());
  EXPECT_EQ(sum.verdict, Verdict::HoldsOnSamples);
  const TheoremReport w = verify_closure(ClosureKind::WeightedSum,
                                         {line("x1^2"), line("exp(x1)")}, {0.5, 2.0}, cfg_n());
  EXPECT_EQ(w.verdict, Verdict::HoldsOnSamples);
}

TEST(Closure, NegativeWeightFailsPremise) {
  const TheoremReport w = verify_closure(ClosureKind::WeightedSum,
                                         {line("x1^2"), line("exp(x1)")}, {-1.0, 2.0}, cfg_n());
  EXPECT_EQ(w.verdict, Verdict::PremiseFailed);
}

TEST(Closure, SupFamilyUnderDifferenceFailsPremise) {
  const TheoremReport t =
      verify_closure(ClosureKind::SupFamily, {line("x1^2"), line("exp(x1)")}, {}, cfg_n());
  EXPECT_EQ(t.verdict, Verdict::PremiseFailed);
  bool found = false;
  for (const Report& p : t.premise_reports) {
    if (p.check.find("seq_upper_bounded") != std::string::npos) {
      found = true;
      EXPECT_EQ(p.verdict, Verdict::Violated);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Composition, DocumentedExamples) {
  EXPECT_EQ(verify_composition(line("x1"), ScalarFn::parse("exp(x1)", 1), cfg_n()).verdict,
            Verdict::HoldsOnSamples);
  EXPECT_EQ(verify_composition(line("x1"), ScalarFn::parse("-x1", 1), cfg_n()).verdict,
            Verdict::PremiseFailed);
  const TheoremReport id = verify_composition(line("x1^2"), ScalarFn::parse("x1", 1), cfg_n());
  EXPECT_EQ(id.verdict, check_geodesic_phiE_convex_fn(line("x1^2"), cfg_n()).verdict);
}

TEST(DiffeoInvariance, AffineStereographicIdentity) {
  EXPECT_EQ(verify_diffeo_invariance(line("x1^2"), affine_diffeo(1, 2.0, 1.0), cfg_n()).verdict,
            Verdict::HoldsOnSamples);
  // A non-convex h fails the premise on the source side.
  EXPECT_EQ(verify_diffeo_invariance(line("-(x1^2)"), identity_diffeo(Manifold::euclidean(1)),
                                     cfg_n())
                .verdict,
            Verdict::PremiseFailed);
  EXPECT_EQ(verify_diffeo_invariance(cap_distance(), stereographic_diffeo(), cfg_n()).verdict,
            Verdict::HoldsOnSamples);
}

TEST(ContinuityBound, Examples) {
  // The sine is not convex on [0, 6.28], so the convexity premise fails; the
  // bound itself is then checked for x^2 and a constant.
  EXPECT_EQ(verify_continuity_bound(line("sin(x1)", "a - b", 0, 6.28), 2, 0.5, cfg_n()).verdict,
            Verdict::PremiseFailed);
  EXPECT_EQ(verify_continuity_bound(line("5"), 0, 0.5, cfg_n()).verdict, Verdict::HoldsOnSamples);
  EXPECT_EQ(verify_continuity_bound(line("x1^2"), 4, 0.5, cfg_n()).verdict,
            Verdict::HoldsOnSamples);
  EXPECT_EQ(verify_continuity_bound(line("x1^2"), 0, 0.5, cfg_n()).verdict,
            Verdict::PremiseFailed);
}

TEST(ChartContinuity, AffineChart) {
  EXPECT_EQ(verify_chart_continuity(line("x1^2"), affine_diffeo(1, 2.0, 1.0), 4, 0.5, cfg_n())
                .verdict,
            Verdict::HoldsOnSamples);
}

TEST(LocalMin, Examples) {
  EXPECT_EQ(verify_local_min(line("x1^2"), Point::Constant(1, 0.0), cfg_n()).verdict,
            Verdict::HoldsOnSamples);
  EXPECT_EQ(verify_local_min(line("x1^2"), Point::Constant(1, 0.5), cfg_n()).verdict,
            Verdict::PremiseFailed);
  EXPECT_EQ(verify_local_min(cap_distance(), Eigen::Vector3d(0, 0, 1), cfg_n()).verdict,
            Verdict::HoldsOnSamples);
}

TEST(PhiLimit, DecreasingShiftsConverge) {
  std::vector<Bifunction> phis;
  for (int i = 1; i <= 32; ++i) {
    phis.push_back(Bifunction::parse("a - b + 1/" + std::to_string(i)));
  }
  const TheoremReport t = verify_phi_limit(line("x1^2"), phis, LimitMode::Pointwise, cfg_n(1500));
  EXPECT_EQ(t.verdict, Verdict::HoldsOnSamples);
}

TEST(PhiLimit, ConstantSequenceMatchesBase) {
  const std::vector<Bifunction> phis(4, Bifunction::difference());
  const TheoremReport t = verify_phi_limit(line("x1^2"), phis, LimitMode::Pointwise, cfg_n(1500));
  EXPECT_EQ(t.verdict, check_geodesic_phiE_convex_fn(line("x1^2"), cfg_n(1500)).verdict);
  EXPECT_TRUE(t.flags.at("converged"));
}

TEST(PhiLimit, OscillationIsFlaggedNotCounted) {
  std::vector<Bifunction> phis;
  for (int i = 1; i <= 16; ++i) {
    phis.push_back(Bifunction::parse(i % 2 ? "a - b + 1" : "a - b + 3"));
  }
  const TheoremReport t = verify_phi_limit(line("x1^2"), phis, LimitMode::Pointwise, cfg_n(1500));
  EXPECT_FALSE(t.flags.at("converged"));
  EXPECT_EQ(t.verdict, Verdict::HoldsOnSamples);
}

TEST(StrictDifferential, Examples) {
  EXPECT_EQ(verify_strict_differential(line("x1^2"), cfg_n()).verdict, Verdict::HoldsOnSamples);
  EXPECT_EQ(verify_strict_differential(line("2*x1 + 1"), cfg_n()).verdict,
            Verdict::PremiseFailed);
  EXPECT_EQ(verify_strict_differential(line("x1^2", "a - 2*b"), cfg_n()).verdict,
            Verdict::PremiseFailed);
}

TEST(EpigraphEquiv, Examples) {
  for (const char* h : {"x1^2", "-(x1^2)", "3*x1 - 1"}) {
    const TheoremReport t = verify_epigraph_equiv(line(h), cfg_n());
    EXPECT_TRUE(t.flags.at("agreement")) << h;
    EXPECT_EQ(t.verdict, Verdict::HoldsOnSamples) << h;
  }
  EXPECT_TRUE(verify_epigraph_equiv(line("x1^2"), cfg_n()).flags.at("function_holds"));
  EXPECT_FALSE(verify_epigraph_equiv(line("-(x1^2)"), cfg_n()).flags.at("function_holds"));
}

TEST(Intersection, Examples) {
  const Manifold R = Manifold::euclidean(1);
  const ProductSet a = ProductSet::epigraph(line("x1^2"));
  const ProductSet b = ProductSet::epigraph(line("exp(x1)"));
  EXPECT_EQ(verify_intersection(R, EndoMap::identity(1), Bifunction::difference(), {a, b}, cfg_n())
                .verdict,
            Verdict::HoldsOnSamples);
  const TheoremReport same =
      verify_intersection(R, EndoMap::identity(1), Bifunction::difference(), {a, a}, cfg_n());
  EXPECT_EQ(same.verdict, check_geodesic_phiE_convex_set(R, EndoMap::identity(1),
                                                         Bifunction::difference(), a, cfg_n())
                              .verdict);
  const ProductSet left = ProductSet::from_graph(DomainSet::interval(-3, -1), "1", -5, 5);
  const ProductSet right = ProductSet::from_graph(DomainSet::interval(1, 3), "1", -5, 5);
  EXPECT_EQ(verify_intersection(R, EndoMap::identity(1), Bifunction::difference(),
                                {left, right}, cfg_n())
                .verdict,
            Verdict::HoldsOnSamples);
}

TEST(SupEpigraph, ConvexFamily) {
  const TheoremReport t = verify_sup_epigraph({line("x1^2"), line("exp(x1)")}, cfg_n());
  EXPECT_EQ(t.verdict, Verdict::HoldsOnSamples);
}

TEST(Theorems, VerdictIsPremiseFailedIffSomePremiseFails) {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const gen::ClosureCase c = gen::closure_case(gen::ClosureFamily::Sum, 9, i);
    const TheoremReport t = gen::verify_case(c, cfg_n(1000, i));
    bool premise_bad = false;
    for (const Report& p : t.premise_reports) premise_bad |= !p.holds();
    EXPECT_EQ(premise_bad, t.verdict == Verdict::PremiseFailed);
  }
}

}  // namespace
}  // namespace geoconvex
