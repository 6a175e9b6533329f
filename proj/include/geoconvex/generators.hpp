#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geoconvex/algebra.hpp"
#include "geoconvex/theorems.hpp"

namespace geoconvex::gen {

// Seeded instance families. Every generator is a pure function of
// (seed, index): the same pair always yields the same instance.

/// Euclidean(1): polynomial or exponential h, affine E mapping the interval
/// into itself, linear phi = p a + q b. Verdicts are mixed.
Instance line_instance(std::uint64_t seed, std::uint64_t index);

/// Euclidean(1) with an idempotent E (identity, constant or |x|), a phi that
/// is non-decreasing in both arguments and an h of either convexity.
Instance epigraph_instance(std::uint64_t seed, std::uint64_t index);

/// A convex h on Euclidean(1) or Euclidean(2) (by index parity), E the
/// identity or a contraction of the box into itself, phi = a - b.
Instance convex_instance(std::uint64_t seed, std::uint64_t index);

/// A smooth convex h on an interval with E = id, with parameters for the
/// mean-value and three-point theorems. mu is sorted ascending.
struct LineCase {
  Instance inst;
  double u1 = 0.0;
  double u2 = 0.0;
  std::vector<double> mu;  // three points for the three-point theorem
};
LineCase smooth_line_case(std::uint64_t seed, std::uint64_t index);

enum class ClosureFamily { Scaling, Sum, WeightedSum, Composition, Intersection };

const char* to_string(ClosureFamily f);

/// One closure case. Which fields are set depends on the family:
/// Scaling/Sum/WeightedSum use insts (+ weights), Composition uses insts[0]
/// and outer, Intersection uses sets on (manifold, E, phi).
struct ClosureCase {
  ClosureFamily family = ClosureFamily::Scaling;
  std::vector<Instance> insts;
  std::vector<double> weights;
  std::optional<ScalarFn> outer;
  std::vector<ProductSet> sets;
  Manifold manifold = Manifold::euclidean(1);
  EndoMap E = EndoMap::identity(1);
  Bifunction phi = Bifunction::difference();
};
ClosureCase closure_case(ClosureFamily family, std::uint64_t seed, std::uint64_t index);

/// Runs the theorem matching the case's family.
TheoremReport verify_case(const ClosureCase& c, const CheckConfig& cfg);

}  // namespace geoconvex::gen
