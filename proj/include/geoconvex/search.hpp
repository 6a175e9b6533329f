#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "geoconvex/manifold.hpp"
#include "geoconvex/report.hpp"
#include "geoconvex/rng.hpp"

namespace geoconvex {

/// One evaluation of a sampled inequality, oriented as lhs <= rhs.
struct Probe {
  bool admissible = false;
  double lhs = 0.0;
  double rhs = 0.0;
  std::vector<Point> points;
  bool strict = false;     // a violation is anything with lhs >= rhs - threshold
  bool two_sided = false;  // equality check: violation is |lhs - rhs|
  std::optional<double> param;  // reported as the witness t when set
};

/// lhs - rhs, or |lhs - rhs| for equality probes.
inline double violation_of(const Probe& p) {
  const double d = p.lhs - p.rhs;
  return p.two_sided ? (d < 0.0 ? -d : d) : d;
}

/// A sampled inequality check. Candidate vectors z (length `dim`) are drawn
/// by `sample`; `eval` scores a candidate at a curve parameter t (ignored
/// when `with_t` is false).
struct SearchProblem {
  std::string name;
  std::uint64_t stream = 0;  // PRNG stream, distinct per predicate
  int dim = 0;
  bool with_t = true;
  Eigen::VectorXd lo;  // refinement bounds of z
  Eigen::VectorXd hi;
  std::function<bool(SampleStream&, Eigen::VectorXd&)> sample;
  std::function<Probe(const Eigen::VectorXd& z, double t)> eval;
};

/// Number of best candidates carried from the sampling phase into local
/// refinement.
inline constexpr int kRefineCandidates = 4;

/// Runs the sampling phase over indices [0, budget) split across
/// cfg.workers threads, merges by (violation margin desc, index asc),
/// refines near-violations sequentially, and returns a Report whose
/// verdict is HoldsOnSamples, Violated or DomainError. The result does not
/// depend on the worker count.
Report run_search(const SearchProblem& problem, const CheckConfig& cfg, std::int64_t budget);

/// Stable stream identifier for a predicate name.
std::uint64_t stream_id(std::string_view name);

}  // namespace geoconvex
