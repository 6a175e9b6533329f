#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoconvex/manifold.hpp"

namespace geoconvex {

enum class Verdict { HoldsOnSamples, Violated, PremiseFailed, DomainError };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& name);

struct CheckConfig {
  std::uint64_t seed = 0;
  std::int64_t samples = 100000;
  double tol_abs = 1e-9;
  double tol_rel = 1e-9;
  int refine_steps = 50;
  int t_grid = 17;  // includes both endpoints
  int workers = 1;  // never changes results, only wall time

  /// Throws Error(ConfigError) on out-of-range settings.
  void validate() const;

  /// A difference lhs - rhs counts as a violation beyond this value.
  double threshold(double rhs) const;

  /// t_grid evenly spaced parameters, exactly 0 and 1 at the ends.
  std::vector<double> t_values() const;
};

struct Witness {
  std::vector<Point> points;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double violation = 0.0;  // lhs - rhs
  std::int64_t sample_index = -1;
  bool strict = false;  // counted against the strict form of the inequality
};

struct Report {
  Verdict verdict = Verdict::HoldsOnSamples;
  double max_violation = 0.0;
  std::optional<Witness> witness;
  std::int64_t samples_used = 0;
  std::uint64_t seed = 0;

  std::string check;  // which predicate produced this report
  std::string error;  // DomainError detail
  std::vector<std::string> notes;
  std::map<std::string, bool> flags;
  std::vector<Report> premises;  // set for PremiseFailed
  std::vector<Witness> refined;  // every refined candidate that violates

  bool holds() const { return verdict == Verdict::HoldsOnSamples; }
};

/// Severity order used to combine several reports into one top verdict:
/// DomainError > Violated > PremiseFailed > HoldsOnSamples.
Verdict combine(Verdict a, Verdict b);

}  // namespace geoconvex
