#include "geoconvex/report.hpp"

#include <algorithm>
#include <cmath>

#include "geoconvex/error.hpp"

namespace geoconvex {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::HoldsOnSamples: return "HoldsOnSamples";
    case Verdict::Violated: return "Violated";
    case Verdict::PremiseFailed: return "PremiseFailed";
    case Verdict::DomainError: return "DomainError";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& name) {
  for (Verdict v : {Verdict::HoldsOnSamples, Verdict::Violated, Verdict::PremiseFailed,
                    Verdict::DomainError}) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown verdict '" + name + "'");
}

void CheckConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); };
  if (samples < 1) fail("samples must be >= 1");
  if (!(tol_abs > 0.0) || !std::isfinite(tol_abs)) fail("tol_abs must be positive");
  if (!(tol_rel > 0.0) || !std::isfinite(tol_rel)) fail("tol_rel must be positive");
  if (refine_steps < 0) fail("refine_steps must be >= 0");
  if (t_grid < 3) fail("t_grid must be >= 3");
  if (workers < 1) fail("workers must be >= 1");
}

double CheckConfig::threshold(double rhs) const {
  return tol_abs + tol_rel * std::max(1.0, std::abs(rhs));
}

std::vector<double> CheckConfig::t_values() const {
  std::vector<double> ts(static_cast<std::size_t>(t_grid));
  const double n = static_cast<double>(t_grid - 1);
  for (int i = 0; i < t_grid; ++i) ts[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
  ts.back() = 1.0;
  return ts;
}

Verdict combine(Verdict a, Verdict b) {
  auto rank = [](Verdict v) {
    switch (v) {
      case Verdict::HoldsOnSamples: return 0;
      case Verdict::PremiseFailed: return 1;
      case Verdict::Violated: return 2;
      case Verdict::DomainError: return 3;
    }
    return 0;
  };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace geoconvex
