#include "geoconvex/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "geoconvex/error.hpp"

namespace geoconvex {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kGoldenIterations = 6;
constexpr int kStallSweeps = 8;

struct Candidate {
  double margin = kNegInf;
  std::int64_t index = -1;
  Eigen::VectorXd z;
  double t = 0.0;
  Probe probe;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.margin != b.margin) return a.margin > b.margin;
  return a.index < b.index;
}

double margin_of(const Probe& p, const CheckConfig& cfg) {
  const double v = violation_of(p);
  const double thr = cfg.threshold(p.rhs);
  return p.strict ? v + thr : v - thr;
}

struct WorkerResult {
  std::vector<Candidate> top;
  double max_violation = kNegInf;
  std::int64_t admissible = 0;
  std::int64_t error_index = -1;
  std::string error;
};

void keep_top(std::vector<Candidate>& top, Candidate c) {
  if (static_cast<int>(top.size()) < kRefineCandidates) {
    top.push_back(std::move(c));
  } else {
    auto worst = std::min_element(top.begin(), top.end(),
                                  [](const Candidate& a, const Candidate& b) { return better(b, a); });
    if (!better(c, *worst)) return;
    *worst = std::move(c);
  }
}

WorkerResult scan(const SearchProblem& problem, const CheckConfig& cfg,
                  const std::vector<double>& ts, std::int64_t begin, std::int64_t end) {
  WorkerResult out;
  Eigen::VectorXd z(problem.dim);
  for (std::int64_t i = begin; i < end; ++i) {
    SampleStream stream(cfg.seed, problem.stream, static_cast<std::uint64_t>(i));
    try {
      if (!problem.sample(stream, z)) continue;
      Candidate best;
      bool any = false;
      for (double t : ts) {
        Probe p = problem.eval(z, t);
        if (!p.admissible) continue;
        any = true;
        out.max_violation = std::max(out.max_violation, violation_of(p));
        const double m = margin_of(p, cfg);
        if (m > best.margin) {
          best.margin = m;
          best.t = t;
          best.probe = std::move(p);
        }
      }
      if (!any) continue;
      ++out.admissible;
      best.index = i;
      best.z = z;
      keep_top(out.top, std::move(best));
    } catch (const Error& e) {
      out.error_index = i;
      out.error = std::string(to_string(e.kind())) + ": " + e.what();
      return out;
    }
  }
  return out;
}

// Objective used during refinement; anything inadmissible or failing to
// evaluate is simply not an improvement.
struct Objective {
  const SearchProblem& problem;
  const CheckConfig& cfg;

  std::optional<Probe> operator()(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd z = x.head(problem.dim);
    const double t = problem.with_t ? x[problem.dim] : 0.0;
    try {
      Probe p = problem.eval(z, t);
      if (!p.admissible) return std::nullopt;
      if (!std::isfinite(p.lhs) || !std::isfinite(p.rhs)) return std::nullopt;
      return p;
    } catch (const Error&) {
      return std::nullopt;
    }
  }
};

// Coordinate-wise golden-section ascent on the violation margin; the search
// radius of every coordinate halves after each sweep.
void refine(Candidate& c, const SearchProblem& problem, const CheckConfig& cfg) {
  const int n = problem.dim + (problem.with_t ? 1 : 0);
  Eigen::VectorXd lo(n), hi(n), x(n);
  lo.head(problem.dim) = problem.lo;
  hi.head(problem.dim) = problem.hi;
  x.head(problem.dim) = c.z;
  if (problem.with_t) {
    lo[problem.dim] = 0.0;
    hi[problem.dim] = 1.0;
    x[problem.dim] = c.t;
  }
  const Objective f{problem, cfg};
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double best = c.margin;
  int stall = 0;
  for (int sweep = 0; sweep < cfg.refine_steps && stall < kStallSweeps; ++sweep) {
    bool improved = false;
    const double scale = 0.25 * std::ldexp(1.0, -sweep);
    for (int j = 0; j < n; ++j) {
      const double width = hi[j] - lo[j];
      if (!(width > 0.0)) continue;
      const double r = scale * width;
      double a = std::max(lo[j], x[j] - r);
      double b = std::min(hi[j], x[j] + r);
      Eigen::VectorXd trial = x;
      auto score = [&](double v) {
        trial[j] = v;
        auto p = f(trial);
        return p ? std::make_pair(margin_of(*p, cfg), p) : std::make_pair(kNegInf, p);
      };
      double c1 = b - inv_phi * (b - a);
      double c2 = a + inv_phi * (b - a);
      auto s1 = score(c1);
      auto s2 = score(c2);
      double best_v = x[j];
      double best_m = best;
      std::optional<Probe> best_p;
      auto consider = [&](double v, const std::pair<double, std::optional<Probe>>& s) {
        if (s.first > best_m) {
          best_m = s.first;
          best_v = v;
          best_p = s.second;
        }
      };
      consider(c1, s1);
      consider(c2, s2);
      for (int it = 0; it < kGoldenIterations; ++it) {
        if (s1.first >= s2.first) {
          b = c2;
          c2 = c1;
          s2 = s1;
          c1 = b - inv_phi * (b - a);
          s1 = score(c1);
          consider(c1, s1);
        } else {
          a = c1;
          c1 = c2;
          s1 = s2;
          c2 = a + inv_phi * (b - a);
          s2 = score(c2);
          consider(c2, s2);
        }
      }
      if (best_p) {
        x[j] = best_v;
        best = best_m;
        c.probe = std::move(*best_p);
        improved = true;
      }
    }
    stall = improved ? 0 : stall + 1;
  }
  c.margin = best;
  c.z = x.head(problem.dim);
  if (problem.with_t) c.t = x[problem.dim];
}

Witness make_witness(const Candidate& c) {
  Witness w;
  w.points = c.probe.points;
  w.t = c.probe.param ? *c.probe.param : c.t;
  w.lhs = c.probe.lhs;
  w.rhs = c.probe.rhs;
  w.violation = violation_of(c.probe);
  w.sample_index = c.index;
  w.strict = c.probe.strict;
  return w;
}

}  // namespace

std::uint64_t stream_id(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Report run_search(const SearchProblem& problem, const CheckConfig& cfg, std::int64_t budget) {
  cfg.validate();
  Report report;
  report.check = problem.name;
  report.seed = cfg.seed;
  const std::vector<double> ts = problem.with_t ? cfg.t_values() : std::vector<double>{0.0};

  const int workers = static_cast<int>(std::clamp<std::int64_t>(cfg.workers, 1, std::max<std::int64_t>(budget, 1)));
  std::vector<WorkerResult> results(static_cast<std::size_t>(workers));
  auto bounds = [&](int w) {
    return std::make_pair(budget * w / workers, budget * (w + 1) / workers);
  };
  if (workers == 1) {
    results[0] = scan(problem, cfg, ts, 0, budget);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        const auto [b, e] = bounds(w);
        results[static_cast<std::size_t>(w)] = scan(problem, cfg, ts, b, e);
      });
    }
    for (auto& th : threads) th.join();
  }

  // Earliest domain error wins regardless of which worker saw it.
  const WorkerResult* first_error = nullptr;
  for (const auto& r : results) {
    if (r.error_index >= 0 && (!first_error || r.error_index < first_error->error_index)) {
      first_error = &r;
    }
  }
  if (first_error) {
    report.verdict = Verdict::DomainError;
    report.error = "sample " + std::to_string(first_error->error_index) + ": " + first_error->error;
    report.samples_used = first_error->error_index;
    report.max_violation = 0.0;
    return report;
  }

  std::vector<Candidate> top;
  double max_violation = kNegInf;
  for (auto& r : results) {
    max_violation = std::max(max_violation, r.max_violation);
    report.samples_used += r.admissible;
    for (auto& c : r.top) top.push_back(std::move(c));
  }
  std::sort(top.begin(), top.end(), better);
  if (static_cast<int>(top.size()) > kRefineCandidates) top.resize(kRefineCandidates);

  for (auto& c : top) {
    if (violation_of(c.probe) > -10.0 * cfg.threshold(c.probe.rhs)) refine(c, problem, cfg);
    max_violation = std::max(max_violation, violation_of(c.probe));
  }
  std::sort(top.begin(), top.end(), better);

  report.max_violation = report.samples_used > 0 ? max_violation : 0.0;
  for (const auto& c : top) {
    if (c.margin > 0.0) report.refined.push_back(make_witness(c));
  }
  if (!top.empty() && top.front().margin > 0.0) {
    report.verdict = Verdict::Violated;
    report.witness = make_witness(top.front());
  } else {
    report.verdict = Verdict::HoldsOnSamples;
  }
  return report;
}

}  // namespace geoconvex
