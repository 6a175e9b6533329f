#include "geoconvex/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "geoconvex/algebra.hpp"
#include "geoconvex/checker.hpp"
#include "geoconvex/diffeo.hpp"
#include "geoconvex/error.hpp"

namespace geoconvex::cli {
namespace {

using nlohmann::json;

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json point_json(const Point& p) {
  json a = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(number(p[i]));
  return a;
}

json witness_json(const Witness& w) {
  json pts = json::array();
  for (const auto& p : w.points) pts.push_back(point_json(p));
  return {{"points", pts},         {"t", number(w.t)},
          {"lhs", number(w.lhs)},  {"rhs", number(w.rhs)},
          {"violation", number(w.violation)}, {"sample_index", w.sample_index},
          {"strict", w.strict}};
}

bool is_config_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::SyntaxError:
    case ErrorKind::UnknownIdentifier:
    case ErrorKind::ArityMismatch:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ConfigError:
      return true;
    default:
      return false;
  }
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

// --- config parsing -------------------------------------------------------

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) config_error(std::string("missing field '") + key + "'");
  return get<T>(j, key, T{});
}

Manifold parse_manifold(const json& j) {
  if (!j.contains("manifold")) return Manifold::euclidean(1);
  const json& m = j.at("manifold");
  const std::string kind = get<std::string>(m, "kind", "Euclidean");
  const int dim = get<int>(m, "dim", 1);
  try {
    return Manifold(manifold_kind_from_string(kind), dim);
  } catch (const Error& e) {
    config_error(e.what());
  }
}

Eigen::VectorXd vector_of(const json& j, const char* key, int k) {
  const json& v = j.at(key);
  if (v.is_number()) return Eigen::VectorXd::Constant(k, v.get<double>());
  const auto xs = v.get<std::vector<double>>();
  if (static_cast<int>(xs.size()) != k) {
    config_error(std::string("'") + key + "' needs " + std::to_string(k) + " entries");
  }
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), k);
}

DomainSet parse_domain(const json& j, const Manifold& m) {
  if (!j.contains("domain")) return DomainSet::whole(m);
  const json& d = j.at("domain");
  try {
    if (d.contains("interval")) {
      if (!(m == Manifold::euclidean(1))) config_error("'interval' domains need Euclidean(1)");
      const auto iv = d.at("interval").get<std::vector<double>>();
      if (iv.size() != 2) config_error("'interval' needs [lo, hi]");
      return DomainSet::interval(iv[0], iv[1]);
    }
    const int k = m.ambient_dim();
    Box box{d.contains("lo") ? vector_of(d, "lo", k) : Eigen::VectorXd::Constant(k, -1.0),
            d.contains("hi") ? vector_of(d, "hi", k) : Eigen::VectorXd::Constant(k, 1.0)};
    std::optional<Expr> membership;
    if (d.contains("membership")) {
      membership = Expr::parse(d.at("membership").get<std::string>(), coordinate_names(k));
    }
    return DomainSet(m, std::move(box), std::move(membership));
  } catch (const json::exception& e) {
    config_error(std::string("domain: ") + e.what());
  }
}

std::vector<std::string> strings_of(const json& v) {
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

EndoMap parse_map(const json& j, const char* key, const Manifold& m) {
  const int k = m.ambient_dim();
  if (!j.contains(key)) return EndoMap::identity(k);
  try {
    return EndoMap::parse(strings_of(j.at(key)), k, key);
  } catch (const json::exception& e) {
    config_error(std::string(key) + ": " + e.what());
  }
}

Instance parse_instance(const json& j) {
  const Manifold m = parse_manifold(j);
  Instance inst{m,
                ScalarFn::parse(require<std::string>(j, "h"), m.ambient_dim(), "h"),
                parse_map(j, "E", m),
                Bifunction::parse(get<std::string>(j, "phi", "a - b"), "phi"),
                parse_domain(j, m),
                get<std::string>(j, "label", "")};
  inst.validate();
  return inst;
}

CheckConfig parse_cfg(const json& j) {
  CheckConfig c;
  if (!j.contains("config")) return c;
  const json& k = j.at("config");
  c.seed = get<std::uint64_t>(k, "seed", c.seed);
  c.samples = get<std::int64_t>(k, "samples", c.samples);
  c.tol_abs = get<double>(k, "tol_abs", c.tol_abs);
  c.tol_rel = get<double>(k, "tol_rel", c.tol_rel);
  c.refine_steps = get<int>(k, "refine_steps", c.refine_steps);
  c.t_grid = get<int>(k, "t_grid", c.t_grid);
  c.workers = get<int>(k, "workers", c.workers);
  return c;
}

ProductSet parse_product_set(const json& s, const Manifold& m) {
  const DomainSet base = parse_domain(s, m);
  if (s.contains("epigraph")) {
    const Instance inst{m, ScalarFn::parse(s.at("epigraph").get<std::string>(), m.ambient_dim()),
                        EndoMap::identity(m.ambient_dim()), Bifunction::difference(), base, ""};
    return ProductSet::epigraph(inst);
  }
  std::optional<std::string> anchor;
  if (s.contains("anchor")) anchor = s.at("anchor").get<std::string>();
  ProductSet out = ProductSet::from_graph(base, require<std::string>(s, "graph"),
                                          get<double>(s, "v_lo", -10.0),
                                          get<double>(s, "v_hi", 10.0), anchor);
  return out;
}

Diffeo parse_diffeo(const json& j, const Manifold& source) {
  if (j.contains("name")) {
    return builtin_diffeo(j.at("name").get<std::string>(), source, get<double>(j, "scale", 2.0),
                          get<double>(j, "shift", 1.0));
  }
  const Manifold target = j.contains("target") ? parse_manifold({{"manifold", j.at("target")}})
                                               : source;
  return {get<std::string>(j, "label", "custom"), source, target,
          EndoMap::parse(strings_of(j.at("H")), source.ambient_dim(), "H"),
          EndoMap::parse(strings_of(j.at("Hinv")), target.ambient_dim(), "Hinv")};
}

std::vector<Instance> family(const Instance& base, const json& th) {
  std::vector<Instance> out;
  for (const auto& src : require<std::vector<std::string>>(th, "functions")) {
    out.push_back(base.with_h(ScalarFn::parse(src, base.manifold.ambient_dim(), src)));
  }
  if (out.empty()) config_error("'functions' is empty");
  return out;
}

TheoremReport run_theorem(TheoremId id, const json& j, const json& th, const CheckConfig& cfg) {
  auto inst = [&] { return parse_instance(j); };
  switch (id) {
    case TheoremId::MeanValue31:
      return verify_mean_value(inst(), require<double>(th, "u1"), require<double>(th, "u2"), cfg);
    case TheoremId::ThreePoint32: {
      const auto mu = require<std::vector<double>>(th, "mu");
      if (mu.size() != 3) config_error("'mu' needs three points");
      return verify_three_point(inst(), mu[0], mu[1], mu[2], cfg);
    }
    case TheoremId::Scaling41a: {
      const Instance base = inst();
      return verify_closure(ClosureKind::Scaling, {base}, {require<double>(th, "x")}, cfg);
    }
    case TheoremId::Sum41b:
      return verify_closure(ClosureKind::Sum, family(inst(), th), {}, cfg);
    case TheoremId::WeightedSum:
      return verify_closure(ClosureKind::WeightedSum, family(inst(), th),
                            require<std::vector<double>>(th, "weights"), cfg);
    case TheoremId::SupFamily:
      return verify_closure(ClosureKind::SupFamily, family(inst(), th), {}, cfg);
    case TheoremId::Composition:
      return verify_composition(inst(), ScalarFn::parse(require<std::string>(th, "h2"), 1, "h2"),
                                cfg);
    case TheoremId::DiffeoInvariance: {
      const Instance base = inst();
      if (!th.contains("diffeo")) config_error("missing field 'diffeo'");
      return verify_diffeo_invariance(base, parse_diffeo(th.at("diffeo"), base.manifold), cfg);
    }
    case TheoremId::ContinuityBound:
      return verify_continuity_bound(inst(), require<double>(th, "K"), require<double>(th, "eps"),
                                     cfg);
    case TheoremId::ChartContinuity: {
      const Instance base = inst();
      if (!th.contains("diffeo")) config_error("missing field 'diffeo'");
      return verify_chart_continuity(base, parse_diffeo(th.at("diffeo"), base.manifold),
                                     require<double>(th, "K"), require<double>(th, "eps"), cfg);
    }
    case TheoremId::LocalMin: {
      const auto xs = require<std::vector<double>>(th, "mu_star");
      return verify_local_min(inst(), Eigen::Map<const Eigen::VectorXd>(
                                          xs.data(), static_cast<Eigen::Index>(xs.size())),
                              cfg);
    }
    case TheoremId::PhiLimit:
    case TheoremId::PhiSeriesLimit: {
      std::vector<Bifunction> phis;
      for (const auto& s : require<std::vector<std::string>>(th, "phis")) {
        phis.push_back(Bifunction::parse(s, s));
      }
      return verify_phi_limit(inst(), phis,
                              id == TheoremId::PhiLimit ? LimitMode::Pointwise
                                                        : LimitMode::PartialSums,
                              cfg);
    }
    case TheoremId::StrictDifferential:
      return verify_strict_differential(inst(), cfg, get<double>(th, "strict_tol", 1e-6));
    case TheoremId::EpigraphEquiv:
      return verify_epigraph_equiv(inst(), cfg);
    case TheoremId::Intersection52: {
      const Manifold m = parse_manifold(j);
      std::vector<ProductSet> sets;
      if (!th.contains("sets")) config_error("missing field 'sets'");
      for (const auto& s : th.at("sets")) sets.push_back(parse_product_set(s, m));
      return verify_intersection(m, parse_map(j, "E", m),
                                 Bifunction::parse(get<std::string>(j, "phi", "a - b")), sets,
                                 cfg);
    }
    case TheoremId::SupEpigraphCor:
      return verify_sup_epigraph(family(inst(), th), cfg);
  }
  config_error("unsupported theorem");
}

// --- witness CSV ------------------------------------------------------------

void collect(const Report& r, std::vector<Witness>& rows) {
  if (!r.refined.empty()) {
    rows.insert(rows.end(), r.refined.begin(), r.refined.end());
  } else if (r.witness) {
    rows.push_back(*r.witness);
  }
  for (const auto& p : r.premises) collect(p, rows);
}

std::string csv_number(double v) {
  std::ostringstream os;
  os << number(v);
  std::string s = os.str();
  s.erase(std::remove(s.begin(), s.end(), '"'), s.end());
  return s;
}

void write_csv(const std::string& path, const std::vector<Witness>& rows) {
  std::size_t width = 0;
  for (const auto& w : rows) {
    std::size_t n = 0;
    for (const auto& p : w.points) n += static_cast<std::size_t>(p.size());
    width = std::max(width, n);
  }
  std::ofstream f(path);
  if (!f) config_error("cannot write '" + path + "'");
  f << "sample_index";
  for (std::size_t i = 1; i <= width; ++i) f << ",c" << i;
  f << ",t,lhs,rhs,violation\n";
  for (const auto& w : rows) {
    f << w.sample_index;
    std::size_t n = 0;
    for (const auto& p : w.points) {
      for (Eigen::Index i = 0; i < p.size(); ++i, ++n) f << ',' << csv_number(p[i]);
    }
    for (; n < width; ++n) f << ',';
    f << ',' << csv_number(w.t) << ',' << csv_number(w.lhs) << ',' << csv_number(w.rhs) << ','
      << csv_number(w.violation) << '\n';
  }
}

// --- commands ---------------------------------------------------------------

struct Outcome {
  json reports = json::array();
  json extra = json::object();
  Verdict verdict = Verdict::HoldsOnSamples;
  std::vector<Witness> rows;
};

void add(Outcome& o, const Report& r) {
  o.reports.push_back(to_json(r));
  o.verdict = combine(o.verdict, r.verdict);
  collect(r, o.rows);
}

Report function_check(const Instance& inst, const std::string& variant, bool strict,
                      const CheckConfig& cfg) {
  if (variant == "geodesic") return check_geodesic_phiE_convex_fn(inst, cfg, strict);
  if (variant == "interval") return check_phiE_convex_interval(inst, cfg);
  if (variant == "slope") return check_slope_inequality(inst, cfg);
  config_error("unknown variant '" + variant + "' (geodesic, interval, slope)");
}

Outcome dispatch(const std::string& cmd, const json& j, const std::string& variant,
                 const std::string& theorem, const CheckConfig& cfg) {
  Outcome o;
  if (cmd == "check") {
    add(o, function_check(parse_instance(j), variant, get<bool>(j, "strict", false), cfg));
  } else if (cmd == "search") {
    const Instance inst = parse_instance(j);
    const bool strict = get<bool>(j, "strict", false);
    if (inst.manifold == Manifold::euclidean(1)) {
      add(o, function_check(inst, "interval", false, cfg));
      add(o, function_check(inst, "slope", false, cfg));
    }
    add(o, function_check(inst, "geodesic", strict, cfg));
  } else if (cmd == "check-set") {
    const Manifold m = parse_manifold(j);
    add(o, check_geodesic_E_convex_set(m, parse_map(j, "E", m), parse_domain(j, m), cfg));
  } else if (cmd == "check-product-set") {
    const Manifold m = parse_manifold(j);
    if (!j.contains("set")) config_error("missing field 'set'");
    add(o, check_geodesic_phiE_convex_set(m, parse_map(j, "E", m),
                                          Bifunction::parse(get<std::string>(j, "phi", "a - b")),
                                          parse_product_set(j.at("set"), m), cfg));
  } else if (cmd == "check-epigraph") {
    const Instance inst = parse_instance(j);
    add(o, check_geodesic_phiE_convex_set(inst.manifold, inst.E, inst.phi,
                                          ProductSet::epigraph(inst), cfg));
    if (j.contains("points")) {
      const EpigraphMembership member = epigraph_membership(inst, cfg);
      json results = json::array();
      for (const auto& p : j.at("points")) {
        const auto u = require<std::vector<double>>(p, "u");
        const double v = require<double>(p, "v");
        json row{{"u", u}, {"v", number(v)}};
        try {
          row["member"] = member(Eigen::Map<const Eigen::VectorXd>(
                                     u.data(), static_cast<Eigen::Index>(u.size())),
                                 v);
        } catch (const Error& e) {
          row["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
        }
        results.push_back(std::move(row));
      }
      o.extra["memberships"] = std::move(results);
    }
  } else if (cmd == "check-phi") {
    const Bifunction phi = Bifunction::parse(require<std::string>(j, "phi"), "phi");
    std::vector<std::string> defaults{"nonneg_homogeneous", "additive", "antisymmetric",
                                      "nonneg_linear"};
    if (j.contains("sequences")) defaults.push_back("seq_upper_bounded");
    const auto props = get<std::vector<std::string>>(j, "properties", defaults);
    for (const auto& p : props) {
      if (p == "nonneg_homogeneous") {
        add(o, check_nonneg_homogeneous(phi, cfg));
      } else if (p == "additive") {
        add(o, check_additive(phi, cfg));
      } else if (p == "antisymmetric") {
        add(o, check_antisymmetric(phi, cfg));
      } else if (p == "nonneg_linear") {
        add(o, check_nonneg_linear(phi, cfg));
      } else if (p == "nondecreasing") {
        const auto range = get<std::vector<double>>(j, "range", {-10.0, 10.0});
        if (range.size() != 2) config_error("'range' needs [lo, hi]");
        add(o, check_phi_nondecreasing(phi, range[0], range[1], cfg));
      } else if (p == "seq_upper_bounded") {
        std::vector<SequencePair> seqs;
        if (j.contains("sequences")) {
          for (const auto& s : j.at("sequences")) {
            seqs.push_back({require<std::vector<double>>(s, "u"),
                            require<std::vector<double>>(s, "v")});
          }
        }
        add(o, check_seq_upper_bounded(phi, parse_map(j, "E", Manifold::euclidean(1)), seqs,
                                       cfg));
      } else {
        config_error("unknown property '" + p + "'");
      }
    }
  } else if (cmd == "verify") {
    std::string id = theorem;
    const json th = j.contains("theorem") ? j.at("theorem") : json::object();
    if (id.empty()) id = get<std::string>(th, "id", "");
    if (id.empty()) config_error("no theorem given (--theorem or theorem.id)");
    TheoremId tid;
    try {
      tid = theorem_from_string(id);
    } catch (const Error& e) {
      config_error(e.what());
    }
    const TheoremReport t = run_theorem(tid, j, th, cfg);
    o.reports.push_back(to_json(t));
    o.verdict = t.verdict;
    for (const auto& p : t.premise_reports) collect(p, o.rows);
    collect(t.conclusion_report, o.rows);
  } else {
    config_error("unknown command '" + cmd + "'");
  }
  return o;
}

std::uint64_t parse_seed(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 10);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    config_error(std::string(what) + " is not an unsigned integer: '" + text + "'");
  }
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << dump({{"error", {{"kind", kind}, {"message", message}}}});
}

const std::pair<const char*, const char*> kCommands[] = {
    {"check", "check h for geodesic phi_E-convexity"},
    {"check-set", "check the domain for geodesic E-convexity"},
    {"check-product-set", "check a set in M x R"},
    {"check-epigraph", "check the phi_E-epigraph of h and query memberships"},
    {"verify", "test a theorem's premises and conclusion"},
    {"search", "hunt for counterexamples over derived seeds"},
    {"check-phi", "probe properties of the bifunction"}};

}  // namespace

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::HoldsOnSamples: return kExitHolds;
    case Verdict::Violated: return kExitViolated;
    case Verdict::PremiseFailed:
    case Verdict::DomainError: return kExitPremiseOrDomain;
  }
  return kExitPremiseOrDomain;
}

json to_json(const Report& r) {
  json j{{"verdict", to_string(r.verdict)},
         {"max_violation", number(r.max_violation)},
         {"samples_used", r.samples_used},
         {"seed", r.seed},
         {"check", r.check},
         {"notes", r.notes},
         {"flags", r.flags}};
  j["witness"] = r.witness ? witness_json(*r.witness) : json(nullptr);
  if (!r.error.empty()) j["error"] = r.error;
  if (!r.premises.empty()) {
    json ps = json::array();
    for (const auto& p : r.premises) ps.push_back(to_json(p));
    j["premises"] = std::move(ps);
  }
  if (!r.refined.empty()) {
    json ws = json::array();
    for (const auto& w : r.refined) ws.push_back(witness_json(w));
    j["refined"] = std::move(ws);
  }
  return j;
}

json to_json(const TheoremReport& t) {
  json premises = json::array();
  for (const auto& p : t.premise_reports) premises.push_back(to_json(p));
  json values = json::object();
  for (const auto& [k, v] : t.values) values[k] = number(v);
  return {{"theorem", to_string(t.id)},
          {"summary", theorem_summary(t.id)},
          {"verdict", to_string(t.verdict)},
          {"premise_reports", std::move(premises)},
          {"conclusion_report", to_json(t.conclusion_report)},
          {"notes", t.notes},
          {"flags", t.flags},
          {"values", std::move(values)}};
}

std::string dump(const json& j) { return j.dump() + "\n"; }

std::string catalog() {
  std::ostringstream os;
  os << "manifolds:\n";
  for (const char* k : {"Euclidean", "Sphere", "PoincareBall"}) os << "  " << k << "(n)\n";
  os << "diffeomorphisms (H / H^-1):\n";
  for (const auto& name : builtin_diffeo_names()) {
    const Manifold src = name == "stereographic" ? Manifold::sphere(2) : Manifold::euclidean(1);
    const Diffeo d = builtin_diffeo(name, src);
    os << "  " << name << ": " << d.source.name() << " -> " << d.target.name() << "\n";
    auto show = [&](const char* tag, const EndoMap& m) {
      os << "    " << tag << " = (";
      for (std::size_t i = 0; i < m.exprs.size(); ++i) {
        os << (i ? ", " : "") << m.exprs[i].to_string();
      }
      os << ")\n";
    };
    show("H", d.H);
    show("H^-1", d.Hinv);
  }
  os << "theorems:\n";
  for (TheoremId id : all_theorems()) os << "  " << to_string(id) << ": " << theorem_summary(id) << "\n";
  os << "grammar builtins:\n ";
  for (const auto& f : builtin_function_names()) os << " " << f;
  os << "\nbifunction properties:\n  nonneg_homogeneous additive antisymmetric nonneg_linear "
        "nondecreasing seq_upper_bounded\n";
  os << "commands:\n ";
  for (const auto& [c, help] : kCommands) os << " " << c;
  os << " list\n";
  return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    out << catalog();
    return kExitHolds;
  }
  CLI::App app{"Numerical checks of geodesic phi_E-convexity.", "geoconvex"};
  app.require_subcommand(1);
  std::string config_path, out_path, csv_path, variant = "geodesic", theorem;
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
  int workers = 0;
  bool golden = false;
  std::map<std::string, CLI::Option*> seed_opt, samples_opt, workers_opt;
  for (const auto& [name, help] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON job file")->required();
    sub->add_option("--out", out_path, "write the JSON report here instead of stdout");
    sub->add_option("--witness-csv", csv_path, "dump refined violations as CSV");
    seed_opt[name] = sub->add_option("--seed", seed, "overrides GEOCONVEX_SEED and the config");
    samples_opt[name] = sub->add_option("--samples", samples, "sample budget");
    workers_opt[name] = sub->add_option("--workers", workers, "worker threads");
    sub->add_flag("--golden", golden, "write wall_time_ms as 0 for byte-stable output");
    if (std::string(name) == "check") {
      sub->add_option("--variant", variant, "geodesic | interval | slope");
    }
    if (std::string(name) == "verify") sub->add_option("--theorem", theorem, "TheoremId");
  }
  app.add_subcommand("list", "print the built-in catalog");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitHolds;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "ConfigError", e.what());
    return kExitConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd == "list") {
    out << catalog();
    return kExitHolds;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    std::ifstream in(config_path);
    if (!in) config_error("cannot read config '" + config_path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) config_error("config must be a JSON object");

    CheckConfig cfg = parse_cfg(j);
    if (seed_opt[cmd]->count() > 0) {
      cfg.seed = seed;
    } else if (const char* env = std::getenv("GEOCONVEX_SEED"); env != nullptr && *env != '\0') {
      cfg.seed = parse_seed(env, "GEOCONVEX_SEED");
    }
    if (samples_opt[cmd]->count() > 0) cfg.samples = samples;
    if (workers_opt[cmd]->count() > 0) cfg.workers = workers;
    cfg.validate();

    // The echo carries every setting that influences results; worker count
    // does not, and is left out so reports match across worker counts.
    json job = j;
    job["command"] = cmd;
    job["config"] = {{"seed", cfg.seed},       {"samples", cfg.samples},
                     {"tol_abs", cfg.tol_abs}, {"tol_rel", cfg.tol_rel},
                     {"refine_steps", cfg.refine_steps}, {"t_grid", cfg.t_grid}};
    if (cmd == "check") job["variant"] = variant;
    if (cmd == "verify" && !theorem.empty()) job["theorem"]["id"] = theorem;

    Outcome o = dispatch(cmd, j, variant, theorem, cfg);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    json report{{"schema_version", "1"},
                {"job", std::move(job)},
                {"reports", std::move(o.reports)},
                {"verdict", to_string(o.verdict)},
                {"wall_time_ms", golden ? 0 : static_cast<std::int64_t>(ms)}};
    for (auto& [k, v] : o.extra.items()) report[k] = v;

    if (!csv_path.empty()) write_csv(csv_path, o.rows);
    if (out_path.empty()) {
      out << dump(report);
    } else {
      std::ofstream f(out_path);
      if (!f) config_error("cannot write '" + out_path + "'");
      f << dump(report);
    }
    return exit_code(o.verdict);
  } catch (const Error& e) {
    emit_error(err, std::string(to_string(e.kind())), e.what());
    return is_config_error(e.kind()) ? kExitConfig : kExitPremiseOrDomain;
  } catch (const json::exception& e) {
    emit_error(err, "ConfigError", e.what());
    return kExitConfig;
  }
}

}  // namespace geoconvex::cli
