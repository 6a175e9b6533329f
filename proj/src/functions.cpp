#include "geoconvex/functions.hpp"

#include <algorithm>
#include <cmath>

#include "geoconvex/error.hpp"

namespace geoconvex {

std::vector<std::string> coordinate_names(int k) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(std::max(k, 0)));
  for (int i = 1; i <= k; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

const std::vector<std::string>& bifunction_names() {
  static const std::vector<std::string> names{"a", "b"};
  return names;
}

// ---------------------------------------------------------------------------

ScalarFn ScalarFn::parse(const std::string& src, int arity, std::string label) {
  return {Expr::parse(src, coordinate_names(arity)), label.empty() ? src : std::move(label)};
}

ScalarFn ScalarFn::from_expr(Expr e, std::string label) {
  if (label.empty()) label = e.to_string();
  return {std::move(e), std::move(label)};
}

double ScalarFn::operator()(const Point& p) const {
  return expr.eval(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

// ---------------------------------------------------------------------------

EndoMap EndoMap::parse(const std::vector<std::string>& srcs, int in_dim, std::string label) {
  if (srcs.empty()) throw Error(ErrorKind::InvalidArgument, "map needs at least one component");
  EndoMap m;
  const auto vars = coordinate_names(in_dim);
  for (const auto& s : srcs) m.exprs.push_back(Expr::parse(s, vars));
  if (label.empty()) {
    label = "(";
    for (std::size_t i = 0; i < srcs.size(); ++i) label += (i ? ", " : "") + srcs[i];
    label += ")";
  }
  m.label = std::move(label);
  return m;
}

EndoMap EndoMap::identity(int dim) {
  EndoMap m;
  const auto vars = coordinate_names(dim);
  for (const auto& v : vars) m.exprs.push_back(Expr::variable(v, vars));
  m.label = "identity";
  return m;
}

EndoMap EndoMap::from_exprs(std::vector<Expr> exprs, std::string label) {
  if (exprs.empty()) throw Error(ErrorKind::InvalidArgument, "map needs at least one component");
  for (const auto& e : exprs) {
    if (e.variables() != exprs.front().variables()) {
      throw Error(ErrorKind::InvalidArgument, "map components have different signatures");
    }
  }
  EndoMap m{std::move(exprs), std::move(label)};
  if (m.label.empty()) {
    m.label = "(";
    for (std::size_t i = 0; i < m.exprs.size(); ++i) {
      m.label += (i ? ", " : "") + m.exprs[i].to_string();
    }
    m.label += ")";
  }
  return m;
}

int EndoMap::in_dim() const {
  return exprs.empty() ? 0 : static_cast<int>(exprs.front().variables().size());
}

bool EndoMap::is_identity() const {
  if (in_dim() != out_dim()) return false;
  for (int i = 0; i < out_dim(); ++i) {
    if (!exprs[static_cast<std::size_t>(i)].is_variable(i)) return false;
  }
  return true;
}

bool EndoMap::is_constant() const {
  return std::all_of(exprs.begin(), exprs.end(), [](const Expr& e) { return e.is_constant(); });
}

Point EndoMap::operator()(const Point& p) const {
  if (p.size() != in_dim()) {
    throw Error(ErrorKind::ArityMismatch, "map '" + label + "' expects " +
                                              std::to_string(in_dim()) + " coordinates, got " +
                                              std::to_string(p.size()));
  }
  const std::span<const double> coords(p.data(), static_cast<std::size_t>(p.size()));
  Point out(out_dim());
  for (int i = 0; i < out_dim(); ++i) out[i] = exprs[static_cast<std::size_t>(i)].eval(coords);
  return out;
}

EndoMap EndoMap::compose(const EndoMap& inner) const {
  if (inner.out_dim() != in_dim()) {
    throw Error(ErrorKind::ArityMismatch, "cannot compose '" + label + "' after '" +
                                              inner.label + "': dimension mismatch");
  }
  std::vector<Expr> out;
  out.reserve(exprs.size());
  for (const auto& e : exprs) out.push_back(e.substitute(inner.exprs));
  return from_exprs(std::move(out), label + " o " + inner.label);
}

Expr EndoMap::pull_back(const Expr& e) const {
  if (static_cast<int>(e.variables().size()) != out_dim()) {
    throw Error(ErrorKind::ArityMismatch, "expression arity does not match map '" + label + "'");
  }
  return e.substitute(exprs);
}

std::vector<std::string> EndoMap::sources() const {
  std::vector<std::string> out;
  out.reserve(exprs.size());
  for (const auto& e : exprs) out.push_back(e.to_string());
  return out;
}

// ---------------------------------------------------------------------------

Bifunction Bifunction::parse(const std::string& src, std::string label) {
  return {Expr::parse(src, bifunction_names()), label.empty() ? src : std::move(label)};
}

Bifunction Bifunction::from_expr(Expr e, std::string label) {
  if (e.variables() != bifunction_names()) {
    throw Error(ErrorKind::InvalidArgument, "bifunction must be an expression over (a, b)");
  }
  if (label.empty()) label = e.to_string();
  return {std::move(e), std::move(label)};
}

Bifunction Bifunction::difference() { return parse("a - b"); }

double Bifunction::operator()(double a, double b) const {
  const double ab[2] = {a, b};
  return expr.eval(ab);
}

// ---------------------------------------------------------------------------

double differentiate_numeric(const ScalarFn& f, const Point& at, const Eigen::VectorXd& dir) {
  if (dir.size() != at.size()) {
    throw Error(ErrorKind::InvalidTangent, "direction and point have different sizes");
  }
  const double dn2 = dir.squaredNorm();
  if (dn2 == 0.0) return 0.0;
  const double h = std::max(1e-6, 1e-6 * at.norm());
  const double s = h / std::sqrt(dn2);
  const Point xp = at + s * dir;
  const Point xm = at - s * dir;
  const double realized = (xp - xm).dot(dir) / dn2;
  return (f(xp) - f(xm)) / realized;
}

}  // namespace geoconvex
