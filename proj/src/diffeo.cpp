#include "geoconvex/diffeo.hpp"

#include <sstream>

#include "geoconvex/error.hpp"

namespace geoconvex {
namespace {

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Diffeo affine_diffeo(int dim, double scale, double shift) {
  if (scale == 0.0) throw Error(ErrorKind::InvalidArgument, "affine chart needs a nonzero scale");
  std::vector<std::string> fwd, inv;
  for (int i = 1; i <= dim; ++i) {
    const std::string x = "x" + std::to_string(i);
    fwd.push_back("(" + number(scale) + ")*" + x + " + (" + number(shift) + ")");
    inv.push_back("(" + x + " - (" + number(shift) + "))/(" + number(scale) + ")");
  }
  const Manifold m = Manifold::euclidean(dim);
  return {"affine", m, m, EndoMap::parse(fwd, dim, "affine"),
          EndoMap::parse(inv, dim, "affine^-1")};
}

Diffeo stereographic_diffeo() {
  return {"stereographic", Manifold::sphere(2), Manifold::euclidean(2),
          EndoMap::parse({"x1/(1 + x3)", "x2/(1 + x3)"}, 3, "stereographic"),
          EndoMap::parse({"2*x1/(1 + x1^2 + x2^2)", "2*x2/(1 + x1^2 + x2^2)",
                          "(1 - x1^2 - x2^2)/(1 + x1^2 + x2^2)"},
                         2, "stereographic^-1")};
}

Diffeo identity_diffeo(const Manifold& m) {
  const EndoMap id = EndoMap::identity(m.ambient_dim());
  return {"identity", m, m, id, id};
}

const std::vector<std::string>& builtin_diffeo_names() {
  static const std::vector<std::string> names{"identity", "affine", "stereographic"};
  return names;
}

Diffeo builtin_diffeo(const std::string& name, const Manifold& source, double scale,
                      double shift) {
  if (name == "identity") return identity_diffeo(source);
  if (name == "affine") {
    if (source.kind() != ManifoldKind::Euclidean) {
      throw Error(ErrorKind::InvalidArgument, "the affine chart is defined on Euclidean space");
    }
    return affine_diffeo(source.dim(), scale, shift);
  }
  if (name == "stereographic") {
    if (!(source == Manifold::sphere(2))) {
      throw Error(ErrorKind::InvalidArgument, "stereographic projection is defined on Sphere(2)");
    }
    return stereographic_diffeo();
  }
  throw Error(ErrorKind::InvalidArgument, "unknown diffeomorphism '" + name + "'");
}

}  // namespace geoconvex
