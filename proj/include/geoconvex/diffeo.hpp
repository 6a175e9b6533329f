#pragma once

#include <string>
#include <vector>

#include "geoconvex/algebra.hpp"
#include "geoconvex/functions.hpp"
#include "geoconvex/manifold.hpp"

namespace geoconvex {

/// A chart map H from a source manifold onto coordinates of a target chart,
/// with its declared inverse. Geodesics of the target are the pushforwards
/// H o gamma of source geodesics.
struct Diffeo {
  std::string name;
  Manifold source;
  Manifold target;
  EndoMap H;
  EndoMap Hinv;
};

/// H(x) = scale * x + shift, componentwise, on Euclidean(dim).
Diffeo affine_diffeo(int dim, double scale, double shift);
/// Stereographic projection of Sphere(2) from the south pole onto the plane:
/// H(x) = (x1, x2) / (1 + x3), H^-1(y) = (2 y1, 2 y2, 1 - |y|^2) / (1 + |y|^2).
Diffeo stereographic_diffeo();
Diffeo identity_diffeo(const Manifold& m);

/// Names accepted by builtin_diffeo: "identity", "affine", "stereographic".
const std::vector<std::string>& builtin_diffeo_names();
Diffeo builtin_diffeo(const std::string& name, const Manifold& source, double scale = 2.0,
                      double shift = 1.0);

}  // namespace geoconvex
