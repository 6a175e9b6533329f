#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "geoconvex/error.hpp"
#include "geoconvex/manifold.hpp"
#include "geoconvex/rng.hpp"
#include "geoconvex/search.hpp"
#include "oracles.hpp"

namespace geoconvex {
namespace {

Point P(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

// Random valid point on m.
Point random_point(const Manifold& m, SampleStream& s) {
  Point p(m.ambient_dim());
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = s.normal();
  switch (m.kind()) {
    case ManifoldKind::Euclidean: return p;
    case ManifoldKind::Sphere: return p / p.norm();
    case ManifoldKind::PoincareBall: return p / p.norm() * 0.9 * std::sqrt(s.uniform());
  }
  return p;
}

const Manifold kAll[] = {Manifold::euclidean(2), Manifold::euclidean(3), Manifold::sphere(2),
                         Manifold::sphere(3), Manifold::poincare_ball(2),
                         Manifold::poincare_ball(3)};

TEST(Geodesic, EuclideanEndpointAndMidpoint) {
  const Manifold m = Manifold::euclidean(2);
  EXPECT_TRUE(m.geodesic(P({1, 0}), P({0, 0}), 1.0).isApprox(P({1, 0})));
  EXPECT_TRUE(m.geodesic(P({2, 0}), P({0, 0}), 0.5).isApprox(P({1, 0})));
  EXPECT_TRUE(m.geodesic(P({2, 0}), P({0, 0}), 0.0).isApprox(P({0, 0})));
}

TEST(Geodesic, SphereQuarterCircleMidpoint) {
  const Manifold m = Manifold::sphere(2);
  const Point g = m.geodesic(P({1, 0, 0}), P({0, 1, 0}), 0.5);
  const double r = std::sqrt(2.0) / 2.0;
  EXPECT_NEAR(g[0], r, 1e-12);
  EXPECT_NEAR(g[1], r, 1e-12);
  EXPECT_NEAR(g[2], 0.0, 1e-12);
  const Point ref = oracle::sphere_rk4(P({1, 0, 0}), P({0, 1, 0}), 0.5);
  EXPECT_LT((g - ref).norm(), 1e-9);
}

TEST(Geodesic, SphereMatchesRk4OnSamples) {
  const Manifold m = Manifold::sphere(2);
  for (std::uint64_t i = 0; i < 200; ++i) {
    SampleStream s(11, stream_id("test/rk4"), i);
    const Point a = random_point(m, s), b = random_point(m, s);
    if (a.dot(b) < -0.99) continue;
    const double t = s.uniform();
    EXPECT_LT((m.geodesic(a, b, t) - oracle::sphere_rk4(a, b, t)).norm(), 1e-6) << i;
  }
}

TEST(Geodesic, AntipodalIsAnError) {
  const Manifold m = Manifold::sphere(2);
  try {
    m.geodesic(P({1, 0, 0}), P({-1, 0, 0}), 0.5);
    FAIL() << "expected AntipodalPoints";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AntipodalPoints);
  }
}

TEST(Geodesic, RejectsBadInputs) {
  const Manifold s2 = Manifold::sphere(2);
  EXPECT_THROW(s2.geodesic(P({2, 0, 0}), P({0, 1, 0}), 0.5), Error);
  EXPECT_THROW(s2.geodesic(P({1, 0, 0}), P({0, 1, 0}), 1.5), Error);
  EXPECT_THROW(Manifold::poincare_ball(2).geodesic(P({1, 0}), P({0, 0}), 0.5), Error);
  EXPECT_THROW(Manifold::euclidean(0), Error);
}

TEST(Distance, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(Manifold::euclidean(2).distance(P({0, 0}), P({3, 4})), 5.0);
  EXPECT_NEAR(Manifold::sphere(2).distance(P({1, 0, 0}), P({0, 1, 0})), std::numbers::pi / 2,
              1e-12);
  EXPECT_EQ(Manifold::poincare_ball(2).distance(P({0, 0}), P({0, 0})), 0.0);
  EXPECT_NEAR(Manifold::poincare_ball(2).distance(P({0, 0}), P({0.5, 0})),
              2.0 * std::atanh(0.5), 1e-12);
  EXPECT_NEAR(2.0 * std::atanh(0.5), 1.0986, 1e-4);
}

TEST(Distance, PoincareMatchesClosedForm) {
  const Manifold m = Manifold::poincare_ball(3);
  for (std::uint64_t i = 0; i < 200; ++i) {
    SampleStream s(3, stream_id("test/poincare"), i);
    const Point a = random_point(m, s), b = random_point(m, s);
    EXPECT_NEAR(m.distance(a, b), oracle::poincare_distance(a, b), 1e-9);
  }
}

TEST(ExpLog, FlatFormulas) {
  const Manifold m = Manifold::euclidean(2);
  EXPECT_TRUE(m.log_map(P({1, 1}), P({2, 3})).isApprox(P({1, 2})));
  EXPECT_TRUE(m.exp_map(P({1, 1}), P({1, 2})).isApprox(P({2, 3})));
}

TEST(ExpLog, SphereZeroAtCoincidentPoints) {
  const Manifold m = Manifold::sphere(2);
  EXPECT_LT(m.log_map(P({1, 0, 0}), P({1, 0, 0})).norm(), 1e-15);
}

TEST(ExpLog, NonTangentVectorRejected) {
  const Manifold m = Manifold::sphere(2);
  EXPECT_THROW(m.exp_map(P({1, 0, 0}), P({1, 0, 0})), Error);
}

// Property tests over all manifolds.

class ManifoldProperties : public ::testing::TestWithParam<Manifold> {};

TEST_P(ManifoldProperties, EndpointConventionExact) {
  const Manifold& m = GetParam();
  for (std::uint64_t i = 0; i < 100; ++i) {
    SampleStream s(1, stream_id("test/endpoints"), i);
    const Point a = random_point(m, s), b = random_point(m, s);
    if (m.kind() == ManifoldKind::Sphere && a.dot(b) < -0.99) continue;
    EXPECT_LT((m.geodesic(a, b, 0.0) - b).norm(), 1e-12);
    EXPECT_LT((m.geodesic(a, b, 1.0) - a).norm(), 1e-12);
  }
}

TEST_P(ManifoldProperties, ConstantSpeedAndAdditivity) {
  const Manifold& m = GetParam();
  for (std::uint64_t i = 0; i < 100; ++i) {
    SampleStream s(2, stream_id("test/additivity"), i);
    const Point a = random_point(m, s), b = random_point(m, s);
    if (m.kind() == ManifoldKind::Sphere && a.dot(b) < -0.99) continue;
    const double d = m.distance(b, a);
    const double t = s.uniform();
    const Point g = m.geodesic(a, b, t);
    EXPECT_TRUE(m.is_valid(g));
    EXPECT_NEAR(m.distance(b, g), t * d, 1e-9);
    EXPECT_NEAR(m.distance(b, g) + m.distance(g, a), d, 1e-8);
  }
}

TEST_P(ManifoldProperties, ReversalSymmetry) {
  const Manifold& m = GetParam();
  for (std::uint64_t i = 0; i < 100; ++i) {
    SampleStream s(4, stream_id("test/reversal"), i);
    const Point a = random_point(m, s), b = random_point(m, s);
    if (m.kind() == ManifoldKind::Sphere && a.dot(b) < -0.99) continue;
    const double t = s.uniform();
    EXPECT_LT((m.geodesic(b, a, t) - m.geodesic(a, b, 1.0 - t)).norm(), 1e-12);
  }
}

TEST_P(ManifoldProperties, ExpLogRoundTrip) {
  const Manifold& m = GetParam();
  for (std::uint64_t i = 0; i < 100; ++i) {
    SampleStream s(5, stream_id("test/explog"), i);
    const Point p = random_point(m, s), q = random_point(m, s);
    if (m.kind() == ManifoldKind::Sphere && p.dot(q) < -0.99) continue;
    const Tangent v = m.log_map(p, q);
    EXPECT_LT((m.exp_map(p, v) - q).norm(), 1e-9);
    EXPECT_NEAR(m.norm(p, v), m.distance(p, q), 1e-9);
  }
}

TEST_P(ManifoldProperties, MetricAxioms) {
  const Manifold& m = GetParam();
  for (std::uint64_t i = 0; i < 100; ++i) {
    SampleStream s(6, stream_id("test/metric"), i);
    const Point a = random_point(m, s), b = random_point(m, s), c = random_point(m, s);
    EXPECT_NEAR(m.distance(a, b), m.distance(b, a), 1e-12);
    EXPECT_LE(m.distance(a, c), m.distance(a, b) + m.distance(b, c) + 1e-9);
    EXPECT_NEAR(m.distance(a, a), 0.0, 1e-9);
  }
}

TEST_P(ManifoldProperties, VelocityMatchesFiniteDifference) {
  const Manifold& m = GetParam();
  for (std::uint64_t i = 0; i < 50; ++i) {
    SampleStream s(7, stream_id("test/velocity"), i);
    const Point a = random_point(m, s), b = random_point(m, s);
    if (m.kind() == ManifoldKind::Sphere && a.dot(b) < -0.9) continue;
    const double t = 0.1 + 0.8 * s.uniform();
    const double h = 1e-6;
    const Tangent fd = (m.geodesic(a, b, t + h) - m.geodesic(a, b, t - h)) / (2 * h);
    EXPECT_LT((m.geodesic_velocity(a, b, t) - fd).norm(), 1e-5 * (1.0 + fd.norm()));
  }
}

INSTANTIATE_TEST_SUITE_P(All, ManifoldProperties, ::testing::ValuesIn(kAll),
                         [](const auto& info) {
                           std::string n = info.param.name();
                           std::erase_if(n, [](char c) { return c == '(' || c == ')'; });
                           return n;
                         });

TEST(Mobius, IdentityAndInverse) {
  const Point x = P({0.3, -0.2});
  EXPECT_TRUE(mobius::add(x, Point::Zero(2)).isApprox(x));
  EXPECT_LT(mobius::add(-x, x).norm(), 1e-15);
}

}  // namespace
}  // namespace geoconvex
