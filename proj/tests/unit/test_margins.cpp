#include "shadowlab/algebra.hpp"
#include "shadowlab/directions.hpp"
#include "shadowlab/errors.hpp"
#include "shadowlab/margins.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace shadowlab;
using namespace testing_support;

namespace {

// Distance from c to the line (or ray) x + t u by dense sampling of t.
double sampled_distance(const Vec& x, const Vec& u, const Vec& c, bool ray) {
  double best = 1e300;
  for (int i = -20000; i <= 20000; ++i) {
    const double t = i * 1e-3;
    if (ray && t < 0) continue;
    best = std::min(best, (x + t * u - c).norm());
  }
  return best;
}

}  // namespace

TEST(Margins, BallLineAndRayMatchSampling) {
  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + trial % 3;
    Vec x = gaussian(dim, rng), u = random_unit(dim, rng), c = gaussian(dim, rng);
    const double r = uniform(0.1, 1.0, rng);
    Body b(Ball(c, r));
    EXPECT_NEAR(line_margin(x, u, b), sampled_distance(x, u, c, false) - r, 2e-3);
    EXPECT_NEAR(ray_margin(x, u, b), sampled_distance(x, u, c, true) - r, 2e-3);
  }
}

TEST(Margins, EllipsoidSignMatchesQuadratic) {
  Rng rng(11);
  int hits = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vec c = 2 * gaussian(3, rng), axes = (gaussian(3, rng).cwiseAbs().array() + 0.2).matrix();
    Mat q = random_rotation(3, rng);
    Body e(Ellipsoid(c, axes, q));
    Vec x = 2 * gaussian(3, rng), u = random_unit(3, rng);
    double lo = 0, hi = 0;
    const bool line_hit = ellipsoid_line_interval(c, axes, q, x, u, lo, hi);
    const bool ray_hit = line_hit && hi >= 0;
    const double lm = line_margin(x, u, e), rm = ray_margin(x, u, e);
    if (std::abs(lm) > 1e-7) EXPECT_EQ(lm < 0, line_hit) << trial;
    if (std::abs(rm) > 1e-7) EXPECT_EQ(rm < 0, ray_hit) << trial;
    hits += line_hit;
  }
  EXPECT_GT(hits, 30);
}

TEST(Margins, PolytopeSignMatchesSlabClipping) {
  Rng rng(12);
  HPolytope p = HPolytope::regular_simplex(make_vec({0.3, -0.2, 0.5}), 1.2);
  Body body(p);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec x = 2 * gaussian(3, rng), u = random_unit(3, rng);
    double lo = 0, hi = 0;
    const bool line_hit = polytope_line_interval(p.normals(), p.offsets(), x, u, lo, hi);
    const bool ray_hit = line_hit && hi >= 0;
    const double lm = line_margin(x, u, body), rm = ray_margin(x, u, body);
    if (std::abs(lm) > 1e-7) EXPECT_EQ(lm < 0, line_hit) << trial;
    if (std::abs(rm) > 1e-7) EXPECT_EQ(rm < 0, ray_hit) << trial;
  }
}

TEST(Margins, TangentLineCountsForClosedBallsOnly) {
  Body b(Ball(make_vec({0, 1}), 1.0));
  const double m = line_margin(Vec::Zero(2), make_vec({1, 0}), b);
  EXPECT_NEAR(m, 0.0, 1e-15);
  EXPECT_TRUE(is_hit(0.0, Closure::closed));
  EXPECT_FALSE(is_hit(0.0, Closure::open));
}

TEST(Margins, HyperplaneMarginIsCenterDistance) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    Vec x = gaussian(4, rng), u = random_unit(4, rng), c = gaussian(4, rng);
    Ball b(c, 0.5);
    EXPECT_NEAR(hyperplane_margin(x, u, b), std::abs(u.dot(c - x)) - 0.5, 1e-12);
  }
}

TEST(Algebra, UnitsAreOrthogonalComplexStructures) {
  for (auto kind : {FieldKind::complex, FieldKind::quaternion}) {
    AlgebraStructure s = AlgebraStructure::make(kind, 3);
    const int d = s.real_dim();
    for (const Mat& j : s.units()) {
      EXPECT_LT((j * j + Mat::Identity(d, d)).norm(), 1e-12);
      EXPECT_LT((j.transpose() * j - Mat::Identity(d, d)).norm(), 1e-12);
    }
    if (kind == FieldKind::quaternion) {
      const auto& u = s.units();
      EXPECT_LT((u[0] * u[1] - u[2]).norm(), 1e-12);
      // Right multiplications by i and j anticommute.
      EXPECT_LT((u[0] * u[1] + u[1] * u[0]).norm(), 1e-12);
    }
  }
}

TEST(Algebra, OverlapIsInvariantUnderUnitScalars) {
  Rng rng(14);
  for (auto kind : {FieldKind::complex, FieldKind::quaternion}) {
    AlgebraStructure s = AlgebraStructure::make(kind, 2);
    for (int trial = 0; trial < 100; ++trial) {
      Vec a = gaussian(s.real_dim(), rng), v = random_unit(s.real_dim(), rng);
      Vec q = random_unit(s.block(), rng);
      Vec vq = s.scale_by_unit(v, q);
      EXPECT_NEAR(vq.norm(), 1.0, 1e-12);
      EXPECT_NEAR(s.overlap(a, v), s.overlap(a, vq), 1e-12);
      // Oracle: projection onto the orthonormal basis of the field line.
      double proj = 0.0;
      for (const Vec& e : s.line_basis(v)) proj += std::pow(e.dot(a), 2);
      EXPECT_NEAR(s.overlap(a, v), std::sqrt(proj), 1e-12);
    }
  }
}

TEST(Margins, ClineMarginMatchesPlaneDistance) {
  Rng rng(15);
  AlgebraStructure s = AlgebraStructure::complex(3);
  for (int trial = 0; trial < 200; ++trial) {
    Vec x = gaussian(6, rng), v = random_unit(6, rng), c = gaussian(6, rng);
    Ball b(c, 0.4);
    Mat basis(6, 2);
    basis.col(0) = v;
    basis.col(1) = s.units()[0] * v;
    Vec d = c - x;
    const double dist = (d - basis * (basis.transpose() * d)).norm();
    EXPECT_NEAR(cline_margin(x, v, b, s), dist - 0.4, 1e-10);
  }
}

TEST(Regions, SignMatchesGeometricPredicates) {
  Rng rng(16);
  auto cs = std::make_shared<const AlgebraStructure>(AlgebraStructure::complex(2));
  for (int trial = 0; trial < 2000; ++trial) {
    Vec x = gaussian(4, rng), c = gaussian(4, rng), u = random_unit(4, rng);
    const double r = uniform(0.1, 1.5, rng);
    Ball ball(c, r);
    Body body(ball);
    auto check = [&](const HitRegion& region, double geometric) {
      if (std::abs(geometric) < 1e-9) return;
      EXPECT_EQ(region_margin(region, u) >= 0, geometric <= 0) << trial;
    };
    check(ball_line_region(x, ball), line_margin(x, u, body));
    check(ball_ray_region(x, ball), ray_margin(x, u, body));
    check(ball_hyperplane_region(x, ball), hyperplane_margin(x, u, ball));
    check(ball_cline_region(x, ball, cs), cline_margin(x, u, ball, *cs));
    check(body_margin_region(x, std::make_shared<const Body>(body), Mode::line), line_margin(x, u, body));
  }
}

TEST(Regions, NormalizedMarginsAreOneLipschitz) {
  Rng rng(17);
  Body ell(Ellipsoid::axis_aligned(make_vec({2, 0, 0}), make_vec({0.5, 1.0, 0.3})));
  auto region = body_margin_region(Vec::Zero(3), std::make_shared<const Body>(ell), Mode::line);
  for (int trial = 0; trial < 500; ++trial) {
    Vec u = random_unit(3, rng), w = random_unit(3, rng);
    const double angle = std::acos(std::clamp(u.dot(w), -1.0, 1.0));
    EXPECT_LE(std::abs(normalized_margin(region, u) - normalized_margin(region, w)), angle + 1e-9);
  }
}

TEST(Regions, QueryInsideBallHitsEverything) {
  Ball b(make_vec({0.1, 0}), 1.0);
  EXPECT_TRUE(is_all_directions(ball_line_region(Vec::Zero(2), b)));
  EXPECT_TRUE(is_all_directions(ball_ray_region(Vec::Zero(2), b)));
}

TEST(Directions, ModesAndSpaces) {
  EXPECT_THROW(DirectionSpace::for_mode(Mode::cline, FieldKind::real, 4), InputError);
  EXPECT_THROW(DirectionSpace::for_mode(Mode::cline, FieldKind::complex, 5), InputError);
  EXPECT_FALSE(DirectionSpace::for_mode(Mode::ray, FieldKind::real, 3).antipodal_quotient);
  EXPECT_TRUE(DirectionSpace::for_mode(Mode::line, FieldKind::real, 3).antipodal_quotient);
  EXPECT_EQ(mode_from_string("hyperplane"), Mode::hyperplane);
  EXPECT_THROW(mode_from_string("plane"), InputError);
}

TEST(Nets, CoveringRadiusHoldsOnRandomProbes) {
  Rng rng(18);
  struct Case {
    int dim;
    bool quotient;
    double delta;
  };
  for (const Case& c : {Case{2, false, 0.05}, Case{2, true, 0.05}, Case{3, false, 0.1}, Case{3, true, 0.1},
                        Case{4, false, 0.3}, Case{4, true, 0.3}, Case{5, true, 0.5}}) {
    Net net = build_net(DirectionSpace::real_sphere(c.dim, c.quotient), c.delta);
    EXPECT_LE(net.resolution, c.delta);
    Mat pts(static_cast<Eigen::Index>(net.points.size()), c.dim);
    for (std::size_t i = 0; i < net.points.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = net.points[i].transpose();
    for (int probe = 0; probe < 300; ++probe) {
      Vec u = random_unit(c.dim, rng);
      Vec dots = pts * u;
      const double best = c.quotient ? dots.cwiseAbs().maxCoeff() : dots.maxCoeff();
      EXPECT_LE(std::acos(std::min(1.0, best)), net.resolution + 1e-12) << c.dim;
    }
  }
}

TEST(Nets, BudgetOverflowIsAResourceError) {
  EXPECT_THROW(build_net(DirectionSpace::real_sphere(6, true), 1e-3, 1000), ResourceError);
}

TEST(CubeSphere, CellRadiusBoundsEveryMember) {
  // Locate random directions in their cells by hand and compare with the radius.
  for (int dim : {3, 4}) {
    detail::CubeSphere cs(dim, 2);
    Rng rng(19 + dim);
    for (int level = 0; level < 4; ++level) {
      const int cells_per_side = 2 << level;
      const double step = (kPi / 2) / cells_per_side;
      for (int trial = 0; trial < 500; ++trial) {
        Vec p = random_unit(dim, rng);
        Eigen::Index axis = 0;
        p.cwiseAbs().maxCoeff(&axis);
        detail::SphereCell cell;
        cell.axis = static_cast<std::int16_t>(axis);
        cell.sign = static_cast<std::int8_t>(p[axis] > 0 ? 1 : -1);
        cell.level = static_cast<std::int8_t>(level);
        for (int i = 0; i < dim; ++i) {
          if (i == axis) continue;
          const double a = std::atan(p[i] / std::abs(p[axis]));
          cell.index.push_back(std::clamp(static_cast<int>((a + kPi / 4) / step), 0, cells_per_side - 1));
        }
        const double gap = std::acos(std::clamp(cs.center(cell).dot(p), -1.0, 1.0));
        EXPECT_LE(gap, cs.radius(cell) + 1e-12);
      }
    }
  }
}
