#include "shadowlab/constructions.hpp"
#include "shadowlab/errors.hpp"
#include "shadowlab/margins.hpp"
#include "shadowlab/search.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace shadowlab;
using namespace testing_support;

namespace {

const Ball& ball_of(const Scene& s, std::size_t i) { return *s.bodies[i].as_ball(); }

VerifyOptions certified() {
  VerifyOptions o;
  o.delta_min = 1e-2;
  return o;
}

}  // namespace

TEST(Theorem2, TriangleOfPerturbedDisksOnTheUnitCircle) {
  const double eps = 0.05, shrink = 1e-3;
  Scene s = construct_theorem2(eps, shrink);
  ASSERT_EQ(s.bodies.size(), 3u);
  ASSERT_TRUE(s.sphere.has_value());
  const double c = kTheorem2C;
  std::vector<double> base = {c + eps, c - eps / 2, c - eps / 4};
  // Before the shrink the disks touch pairwise; the scale factor is common.
  const double scale = (ball_of(s, 0).radius() + shrink) / base[0];
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR((ball_of(s, i).center() - s.sphere->center).norm(), 1.0, 1e-12);
    EXPECT_NEAR(ball_of(s, i).radius() + shrink, scale * base[i], 1e-12);
    for (std::size_t j = i + 1; j < 3; ++j)
      EXPECT_NEAR((ball_of(s, i).center() - ball_of(s, j).center()).norm(),
                  ball_of(s, i).radius() + ball_of(s, j).radius() + 2 * shrink, 1e-12);
  }
  EXPECT_TRUE(std::holds_alternative<Covered>(verify_scene(s).verdict));
}

TEST(Theorem2, LargePerturbationIsRejected) { EXPECT_THROW(construct_theorem2(0.5), InputError); }

TEST(Theorem2, TwoDisksNeverSuffice) {
  Scene s = construct_theorem2(0.05);
  // Necessity is about the interior as a whole: each pair leaves some interior point unshadowed.
  Rng rng(4);
  for (std::size_t skip = 0; skip < 3; ++skip) {
    Scene sub = s;
    sub.bodies.erase(sub.bodies.begin() + static_cast<std::ptrdiff_t>(skip));
    bool found = false;
    for (int i = 0; i < 2000 && !found; ++i) {
      Vec x = random_unit(2, rng) * std::sqrt(uniform(0.0, 1.0, rng));
      bool outside = true;
      for (const auto& b : sub.bodies) outside = outside && (x - b.as_ball()->center()).norm() > b.as_ball()->radius();
      found = outside && std::holds_alternative<Uncovered>(verify_at(sub, x).verdict);
    }
    EXPECT_TRUE(found) << skip;
  }
}

TEST(Remark1, TetrahedronBallsTouchAtEdgeMidpoints) {
  Scene s = construct_remark1();
  ASSERT_EQ(s.bodies.size(), 4u);
  EXPECT_NEAR(ball_of(s, 0).radius(), std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_NEAR((s.point - 0.5 * (ball_of(s, 0).center() + ball_of(s, 1).center())).norm(), 0.0, 1e-12);
  // With the shrink the midpoint is outside every ball and a line escapes.
  Scene shrunk = construct_remark1(1e-3);
  SearchBudget b;
  b.sample_count = 100000;
  auto w = falsify(coverage_problem(shrunk), b);
  ASSERT_TRUE(w.has_value());
  EXPECT_GE(w->miss_margin, 1e-3);
  for (const auto& body : shrunk.bodies) EXPECT_GT(line_margin(shrunk.point, w->direction, body), 0.0);
}

TEST(Remark3, GapAndSupportClosedForms) {
  Scene s = construct_remark3(3);
  ASSERT_EQ(s.bodies.size(), 4u);
  EXPECT_NEAR(ball_of(s, 0).radius(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(check_scene(s).min_gap, std::sqrt(8.0 / 3.0) - 4.0 / 3.0, 1e-9);
  Rng rng(50);
  for (int i = 0; i < 1000; ++i) {
    Vec u = random_unit(3, rng);
    double best = -1e300;
    for (const auto& b : s.bodies) best = std::max(best, ball_of(s, 0).radius() + u.dot(b.as_ball()->center()));
    EXPECT_GE(best, 1.0 - 1e-9);
  }
  EXPECT_TRUE(std::holds_alternative<Covered>(verify_scene(s, certified()).verdict));
}

TEST(Theorem1, CoefficientsArePowersAndBodiesCover) {
  FamilyOptions fo;
  fo.verify = certified();
  FamilyResult r = construct_theorem1(Body(Ball(Vec::Zero(3), 1.0)), Vec::Zero(3), fo);
  ASSERT_EQ(r.scene.bodies.size(), 3u);
  EXPECT_LE(r.trace.r2, r.trace.r1);
  ASSERT_EQ(r.trace.coefficients.size(), 2u);
  const double k1 = r.trace.coefficients[0];
  EXPECT_NEAR(k1, r.trace.r2 / r.trace.r1, 1e-15);
  EXPECT_NEAR(r.trace.coefficients[1], k1 * k1, 1e-15);
  EXPECT_TRUE(check_scene(r.scene).disjoint);
  EXPECT_TRUE(std::holds_alternative<Covered>(r.verification.verdict));
}

TEST(Theorem1, VerdictIsInvariantUnderGlobalHomothety) {
  FamilyOptions fo;
  fo.verify = certified();
  FamilyResult r = construct_theorem1(Body(HPolytope::box(Vec::Constant(3, -1), Vec::Constant(3, 1))), Vec::Zero(3), fo);
  for (double k : {0.1, 3.0, 40.0}) {
    Scene scaled = r.scene;
    scaled.bodies.clear();
    for (const auto& b : r.scene.bodies) scaled.bodies.push_back(apply_transform(b, Transform::homothety(Vec::Zero(3), k)));
    EXPECT_EQ(std::string(verdict_name(verify_scene(scaled, certified()).verdict)), "covered") << k;
  }
}

TEST(Theorem1, RecentersWhenOriginIsOutside) {
  FamilyOptions fo;
  fo.verify = certified();
  FamilyResult r = construct_theorem1(Body(Ball(make_vec({5, 0}), 1.0)), Vec::Zero(2), fo);
  EXPECT_GT(r.trace.recentering.norm(), 0.0);
  EXPECT_TRUE(std::holds_alternative<Covered>(r.verification.verdict));
}

TEST(Theorem3, SimplexNeedsOneMoreThanTheDimension) {
  FamilyOptions fo;
  fo.verify = certified();
  FamilyResult tri = construct_theorem3(Body(HPolytope::regular_simplex(Vec::Zero(2), 1.0)), Vec::Zero(2), fo);
  EXPECT_EQ(tri.scene.bodies.size(), 3u);
  FamilyResult sq = construct_theorem3(Body(HPolytope::box(Vec::Constant(2, -1), Vec::Constant(2, 1))), Vec::Zero(2), fo);
  EXPECT_EQ(sq.scene.bodies.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<Covered>(tri.verification.verdict));
  EXPECT_TRUE(std::holds_alternative<Covered>(sq.verification.verdict));
}

TEST(Remark4, AntipodalPairOnTheCircle) {
  Configuration cfg;
  cfg.centers = {make_vec({1, 0}), make_vec({-1, 0})};
  cfg.radii = {0.5, 0.5};
  Scene s = configuration_scene(cfg, Mode::ray);
  EscapeResult e = construct_remark4_escape(s, s.point);
  for (const auto& b : s.bodies) EXPECT_GT(ray_margin(s.point, e.direction, b), 0.0);
}

TEST(Remark4, SingleBallEscapesBackwards) {
  Configuration cfg;
  cfg.centers = {make_vec({0, 0, 1})};
  cfg.radii = {0.9};
  Scene s = configuration_scene(cfg, Mode::ray);
  EscapeResult e = construct_remark4_escape(s, s.point);
  EXPECT_GT(ray_margin(s.point, e.direction, s.bodies[0]), 0.0);
}

TEST(Remark4, RandomFamiliesOnTheSphere) {
  Rng rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    Configuration cfg;
    while (cfg.radii.size() < 8) {
      Vec c = random_unit(3, rng);
      double r = uniform(0.05, 0.5, rng);
      bool ok = true;
      for (std::size_t j = 0; j < cfg.radii.size(); ++j) ok = ok && (c - cfg.centers[j]).norm() > r + cfg.radii[j];
      if (ok) {
        cfg.centers.push_back(c);
        cfg.radii.push_back(r);
      }
    }
    Scene s = configuration_scene(cfg, Mode::ray);
    SearchBudget b;
    b.seed = static_cast<std::uint64_t>(trial);
    EscapeResult e = construct_remark4_escape(s, s.point, b);
    for (const auto& body : s.bodies) EXPECT_GT(ray_margin(s.point, e.direction, body), 0.0);
  }
}

TEST(Theorem4, EveryComplexLineContainsAnEquatorialRealLine) {
  Rng rng(52);
  Configuration cfg = pole_ring_seed(5, 6, 0.9, 0.6, 0.5);
  Scene real = configuration_scene(cfg, Mode::line);
  Scene cplx = construct_theorem4(3, FieldKind::complex, real);
  ASSERT_EQ(cplx.dim, 6);
  ASSERT_EQ(cplx.mode, Mode::cline);
  AlgebraStructure s = AlgebraStructure::complex(3);
  for (const auto& b : cplx.bodies) EXPECT_EQ(b.as_ball()->center()[1], 0.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec v = random_unit(6, rng);
    Mat plane(6, 2);
    plane.col(0) = v;
    plane.col(1) = s.units()[0] * v;
    // Kernel of the coordinate-1 functional on the plane: a real line in the equator.
    Eigen::RowVector2d row = plane.row(1);
    Vec coeffs = row.norm() < 1e-14 ? Vec(make_vec({1, 0})) : Vec(make_vec({-row[1], row[0]}));
    Vec w = (plane * coeffs).normalized();
    EXPECT_NEAR(w[1], 0.0, 1e-12);
    for (std::size_t i = 0; i < cplx.bodies.size(); ++i)
      EXPECT_LE(cline_margin(cplx.point, v, *cplx.bodies[i].as_ball(), s),
                line_margin(cplx.point, w, cplx.bodies[i]) + 1e-12);
  }
}

TEST(Theorem4, WrongSourceIsADependencyError) {
  Configuration cfg = pole_ring_seed(3, 4, 0.9, 0.5, 0.6);
  Scene real = configuration_scene(cfg, Mode::line);
  try {
    construct_theorem4(3, FieldKind::complex, real);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dependency);
  }
  EXPECT_EQ(theorem4_real_dim(3, FieldKind::complex), 5);
  EXPECT_EQ(theorem4_real_dim(3, FieldKind::quaternion), 9);
}
