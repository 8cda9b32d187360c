#include "shadowlab/errors.hpp"
#include "shadowlab/search.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace shadowlab;
using namespace testing_support;

namespace {

ConfigSearchParams small(int dim, int count, std::uint64_t seed) {
  ConfigSearchParams p;
  p.dim = dim;
  p.count = count;
  p.steps = 3000;
  p.chains = 2;
  p.refine_steps = 100;
  p.seed = seed;
  return p;
}

}  // namespace

TEST(Seeds, PoleRingGeometry) {
  Configuration cfg = pole_ring_seed(3, 4, 0.95, kPi / 6, 0.6);
  ASSERT_EQ(cfg.centers.size(), 4u);
  EXPECT_NEAR(cfg.centers[0][2], 1.0, 1e-15);
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_NEAR(cfg.centers[i].norm(), 1.0, 1e-12);
    EXPECT_NEAR(cfg.centers[i][2], -0.5, 1e-12);
  }
  Configuration simplex = simplex_seed(3, 4, 1.0);
  EXPECT_NEAR(simplex.radii[0], std::sqrt(2.0 / 3.0), 1e-12);
}

TEST(Search, TwoDisksOnTheCircleCertify) {
  SearchResult r = search_config(small(2, 2, 3));
  ASSERT_TRUE(std::holds_alternative<Covered>(r.verification.verdict));
  EXPECT_GT(std::get<Covered>(r.verification.verdict).slack, 0.0);
  EXPECT_EQ(r.verification.method, "exact-sweep");
  SceneCheck c = check_scene(r.scene);
  EXPECT_TRUE(c.disjoint && c.on_sphere && c.radii_below);
}

TEST(Search, OneDiskFailsAndIsFalsified) {
  try {
    search_config(small(2, 1, 3));
    FAIL() << "a single disk cannot cast a center shadow";
  } catch (const SearchFailedError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::search_failed);
    auto w = falsify(coverage_problem(e.best()));
    ASSERT_TRUE(w.has_value());
    EXPECT_GT(w->miss_margin, 0.0);
  }
}

TEST(Search, SameSeedSameScene) {
  ConfigSearchParams p = small(2, 2, 11);
  p.steps = 500;
  Scene a = search_config(p).scene, b = search_config(p).scene;
  ASSERT_EQ(a.bodies.size(), b.bodies.size());
  for (std::size_t i = 0; i < a.bodies.size(); ++i) {
    EXPECT_EQ(a.bodies[i].as_ball()->center(), b.bodies[i].as_ball()->center());
    EXPECT_EQ(a.bodies[i].as_ball()->radius(), b.bodies[i].as_ball()->radius());
  }
}

TEST(Search, RejectsBadParameters) {
  ConfigSearchParams p;
  p.count = 0;
  EXPECT_THROW(search_config(p), InputError);
  p = ConfigSearchParams{};
  p.mode = Mode::cline;
  EXPECT_THROW(search_config(p), InputError);
}
