#include "shadowlab/scene.hpp"

#include "shadowlab/distance.hpp"
#include "shadowlab/errors.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace shadowlab {

void validate_scene(const Scene& scene) {
  if (scene.dim < 2) throw InputError("scene dimension must be at least 2");
  if (scene.point.size() != scene.dim) throw InputError("query point dimension differs from the scene");
  if (!all_finite(scene.point)) throw InputError("query point has non-finite coordinates");
  if (scene.mode == Mode::cline && scene.field == FieldKind::real)
    throw InputError("cline mode requires a complex or quaternion space");
  if (scene.mode != Mode::cline && scene.field != FieldKind::real)
    throw InputError("complex and quaternion spaces only support cline mode");
  (void)scene.space();
  for (const auto& b : scene.bodies) {
    if (b.dim() != scene.dim) throw InputError("body dimension differs from the scene");
    if ((scene.mode == Mode::hyperplane || scene.mode == Mode::cline) && !b.is_ball())
      throw InputError(std::string(to_string(scene.mode)) + " mode supports balls only");
  }
  if (scene.sphere && scene.sphere->center.size() != scene.dim)
    throw InputError("sphere center dimension differs from the scene");
}

SceneCheck check_scene(const Scene& scene, double tol) {
  SceneCheck out;
  out.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scene.bodies.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.bodies.size(); ++j) {
      auto d = body_distance(scene.bodies[i], scene.bodies[j], tol);
      out.min_gap = std::min(out.min_gap, d.distance);
      if (d.status != Contact::disjoint) out.disjoint = false;
    }
  }
  if (scene.sphere) {
    for (const auto& b : scene.bodies) {
      const Ball* ball = b.as_ball();
      if (!ball) continue;
      double d = (ball->center() - scene.sphere->center).norm();
      if (std::abs(d - scene.sphere->radius) > 1e-9 * scene.sphere->radius) out.on_sphere = false;
      if (!(ball->radius() < scene.sphere->radius)) out.radii_below = false;
    }
  }
  return out;
}

CoverageProblem coverage_problem_at(const Scene& scene, const Vec& x, RegionSet set) {
  CoverageProblem p{scene.space(), {}};
  std::shared_ptr<const AlgebraStructure> structure;
  if (scene.mode == Mode::cline)
    structure = std::make_shared<AlgebraStructure>(AlgebraStructure::make(scene.field, scene.dim / (scene.field == FieldKind::complex ? 2 : 4)));
  for (const auto& body : scene.bodies) {
    const Ball* ball = body.as_ball();
    Ball proxy = ball ? *ball : inscribed_ball(body);
    switch (scene.mode) {
      case Mode::line: p.regions.push_back(ball_line_region(x, proxy)); break;
      case Mode::ray: p.regions.push_back(ball_ray_region(x, proxy)); break;
      case Mode::hyperplane: p.regions.push_back(ball_hyperplane_region(x, proxy)); break;
      case Mode::cline: p.regions.push_back(ball_cline_region(x, proxy, structure)); break;
    }
    if (!ball && set == RegionSet::full)
      p.regions.push_back(body_margin_region(x, std::make_shared<Body>(body), scene.mode));
  }
  return p;
}

CoverageProblem coverage_problem(const Scene& scene, RegionSet set) {
  return coverage_problem_at(scene, scene.point, set);
}

VerifyResult verify_at(const Scene& scene, const Vec& x, const VerifyOptions& options) {
  validate_scene(scene);
  const DirectionSpace space = scene.space();
  const bool planar = scene.dim == 2 && (scene.mode == Mode::line || scene.mode == Mode::ray);
  const double delta_min = options.delta_min > 0 ? options.delta_min : default_delta_min(space);
  const double delta_start = std::max(options.delta_start, delta_min);
  bool all_balls = true;
  for (const auto& b : scene.bodies) all_balls = all_balls && b.is_ball();

  if (planar) return {cover_circle_exact(coverage_problem_at(scene, x, RegionSet::full)), 0.0, "exact-sweep"};
  if (!all_balls) {
    Verdict quick = cover_certify(coverage_problem_at(scene, x, RegionSet::inscribed), delta_start, delta_min,
                                  options.certify);
    if (std::holds_alternative<Covered>(quick)) return {quick, delta_min, "certified-net"};
  }
  Verdict v = cover_certify(coverage_problem_at(scene, x, RegionSet::full), delta_start, delta_min, options.certify);
  return {v, delta_min, "certified-net"};
}

VerifyResult verify_scene(const Scene& scene, const VerifyOptions& options) {
  return verify_at(scene, scene.point, options);
}

}  // namespace shadowlab
