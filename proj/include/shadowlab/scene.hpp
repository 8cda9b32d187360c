#pragma once

#include "shadowlab/coverage.hpp"
#include "shadowlab/directions.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace shadowlab {

struct SphereInfo {
  Vec center;
  double radius = 1.0;
};

/// One instance of the shadow problem: a query point, a family of bodies and
/// the kind of flat (line, ray, hyperplane, complex line) sent through the point.
struct Scene {
  FieldKind field = FieldKind::real;
  int dim = 2;  // real ambient dimension
  Mode mode = Mode::line;
  Vec point;
  std::vector<Body> bodies;
  std::optional<SphereInfo> sphere;  // set for families centered on a sphere

  std::string name;
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();

  DirectionSpace space() const { return DirectionSpace::for_mode(mode, field, dim); }
};

/// Rejects inconsistent scenes (dimension mismatch, cline on a real space, ...).
void validate_scene(const Scene& scene);

struct SceneCheck {
  double min_gap = 0.0;        // smallest pairwise body distance (+inf with < 2 bodies)
  bool disjoint = true;        // every pair strictly apart
  bool on_sphere = true;       // ball centers on the scene sphere (within 1e-9)
  bool radii_below = true;     // ball radii below the sphere radius
};

SceneCheck check_scene(const Scene& scene, double tol = 1e-12);

enum class RegionSet {
  inscribed,  // balls exactly, other bodies through their inscribed ball
  full,       // additionally a margin field per non-ball body
};

CoverageProblem coverage_problem(const Scene& scene, RegionSet set = RegionSet::full);
/// Coverage problem at another query point.
CoverageProblem coverage_problem_at(const Scene& scene, const Vec& x, RegionSet set = RegionSet::full);

struct VerifyOptions {
  double delta_start = 0.2;
  double delta_min = 0.0;  // <= 0: default for the space
  CertifyOptions certify;
};

struct VerifyResult {
  Verdict verdict;
  double delta_used = 0.0;  // 0 for the exact sweep
  std::string method;       // "exact-sweep" or "certified-net"
};

/// Exact sweep for planar line/ray scenes, certified nets otherwise. Non-ball
/// bodies are first tried through their inscribed balls (a covered verdict
/// there is valid for the bodies themselves).
VerifyResult verify_scene(const Scene& scene, const VerifyOptions& options = {});
VerifyResult verify_at(const Scene& scene, const Vec& x, const VerifyOptions& options = {});

}  // namespace shadowlab
