#pragma once

#include "shadowlab/scene.hpp"

#include <optional>
#include <vector>

namespace shadowlab {

/// Symbols of the translation/homothety construction: ray feet on the
/// circumscribed polytope (X), boundary exits (Y), offset points (Z), the
/// enclosing and clear radii about O and the homothety coefficients.
struct ConstructionTrace {
  std::vector<Vec> facet_points;
  std::vector<Vec> boundary_points;
  std::vector<Vec> offset_points;
  std::vector<Vec> ray_directions;
  double r1 = 0.0;
  double r2 = 0.0;
  std::vector<double> coefficients;  // k_1, k_2, ...
  double eta = 0.0;
  int iterations = 0;
  Vec recentering;  // translation applied to the body so that O is interior
};

struct FamilyResult {
  Scene scene;
  ConstructionTrace trace;
  VerifyResult verification;
};

struct FamilyOptions {
  double eta = 0.0;       // <= 0: 0.05 times the bounding radius
  double shrink = 0.5;
  int max_iterations = 20;
  VerifyOptions verify;
};

/// n translated and scaled copies whose line shadow contains O.
FamilyResult construct_theorem1(const Body& body, const Vec& origin, const FamilyOptions& options = {});
/// One copy per facet of the circumscribed polytope; ray shadow at O.
FamilyResult construct_theorem3(const Body& body, const Vec& origin, const FamilyOptions& options = {});

inline const double kTheorem2C = std::sqrt(3.0) / 2;

/// Three disks of radii c + eps, c - eps/2, c - eps/4, pairwise tangent, scaled
/// so that the circle through their centers is the unit circle, then each
/// radius reduced by `shrink`. Query point: the circle center.
Scene construct_theorem2(double eps, double shrink = 1e-3);

/// Four balls of radius half the edge at the vertices of a regular tetrahedron
/// inscribed in the unit sphere; query at an edge midpoint. `shrink` reduces
/// every radius.
Scene construct_remark1(double shrink = 0.0);

/// n + 1 balls of radius half the simplex height at the vertices of a regular
/// simplex inscribed in the unit sphere; hyperplane mode, query at the center.
Scene construct_remark3(int n);

struct EscapeResult {
  Vec direction;               // unit ray direction from x
  std::vector<double> margins;  // ray margin against each body (all > 0)
  bool from_recipe = false;    // true when the closest-pair recipe sufficed
  Vec gap_point;
};

/// Ray from x escaping a family of disjoint balls centered on a sphere.
EscapeResult construct_remark4_escape(const Scene& scene, const Vec& x, const SearchBudget& budget = {});

/// Real center-shadow configuration on S^{d-1} (d = 2n-1 or 4n-3) embedded in
/// the real subspace {v : v_1 real} of K^n; cline mode at the sphere center.
Scene construct_theorem4(int n, FieldKind field, const Scene& real_config);

/// Real dimension of the configuration needed by construct_theorem4.
int theorem4_real_dim(int n, FieldKind field);

}  // namespace shadowlab
