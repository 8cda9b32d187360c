#pragma once

#include "shadowlab/algebra.hpp"
#include "shadowlab/body.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace shadowlab {

/// What passes through the query point: a line, a ray, a hyperplane (given by
/// its normal) or a complex/quaternionic line.
enum class Mode { line, ray, hyperplane, cline };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& name);

using Rng = std::mt19937_64;

/// Direction space carrying the lines/rays/hyperplanes/complex lines through a point.
struct DirectionSpace {
  FieldKind kind = FieldKind::real;
  int ambient_dim = 2;
  bool antipodal_quotient = true;

  static DirectionSpace real_sphere(int ambient_dim, bool antipodal_quotient);
  static DirectionSpace for_mode(Mode mode, FieldKind kind, int ambient_dim);
  /// Largest geodesic distance between two points of the space.
  double diameter() const;
};

/// Every direction hits (the query point lies in the body).
struct AllDirections {};

struct Cap {
  Vec axis;
  double half_angle = 0.0;
  bool antipodal = false;
};

/// Covered set {u : |u·axis| <= cos_threshold}.
struct Band {
  Vec axis;
  double cos_threshold = 0.0;
};

/// Fubini-Study cap {v : |<axis, v>| >= overlap_threshold}.
struct FSCap {
  Vec axis;
  double overlap_threshold = 0.0;
  std::shared_ptr<const AlgebraStructure> structure;
};

/// Hit region of a general convex body: margin(u) = -line_margin (or -ray_margin).
struct MarginField {
  Vec x;
  std::shared_ptr<const Body> body;
  Mode mode = Mode::line;
  double lipschitz_bound = 1.0;
};

using HitRegion = std::variant<AllDirections, Cap, Band, FSCap, MarginField>;

/// Signed membership margin, positive inside the region.
double region_margin(const HitRegion& region, const Vec& u);
double lipschitz_bound(const HitRegion& region);
/// region_margin / lipschitz_bound: 1-Lipschitz in the geodesic angle of u.
double normalized_margin(const HitRegion& region, const Vec& u);
bool is_all_directions(const HitRegion& region);

HitRegion ball_line_region(const Vec& x, const Ball& ball);
HitRegion ball_ray_region(const Vec& x, const Ball& ball);
HitRegion ball_hyperplane_region(const Vec& x, const Ball& ball);
HitRegion ball_cline_region(const Vec& x, const Ball& ball, std::shared_ptr<const AlgebraStructure> s);
HitRegion body_margin_region(const Vec& x, std::shared_ptr<const Body> body, Mode mode);

struct Net {
  std::vector<Vec> points;
  double resolution = 0.0;  // certified geodesic covering radius
};

inline constexpr std::size_t kDefaultNetBudget = 20'000'000;

/// Direction net with certified covering radius <= delta.
/// S^1: uniform grid; S^2: subdivided icosahedron; S^{m-1}, m >= 4: equiangular
/// cube-sphere grid. Complex and quaternionic spaces use the ambient real sphere.
Net build_net(const DirectionSpace& space, double delta, std::size_t max_points = kDefaultNetBudget);

/// Uniform direction on the ambient sphere.
Vec sample_direction(const DirectionSpace& space, Rng& rng);

/// Deterministic stream seed for (seed, stream) pairs.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

namespace detail {

/// Cell of the equiangular cube-sphere decomposition of S^{d-1}: facet
/// {y : y[axis] = sign} of the cube, subdivided into a grid of angular boxes.
struct SphereCell {
  std::int16_t axis = 0;
  std::int8_t sign = 1;
  std::int8_t level = 0;
  std::vector<std::int32_t> index;  // d-1 grid indices at this level
};

class CubeSphere {
 public:
  CubeSphere(int dim, int base_divisions);

  int dim() const { return dim_; }
  int base_divisions() const { return base_; }
  std::vector<SphereCell> base_cells(bool antipodal_quotient) const;
  Vec center(const SphereCell& cell) const;
  /// Exact geodesic radius of the cell about its center (max over box corners).
  double radius(const SphereCell& cell) const;
  std::vector<SphereCell> children(const SphereCell& cell) const;

 private:
  Vec facet_point(const SphereCell& cell, const std::vector<double>& angles) const;

  int dim_;
  int base_;
};

}  // namespace detail
}  // namespace shadowlab
