#pragma once

#include "shadowlab/linalg.hpp"

#include <variant>
#include <vector>

namespace shadowlab {

class Ball {
 public:
  Ball(Vec center, double radius);

  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  int dim() const { return static_cast<int>(center_.size()); }

 private:
  Vec center_;
  double radius_;
};

/// {center + orientation * diag(semi_axes) * z : |z| <= 1}
class Ellipsoid {
 public:
  Ellipsoid(Vec center, Vec semi_axes, Mat orientation);
  static Ellipsoid axis_aligned(Vec center, Vec semi_axes);

  const Vec& center() const { return center_; }
  const Vec& semi_axes() const { return semi_axes_; }
  const Mat& orientation() const { return orientation_; }
  int dim() const { return static_cast<int>(center_.size()); }

 private:
  Vec center_;
  Vec semi_axes_;
  Mat orientation_;
};

/// {y : normals.row(i) · y <= offsets[i]}. Rows are normalized on construction;
/// boundedness and a nonempty interior are certified by linear programming.
class HPolytope {
 public:
  HPolytope(Mat normals, Vec offsets);
  static HPolytope box(const Vec& lower, const Vec& upper);
  /// Regular simplex with the given circumradius about `center`.
  static HPolytope regular_simplex(const Vec& center, double circumradius);

  const Mat& normals() const { return normals_; }
  const Vec& offsets() const { return offsets_; }
  const Mat& vertices() const { return vertices_; }
  const Vec& chebyshev_center() const { return chebyshev_center_; }
  double chebyshev_radius() const { return chebyshev_radius_; }
  int dim() const { return static_cast<int>(normals_.cols()); }
  int facet_count() const { return static_cast<int>(normals_.rows()); }

  /// Image under y -> scale * y + shift (scale > 0).
  HPolytope mapped(double scale, const Vec& shift) const;

 private:
  HPolytope() = default;

  Mat normals_;
  Vec offsets_;
  Mat vertices_;
  Vec chebyshev_center_;
  double chebyshev_radius_ = 0.0;
};

/// Translation followed by a homothety: y -> c + k * (y + t - c).
class Transform {
 public:
  Transform(Vec translation, Vec homothety_center, double ratio);
  static Transform identity(int dim);
  static Transform translation(const Vec& t);
  static Transform homothety(const Vec& center, double ratio);

  const Vec& translation_vector() const { return translation_; }
  const Vec& homothety_center() const { return homothety_center_; }
  double ratio() const { return ratio_; }
  int dim() const { return static_cast<int>(translation_.size()); }

  Vec apply(const Vec& y) const;
  /// Affine offset b in y -> ratio * y + b.
  Vec offset() const;
  bool is_identity() const;

  /// `first` then `second`, as a single transform.
  static Transform compose(const Transform& first, const Transform& second);

 private:
  Vec translation_;
  Vec homothety_center_;
  double ratio_;
};

using Shape = std::variant<Ball, Ellipsoid, HPolytope>;

/// A convex body with an attached transform. The transformed ("world") shape is
/// resolved once on construction; all geometric queries use it.
class Body {
 public:
  Body(Shape shape, Transform transform);
  explicit Body(Shape shape);

  const Shape& shape() const { return shape_; }
  const Transform& transform() const { return transform_; }
  const Shape& world() const { return world_; }
  int dim() const;

  bool is_ball() const { return std::holds_alternative<Ball>(world_); }
  const Ball* as_ball() const { return std::get_if<Ball>(&world_); }

 private:
  Shape shape_;
  Transform transform_;
  Shape world_;
};

struct CircumscribedPolytope {
  HPolytope polytope;
  std::vector<Vec> facet_normals;
  int facet_count = 0;
};

Shape transform_shape(const Shape& shape, const Transform& t);

/// argmax over the body of u·y; `u` must be a unit vector.
Vec support(const Body& body, const Vec& u);
/// Support point for any nonzero direction (no unit check).
Vec support_point(const Shape& world, const Vec& direction);
double support_value(const Shape& world, const Vec& direction);

/// n+1 unit vectors forming a regular simplex inscribed in S^{n-1} (rows).
Mat regular_simplex_vertices(int n);

Ball inscribed_ball(const Body& body);
/// A ball containing the body (not necessarily minimal).
Ball bounding_ball(const Body& body);
CircumscribedPolytope circumscribe_polytope(const Body& body);
Body apply_transform(const Body& body, const Transform& t);

/// Euclidean distance to the body when outside; minus the distance to the
/// boundary when inside.
double signed_distance(const Body& body, const Vec& p);
/// max over the body of |y - p|.
double max_distance(const Body& body, const Vec& p);

}  // namespace shadowlab
