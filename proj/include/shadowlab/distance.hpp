#pragma once

#include "shadowlab/body.hpp"

#include <functional>
#include <vector>

namespace shadowlab {

enum class Contact { disjoint, touching, overlapping };

const char* to_string(Contact contact);

struct DistanceResult {
  double distance = 0.0;
  Contact status = Contact::disjoint;
};

/// Distance between two bodies within `tol`. Ball pairs use the closed form;
/// other pairs run GJK on the support oracles, capped at 1000 support
/// evaluations (throws InconclusiveDistanceError with the final bracket).
DistanceResult body_distance(const Body& a, const Body& b, double tol);

namespace detail {

using SupportFn = std::function<Vec(const Vec&)>;

struct GjkResult {
  double distance = 0.0;  // upper bound: norm of the best point of A - B
  double lower = 0.0;     // certified lower bound
  Vec closest_a;
  Vec closest_b;
  bool converged = false;
  int evaluations = 0;
};

GjkResult gjk(const SupportFn& support_a, const SupportFn& support_b, int dim, double tol,
              int max_evaluations);

/// Minimum-norm point of the convex hull of a few points (at most dim + 1).
struct MinNormPoint {
  Vec point;
  std::vector<int> active;
  std::vector<double> weights;
};
MinNormPoint min_norm_point(const std::vector<Vec>& points);

/// Exact Euclidean distance from `p` to the convex hull of the rows of `vertices`.
double distance_to_hull(const Mat& vertices, const Vec& p);

}  // namespace detail
}  // namespace shadowlab
