#pragma once

#include "shadowlab/algebra.hpp"
#include "shadowlab/body.hpp"

#include <functional>

namespace shadowlab {

/// Whether closed bodies count a tangent (zero-margin) line as a hit.
enum class Closure { closed, open };

/// A signed miss margin means "hit" when it is <= 0 for closed bodies, < 0 for open ones.
inline bool is_hit(double margin, Closure closure = Closure::closed) {
  return closure == Closure::closed ? margin <= 0.0 : margin < 0.0;
}

/// min over t of the signed distance from x + t u to the body: the distance
/// between the line and the body when they miss, negative when they meet.
double line_margin(const Vec& x, const Vec& u, const Body& body);
/// Same as line_margin restricted to t >= 0.
double ray_margin(const Vec& x, const Vec& u, const Body& body);
/// |u·(c - x)| - r for the hyperplane through x with normal u.
double hyperplane_margin(const Vec& x, const Vec& u, const Ball& ball);
/// Distance from the ball center to the complex (quaternionic) line x + v K minus the radius.
double cline_margin(const Vec& x, const Vec& v, const Ball& ball, const AlgebraStructure& s);

namespace detail {
/// Golden-section minimization of a convex function; stops at width <= tol.
double golden_minimum(const std::function<double(double)>& f, double lo, double hi, double tol);
}

}  // namespace shadowlab
