#include "shadowlab/margins.hpp"

#include "shadowlab/errors.hpp"

#include <functional>

namespace shadowlab {
namespace {

void check_direction(const Vec& x, const Vec& u, int dim) {
  if (x.size() != dim || u.size() != dim) throw InputError("point or direction dimension does not match body");
  if (!is_unit(u)) throw InputError("direction must be a unit vector");
}

double search_margin(const Vec& x, const Vec& u, const Body& body, bool ray) {
  const Ball bound = bounding_ball(body);
  const double T = (x - bound.center()).norm() + bound.radius();
  auto f = [&](double t) { return signed_distance(body, x + t * u); };
  return detail::golden_minimum(f, ray ? 0.0 : -T, T, 1e-12 * T);
}

}  // namespace

namespace detail {

double golden_minimum(const std::function<double(double)>& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best = std::min({f(a), f(b), fc, fd});
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      best = std::min(best, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      best = std::min(best, fd);
    }
  }
  return best;
}

}  // namespace detail

double line_margin(const Vec& x, const Vec& u, const Body& body) {
  check_direction(x, u, body.dim());
  if (const Ball* b = body.as_ball()) {
    const Vec w = b->center() - x;
    return (w - w.dot(u) * u).norm() - b->radius();
  }
  return search_margin(x, u, body, false);
}

double ray_margin(const Vec& x, const Vec& u, const Body& body) {
  check_direction(x, u, body.dim());
  if (const Ball* b = body.as_ball()) {
    const Vec w = b->center() - x;
    const double t = std::max(0.0, w.dot(u));
    return (w - t * u).norm() - b->radius();
  }
  return search_margin(x, u, body, true);
}

double hyperplane_margin(const Vec& x, const Vec& u, const Ball& ball) {
  if (x.size() != ball.dim() || u.size() != ball.dim()) throw InputError("dimension mismatch");
  if (!is_unit(u)) throw InputError("hyperplane normal must be a unit vector");
  return std::abs(u.dot(ball.center() - x)) - ball.radius();
}

double cline_margin(const Vec& x, const Vec& v, const Ball& ball, const AlgebraStructure& s) {
  if (s.kind() == FieldKind::real) throw InputError("complex-line margin needs a complex or quaternionic structure");
  if (x.size() != s.real_dim() || v.size() != s.real_dim() || ball.dim() != s.real_dim()) {
    throw InputError("dimension mismatch");
  }
  if (!is_unit(v)) throw InputError("direction must be a unit vector");
  const Vec w = ball.center() - x;
  const double along = s.overlap(w, v);
  return std::sqrt(std::max(0.0, w.squaredNorm() - along * along)) - ball.radius();
}

}  // namespace shadowlab
