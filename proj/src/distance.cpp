#include "shadowlab/distance.hpp"

#include "shadowlab/errors.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace shadowlab {

const char* to_string(Contact contact) {
  switch (contact) {
    case Contact::disjoint: return "disjoint";
    case Contact::touching: return "touching";
    case Contact::overlapping: return "overlapping";
  }
  return "unknown";
}

InconclusiveDistanceError::InconclusiveDistanceError(double lower, double upper)
    : Error(ErrorKind::inconclusive_distance,
            [&] {
              std::ostringstream os;
              os << "distance iteration did not converge; bracket [" << lower << ", " << upper << "]";
              return os.str();
            }()),
      lower_(lower),
      upper_(upper) {}

namespace detail {

MinNormPoint min_norm_point(const std::vector<Vec>& points) {
  const int k = static_cast<int>(points.size());
  const double scale = [&] {
    double s = 0.0;
    for (const auto& p : points) s = std::max(s, p.norm());
    return std::max(s, 1e-300);
  }();
  MinNormPoint best;
  double best_norm = std::numeric_limits<double>::infinity();
  MinNormPoint fallback;
  double fallback_norm = std::numeric_limits<double>::infinity();

  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < k; ++i)
      if (mask & (1 << i)) idx.push_back(i);
    const int s = static_cast<int>(idx.size());
    std::vector<double> lambda(static_cast<std::size_t>(s), 1.0);
    Vec v = points[static_cast<std::size_t>(idx[0])];
    if (s > 1) {
      const Vec& p0 = points[static_cast<std::size_t>(idx[0])];
      Mat M(p0.size(), s - 1);
      for (int j = 1; j < s; ++j) M.col(j - 1) = points[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])] - p0;
      Eigen::ColPivHouseholderQR<Mat> qr(M);
      qr.setThreshold(1e-12);
      if (qr.rank() < s - 1) continue;
      const Vec mu = qr.solve(-p0);
      lambda[0] = 1.0 - mu.sum();
      for (int j = 1; j < s; ++j) lambda[static_cast<std::size_t>(j)] = mu[j - 1];
      v = p0 + M * mu;
    }
    const bool positive = std::all_of(lambda.begin(), lambda.end(), [](double l) { return l > -1e-12; });
    if (!positive) continue;
    const double vv = v.squaredNorm();
    bool optimal = true;
    for (int i = 0; i < k && optimal; ++i) {
      if (mask & (1 << i)) continue;
      if (v.dot(points[static_cast<std::size_t>(i)]) < vv - 1e-12 * scale * scale) optimal = false;
    }
    const double nv = std::sqrt(vv);
    MinNormPoint candidate{v, idx, lambda};
    if (optimal && nv < best_norm) {
      best_norm = nv;
      best = std::move(candidate);
    } else if (nv < fallback_norm) {
      fallback_norm = nv;
      fallback = std::move(candidate);
    }
  }
  if (std::isfinite(best_norm)) return best;
  return fallback;
}

GjkResult gjk(const SupportFn& support_a, const SupportFn& support_b, int dim, double tol, int max_evaluations) {
  struct Vertex {
    Vec w, a, b;
  };
  GjkResult out;
  Vec dir = Vec::Zero(dim);
  dir[0] = 1.0;
  Vertex first{Vec(), support_a(dir), support_b(-dir)};
  first.w = first.a - first.b;
  out.evaluations = 1;
  std::vector<Vertex> simplex{first};
  Vec v = first.w;
  Vec ca = first.a;
  Vec cb = first.b;
  double lower = -std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, first.w.norm());

  while (true) {
    const double vn = v.norm();
    if (vn <= 1e-14 * scale) {
      out.distance = 0.0;
      out.lower = 0.0;
      out.converged = true;
      break;
    }
    if (out.evaluations >= max_evaluations) {
      out.distance = vn;
      out.lower = std::max(lower, 0.0);
      out.converged = false;
      break;
    }
    Vertex next{Vec(), support_a(-v), support_b(v)};
    next.w = next.a - next.b;
    ++out.evaluations;
    lower = std::max(lower, v.dot(next.w) / vn);
    const bool repeated = std::any_of(simplex.begin(), simplex.end(),
                                      [&](const Vertex& s) { return (s.w - next.w).norm() <= 1e-14 * scale; });
    if (vn - lower <= tol || repeated) {
      out.distance = vn;
      out.lower = std::max(std::min(lower, vn), 0.0);
      out.converged = true;
      break;
    }
    simplex.push_back(next);
    std::vector<Vec> pts;
    for (const auto& s : simplex) pts.push_back(s.w);
    const MinNormPoint mn = min_norm_point(pts);
    std::vector<Vertex> reduced;
    ca = Vec::Zero(dim);
    cb = Vec::Zero(dim);
    for (std::size_t j = 0; j < mn.active.size(); ++j) {
      const Vertex& s = simplex[static_cast<std::size_t>(mn.active[j])];
      ca += mn.weights[j] * s.a;
      cb += mn.weights[j] * s.b;
      reduced.push_back(s);
    }
    simplex = std::move(reduced);
    if (mn.point.norm() >= vn) {
      // No progress possible in floating point.
      out.distance = vn;
      out.lower = std::max(std::min(lower, vn), 0.0);
      out.converged = vn - out.lower <= std::max(tol, 1e-12 * scale);
      break;
    }
    v = mn.point;
  }
  out.closest_a = ca;
  out.closest_b = cb;
  return out;
}

double distance_to_hull(const Mat& vertices, const Vec& p) {
  auto support_hull = [&](const Vec& d) -> Vec {
    Eigen::Index best = 0;
    (vertices * d).maxCoeff(&best);
    return vertices.row(best).transpose();
  };
  auto support_p = [&](const Vec&) -> Vec { return p; };
  const double scale = 1.0 + (vertices.rowwise() - p.transpose()).rowwise().norm().maxCoeff();
  const GjkResult r = gjk(support_hull, support_p, static_cast<int>(p.size()), 1e-13 * scale, 10000);
  return r.distance;
}

}  // namespace detail

namespace {

// Homothety about the inscribed center that pulls every point at least `margin` inside.
Body shrink_inward(const Body& body, double margin) {
  const Ball in = inscribed_ball(body);
  const double ratio = 1.0 - margin / in.radius();
  return apply_transform(body, Transform::homothety(in.center(), ratio));
}

}  // namespace

DistanceResult body_distance(const Body& a, const Body& b, double tol) {
  if (!(tol > 0.0)) throw InputError("distance tolerance must be positive");
  if (a.dim() != b.dim()) throw InputError("bodies live in different dimensions");
  if (const Ball* ba = a.as_ball()) {
    if (const Ball* bb = b.as_ball()) {
      const double gap = (ba->center() - bb->center()).norm() - ba->radius() - bb->radius();
      if (gap > tol) return {gap, Contact::disjoint};
      if (gap >= -tol) return {std::max(gap, 0.0), Contact::touching};
      return {0.0, Contact::overlapping};
    }
  }
  constexpr int kMaxEvaluations = 1000;
  auto sa = [&](const Vec& d) { return support_point(a.world(), d); };
  auto sb = [&](const Vec& d) { return support_point(b.world(), d); };
  const detail::GjkResult r = detail::gjk(sa, sb, a.dim(), tol, kMaxEvaluations);
  if (!r.converged) throw InconclusiveDistanceError(r.lower, r.distance);
  if (r.distance > tol) return {r.distance, Contact::disjoint};

  // Zero distance: decide between touching and overlapping by testing whether
  // copies pulled 2*tol inside still meet.
  const double ra = inscribed_ball(a).radius();
  const double rb = inscribed_ball(b).radius();
  if (ra <= 4.0 * tol || rb <= 4.0 * tol) return {r.distance, Contact::touching};
  const Body ia = shrink_inward(a, 2.0 * tol);
  const Body ib = shrink_inward(b, 2.0 * tol);
  auto sia = [&](const Vec& d) { return support_point(ia.world(), d); };
  auto sib = [&](const Vec& d) { return support_point(ib.world(), d); };
  const detail::GjkResult inner = detail::gjk(sia, sib, a.dim(), tol, kMaxEvaluations);
  if (inner.converged && inner.distance <= tol) return {0.0, Contact::overlapping};
  return {r.distance, Contact::touching};
}

}  // namespace shadowlab
