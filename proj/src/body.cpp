#include "shadowlab/body.hpp"

#include "shadowlab/distance.hpp"
#include "shadowlab/errors.hpp"
#include "shadowlab/lp.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace shadowlab {
namespace {

void require_finite(const Vec& v, const char* what) {
  if (!all_finite(v)) throw InputError(std::string(what) + " has non-finite entries");
}

// Root of sum_j w_j / (lambda + s_j)^2 = 1 in (lo, hi); the left side decreases
// on the bracket. Newton on 1/sqrt(phi) - 1 with bisection fallback.
double solve_secular(const Vec& w, const Vec& s, double lo, double hi) {
  auto phi = [&](double lambda, double* dphi) {
    double value = 0.0;
    double deriv = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      const double d = lambda + s[j];
      value += w[j] / (d * d);
      deriv -= 2.0 * w[j] / (d * d * d);
    }
    if (dphi) *dphi = deriv;
    return value;
  };
  double lambda = hi;
  for (int iter = 0; iter < 200; ++iter) {
    double dphi = 0.0;
    const double value = phi(lambda, &dphi);
    if (value > 1.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    const double psi = 1.0 / std::sqrt(value) - 1.0;
    const double dpsi = -0.5 * std::pow(value, -1.5) * dphi;
    double next = lambda - psi / dpsi;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - lambda) <= 1e-15 * (1.0 + std::abs(lambda)) || hi - lo <= 1e-15 * (1.0 + std::abs(lo))) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

double ellipsoid_signed_distance(const Ellipsoid& e, const Vec& p) {
  const Vec q = e.orientation().transpose() * (p - e.center());
  const Vec& a = e.semi_axes();
  const Eigen::Index n = a.size();
  const double level = (q.array() / a.array()).square().sum();
  const bool inside = level <= 1.0;
  const Vec s = a.array().square();
  const Vec w = (a.array() * q.array()).square();

  Vec y(n);
  if (!inside) {
    const double lambda = solve_secular(w, s, 0.0, a.maxCoeff() * q.norm());
    y = (s.array() * q.array() / (s.array() + lambda)).matrix();
    return (y - q).norm();
  }

  const double amin = a.minCoeff();
  const double smin = amin * amin;
  double min_axis_weight = 0.0;
  double rest_at_pole = 0.0;
  std::vector<bool> is_min(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    is_min[static_cast<std::size_t>(j)] = a[j] - amin <= 1e-12 * amin;
    if (is_min[static_cast<std::size_t>(j)]) {
      min_axis_weight += q[j] * q[j];
    } else {
      const double yj = s[j] * q[j] / (s[j] - smin);
      rest_at_pole += (yj / a[j]) * (yj / a[j]);
    }
  }
  if (min_axis_weight <= 1e-30 * smin && rest_at_pole <= 1.0) {
    // Hard case: the closest boundary point lies along a shortest axis.
    int first_min = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (is_min[static_cast<std::size_t>(j)]) {
        if (first_min < 0) first_min = static_cast<int>(j);
        y[j] = 0.0;
      } else {
        y[j] = s[j] * q[j] / (s[j] - smin);
      }
    }
    y[first_min] = amin * std::sqrt(std::max(0.0, 1.0 - rest_at_pole));
    return -(y - q).norm();
  }
  const double lambda = solve_secular(w, s, -smin, 0.0);
  y = (s.array() * q.array() / (s.array() + lambda)).matrix();
  return -(y - q).norm();
}

double ellipsoid_max_distance(const Ellipsoid& e, const Vec& p) {
  const Vec q0 = e.center() - p;
  const Vec& a = e.semi_axes();
  const Eigen::Index n = a.size();
  const Vec g = (a.array() * (e.orientation().transpose() * q0).array()).matrix();
  const double amax = a.maxCoeff();
  const double smax = amax * amax;
  Vec z(n);
  double max_axis_weight = 0.0;
  double rest = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (amax - a[j] <= 1e-12 * amax) {
      max_axis_weight += g[j] * g[j];
    } else {
      const double zj = g[j] / (smax - a[j] * a[j]);
      rest += zj * zj;
    }
  }
  if (max_axis_weight <= 1e-30 * (1.0 + g.squaredNorm()) && rest <= 1.0) {
    bool filled = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (amax - a[j] <= 1e-12 * amax) {
        z[j] = filled ? 0.0 : std::sqrt(std::max(0.0, 1.0 - rest));
        filled = true;
      } else {
        z[j] = g[j] / (smax - a[j] * a[j]);
      }
    }
  } else {
    const Vec w = g.array().square();
    const Vec s = -a.array().square();
    const double mu = solve_secular(w, s, smax, smax + g.norm());
    z = (g.array() / (mu - a.array().square())).matrix();
  }
  const double value = q0.squaredNorm() + 2.0 * g.dot(z) + (a.array().square() * z.array().square()).sum();
  return std::sqrt(std::max(0.0, value));
}

Mat enumerate_vertices(const Mat& A, const Vec& b) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  double combos = 1.0;
  for (int i = 0; i < n; ++i) combos = combos * (m - i) / (i + 1);
  if (combos > 2e6) throw InputError("polytope has too many facet combinations for vertex enumeration");

  std::vector<Vec> found;
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    Mat As(n, n);
    Vec bs(n);
    for (int r = 0; r < n; ++r) {
      As.row(r) = A.row(idx[static_cast<std::size_t>(r)]);
      bs[r] = b[idx[static_cast<std::size_t>(r)]];
    }
    Eigen::FullPivLU<Mat> lu(As);
    if (lu.rank() == n) {
      const Vec y = lu.solve(bs);
      if (((A * y - b).array() <= 1e-9 * scale).all()) {
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](const Vec& v) { return (v - y).norm() <= 1e-9 * scale; });
        if (!dup) found.push_back(y);
      }
    }
    int k = n - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == m - n + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < n; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  Mat V(static_cast<Eigen::Index>(found.size()), n);
  for (std::size_t i = 0; i < found.size(); ++i) V.row(static_cast<Eigen::Index>(i)) = found[i].transpose();
  return V;
}

}  // namespace

Ball::Ball(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
  require_finite(center_, "ball center");
  if (!std::isfinite(radius_)) throw InputError("ball radius is not finite");
  if (!(radius_ > 0.0)) throw DegenerateBodyError("ball radius must be positive");
}

Ellipsoid::Ellipsoid(Vec center, Vec semi_axes, Mat orientation)
    : center_(std::move(center)), semi_axes_(std::move(semi_axes)), orientation_(std::move(orientation)) {
  require_finite(center_, "ellipsoid center");
  const Eigen::Index n = center_.size();
  if (semi_axes_.size() != n || orientation_.rows() != n || orientation_.cols() != n) {
    throw InputError("ellipsoid dimensions disagree");
  }
  if (!semi_axes_.allFinite()) throw InputError("ellipsoid semi-axes are not finite");
  if (!(semi_axes_.array() > 0.0).all()) {
    throw DegenerateBodyError("ellipsoid semi-axes must be positive");
  }
  const double err = (orientation_.transpose() * orientation_ - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(err <= 1e-10)) throw InputError("ellipsoid orientation is not orthonormal");
}

Ellipsoid Ellipsoid::axis_aligned(Vec center, Vec semi_axes) {
  const Eigen::Index n = center.size();
  return Ellipsoid(std::move(center), std::move(semi_axes), Mat::Identity(n, n));
}

HPolytope::HPolytope(Mat normals, Vec offsets) {
  const Eigen::Index m = normals.rows();
  const Eigen::Index n = normals.cols();
  if (offsets.size() != m || m == 0 || n == 0) throw InputError("polytope normals and offsets disagree");
  if (!normals.allFinite() || !offsets.allFinite()) throw InputError("polytope data is not finite");
  for (Eigen::Index i = 0; i < m; ++i) {
    const double len = normals.row(i).norm();
    if (!(len > 0.0)) throw InputError("polytope has a zero normal");
    normals.row(i) /= len;
    offsets[i] /= len;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      const auto r = lp::maximize(sign * basis_vector(static_cast<int>(n), static_cast<int>(i)), normals, offsets);
      if (r.status == lp::Status::infeasible) throw DegenerateBodyError("polytope is empty");
      if (r.status == lp::Status::unbounded) throw InputError("polytope is unbounded");
    }
  }
  Mat A(m, n + 1);
  A << normals, Vec::Ones(m);
  Vec c = Vec::Zero(n + 1);
  c[n] = 1.0;
  const auto cheb = lp::maximize(c, A, offsets);
  const double scale = 1.0 + offsets.cwiseAbs().maxCoeff();
  if (cheb.status != lp::Status::optimal || !(cheb.x[n] > 1e-12 * scale)) {
    throw DegenerateBodyError("polytope has empty interior");
  }
  normals_ = std::move(normals);
  offsets_ = std::move(offsets);
  chebyshev_center_ = cheb.x.head(n);
  chebyshev_radius_ = cheb.x[n];
  vertices_ = enumerate_vertices(normals_, offsets_);
}

HPolytope HPolytope::box(const Vec& lower, const Vec& upper) {
  const Eigen::Index n = lower.size();
  Mat normals = Mat::Zero(2 * n, n);
  Vec offsets(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    normals(2 * i, i) = 1.0;
    offsets[2 * i] = upper[i];
    normals(2 * i + 1, i) = -1.0;
    offsets[2 * i + 1] = -lower[i];
  }
  return HPolytope(normals, offsets);
}

HPolytope HPolytope::regular_simplex(const Vec& center, double circumradius) {
  const int n = static_cast<int>(center.size());
  const Mat v = regular_simplex_vertices(n);
  Mat normals = -v;
  Vec offsets(n + 1);
  for (int i = 0; i <= n; ++i) offsets[i] = circumradius / n - v.row(i).dot(center);
  return HPolytope(normals, offsets);
}

HPolytope HPolytope::mapped(double scale, const Vec& shift) const {
  HPolytope out;
  out.normals_ = normals_;
  out.offsets_ = scale * offsets_ + normals_ * shift;
  out.vertices_ = (scale * vertices_).rowwise() + shift.transpose();
  out.chebyshev_center_ = scale * chebyshev_center_ + shift;
  out.chebyshev_radius_ = scale * chebyshev_radius_;
  return out;
}

Mat regular_simplex_vertices(int n) {
  if (n < 1) throw InputError("simplex dimension must be positive");
  if (n == 3) {
    Mat v(4, 3);
    v << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
    return v / std::sqrt(3.0);
  }
  // Project the standard basis of R^{n+1} onto the hyperplane orthogonal to
  // (1,...,1), expressed in a Helmert basis.
  Mat helmert = Mat::Zero(n, n + 1);
  for (int k = 1; k <= n; ++k) {
    const double norm = std::sqrt(static_cast<double>(k * (k + 1)));
    for (int j = 0; j < k; ++j) helmert(k - 1, j) = 1.0 / norm;
    helmert(k - 1, k) = -static_cast<double>(k) / norm;
  }
  Mat v = helmert.transpose();  // row i = image of e_i
  for (int i = 0; i <= n; ++i) v.row(i).normalize();
  return v;
}

Transform::Transform(Vec translation, Vec homothety_center, double ratio)
    : translation_(std::move(translation)), homothety_center_(std::move(homothety_center)), ratio_(ratio) {
  if (translation_.size() != homothety_center_.size()) throw InputError("transform dimensions disagree");
  require_finite(translation_, "translation");
  require_finite(homothety_center_, "homothety center");
  if (!(ratio_ > 0.0) || !std::isfinite(ratio_)) throw InputError("homothety ratio must be positive");
}

Transform Transform::identity(int dim) { return Transform(Vec::Zero(dim), Vec::Zero(dim), 1.0); }

Transform Transform::translation(const Vec& t) { return Transform(t, Vec::Zero(t.size()), 1.0); }

Transform Transform::homothety(const Vec& center, double ratio) {
  return Transform(Vec::Zero(center.size()), center, ratio);
}

Vec Transform::apply(const Vec& y) const {
  return homothety_center_ + ratio_ * (y + translation_ - homothety_center_);
}

Vec Transform::offset() const { return (1.0 - ratio_) * homothety_center_ + ratio_ * translation_; }

bool Transform::is_identity() const { return ratio_ == 1.0 && translation_.isZero(0.0); }

Transform Transform::compose(const Transform& first, const Transform& second) {
  // second(first(y)) = k2 (k1 y + b1) + b2
  const double k = first.ratio_ * second.ratio_;
  const Vec b = second.ratio_ * first.offset() + second.offset();
  return Transform(b / k, Vec::Zero(b.size()), k);
}

Shape transform_shape(const Shape& shape, const Transform& t) {
  return std::visit(
      [&](const auto& s) -> Shape {
        using T = std::decay_t<decltype(s)>;
        if (t.dim() != s.dim()) throw InputError("transform dimension does not match body");
        if constexpr (std::is_same_v<T, Ball>) {
          return Ball(t.apply(s.center()), t.ratio() * s.radius());
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return Ellipsoid(t.apply(s.center()), t.ratio() * s.semi_axes(), s.orientation());
        } else {
          return s.mapped(t.ratio(), t.offset());
        }
      },
      shape);
}

Body::Body(Shape shape, Transform transform)
    : shape_(std::move(shape)), transform_(std::move(transform)), world_(transform_shape(shape_, transform_)) {}

Body::Body(Shape shape) : Body(shape, Transform::identity(std::visit([](const auto& s) { return s.dim(); }, shape))) {}

int Body::dim() const {
  return std::visit([](const auto& s) { return s.dim(); }, world_);
}

Vec support_point(const Shape& world, const Vec& u) {
  return std::visit(
      [&](const auto& s) -> Vec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return s.center() + s.radius() * unit(u);
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          const Vec w = (s.semi_axes().array() * (s.orientation().transpose() * u).array()).matrix();
          const double len = w.norm();
          if (len == 0.0) return s.center();
          return s.center() + s.orientation() * (s.semi_axes().array() * (w / len).array()).matrix();
        } else {
          Eigen::Index best = 0;
          (s.vertices() * u).maxCoeff(&best);
          return s.vertices().row(best).transpose();
        }
      },
      world);
}

double support_value(const Shape& world, const Vec& u) { return u.dot(support_point(world, u)); }

Vec support(const Body& body, const Vec& u) {
  if (u.size() != body.dim()) throw InputError("direction dimension does not match body");
  if (!is_unit(u)) throw InputError("support direction must be a unit vector");
  return support_point(body.world(), u);
}

Ball inscribed_ball(const Body& body) {
  return std::visit(
      [](const auto& s) -> Ball {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return s;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return Ball(s.center(), s.semi_axes().minCoeff());
        } else {
          if (!(s.chebyshev_radius() > 0.0)) throw DegenerateBodyError("polytope has empty interior");
          return Ball(s.chebyshev_center(), s.chebyshev_radius());
        }
      },
      body.world());
}

Ball bounding_ball(const Body& body) {
  return std::visit(
      [](const auto& s) -> Ball {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return s;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return Ball(s.center(), s.semi_axes().maxCoeff());
        } else {
          const Vec lo = s.vertices().colwise().minCoeff();
          const Vec hi = s.vertices().colwise().maxCoeff();
          const Vec c = 0.5 * (lo + hi);
          const double r = (s.vertices().rowwise() - c.transpose()).rowwise().norm().maxCoeff();
          return Ball(c, r);
        }
      },
      body.world());
}

CircumscribedPolytope circumscribe_polytope(const Body& body) {
  CircumscribedPolytope out{std::visit(
      [](const auto& s) -> HPolytope {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          const Vec r = Vec::Constant(s.dim(), s.radius());
          return HPolytope::box(s.center() - r, s.center() + r);
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          const int n = s.dim();
          Mat normals(2 * n, n);
          Vec offsets(2 * n);
          for (int j = 0; j < n; ++j) {
            const Vec q = s.orientation().col(j);
            normals.row(2 * j) = q.transpose();
            offsets[2 * j] = q.dot(s.center()) + s.semi_axes()[j];
            normals.row(2 * j + 1) = -q.transpose();
            offsets[2 * j + 1] = -q.dot(s.center()) + s.semi_axes()[j];
          }
          return HPolytope(normals, offsets);
        } else {
          return s;
        }
      },
      body.world()), {}, 0};
  for (int i = 0; i < out.polytope.facet_count(); ++i) out.facet_normals.push_back(out.polytope.normals().row(i).transpose());
  out.facet_count = out.polytope.facet_count();
  return out;
}

Body apply_transform(const Body& body, const Transform& t) {
  if (t.dim() != body.dim()) throw InputError("transform dimension does not match body");
  return Body(transform_shape(body.world(), t));
}

double signed_distance(const Body& body, const Vec& p) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return (p - s.center()).norm() - s.radius();
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return ellipsoid_signed_distance(s, p);
        } else {
          const Vec slack = s.offsets() - s.normals() * p;
          const double depth = slack.minCoeff();
          if (depth >= 0.0) return -depth;
          return detail::distance_to_hull(s.vertices(), p);
        }
      },
      body.world());
}

double max_distance(const Body& body, const Vec& p) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return (p - s.center()).norm() + s.radius();
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return ellipsoid_max_distance(s, p);
        } else {
          return (s.vertices().rowwise() - p.transpose()).rowwise().norm().maxCoeff();
        }
      },
      body.world());
}

}  // namespace shadowlab
