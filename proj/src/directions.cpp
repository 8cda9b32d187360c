#include "shadowlab/directions.hpp"

#include "shadowlab/errors.hpp"
#include "shadowlab/margins.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace shadowlab {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::line: return "line";
    case Mode::ray: return "ray";
    case Mode::hyperplane: return "hyperplane";
    case Mode::cline: return "cline";
  }
  return "?";
}

Mode mode_from_string(const std::string& name) {
  if (name == "line") return Mode::line;
  if (name == "ray") return Mode::ray;
  if (name == "hyperplane") return Mode::hyperplane;
  if (name == "cline") return Mode::cline;
  throw InputError("unknown mode '" + name + "'");
}

DirectionSpace DirectionSpace::real_sphere(int ambient_dim, bool antipodal_quotient) {
  if (ambient_dim < 2) throw InputError("direction space needs ambient dimension >= 2");
  return DirectionSpace{FieldKind::real, ambient_dim, antipodal_quotient};
}

DirectionSpace DirectionSpace::for_mode(Mode mode, FieldKind kind, int ambient_dim) {
  if (ambient_dim < 2) throw InputError("direction space needs ambient dimension >= 2");
  if (mode == Mode::cline) {
    if (kind == FieldKind::real) throw InputError("cline mode needs a complex or quaternion structure");
    int block = kind == FieldKind::complex ? 2 : 4;
    if (ambient_dim % block != 0 || ambient_dim / block < 2)
      throw InputError("ambient dimension incompatible with the field structure");
    return DirectionSpace{kind, ambient_dim, true};
  }
  if (kind != FieldKind::real) throw InputError("only cline mode uses a non-real structure");
  return DirectionSpace{FieldKind::real, ambient_dim, mode != Mode::ray};
}

double DirectionSpace::diameter() const { return antipodal_quotient ? kPi / 2 : kPi; }

namespace {

double cap_margin(const Cap& cap, const Vec& u) {
  double a = angle_between(u, cap.axis);
  if (cap.antipodal) a = std::min(a, kPi - a);
  return cap.half_angle - a;
}

struct MarginVisitor {
  const Vec& u;
  double operator()(const AllDirections&) const { return std::numeric_limits<double>::infinity(); }
  double operator()(const Cap& c) const { return cap_margin(c, u); }
  double operator()(const Band& b) const {
    double d = std::min(1.0, std::abs(u.dot(b.axis)));
    return std::asin(b.cos_threshold) - std::asin(d);
  }
  double operator()(const FSCap& f) const {
    return f.structure->overlap(f.axis, u) - f.overlap_threshold;
  }
  double operator()(const MarginField& f) const {
    return f.mode == Mode::ray ? -ray_margin(f.x, u, *f.body) : -line_margin(f.x, u, *f.body);
  }
};

void check_outside(const Vec& x, const Ball& ball) {
  if (x.size() != ball.center().size()) throw InputError("point and ball dimensions differ");
  if (!all_finite(x)) throw InputError("point has non-finite coordinates");
}

}  // namespace

double region_margin(const HitRegion& region, const Vec& u) {
  return std::visit(MarginVisitor{u}, region);
}

double lipschitz_bound(const HitRegion& region) {
  if (const auto* f = std::get_if<MarginField>(&region)) return f->lipschitz_bound;
  return 1.0;
}

double normalized_margin(const HitRegion& region, const Vec& u) {
  return region_margin(region, u) / lipschitz_bound(region);
}

bool is_all_directions(const HitRegion& region) {
  return std::holds_alternative<AllDirections>(region);
}

HitRegion ball_line_region(const Vec& x, const Ball& ball) {
  check_outside(x, ball);
  Vec w = ball.center() - x;
  double d = w.norm();
  if (d <= ball.radius()) return AllDirections{};
  return Cap{w / d, std::asin(ball.radius() / d), true};
}

HitRegion ball_ray_region(const Vec& x, const Ball& ball) {
  HitRegion r = ball_line_region(x, ball);
  if (auto* cap = std::get_if<Cap>(&r)) cap->antipodal = false;
  return r;
}

HitRegion ball_hyperplane_region(const Vec& x, const Ball& ball) {
  check_outside(x, ball);
  Vec w = ball.center() - x;
  double d = w.norm();
  if (d <= ball.radius()) return AllDirections{};
  return Band{w / d, ball.radius() / d};
}

HitRegion ball_cline_region(const Vec& x, const Ball& ball, std::shared_ptr<const AlgebraStructure> s) {
  if (!s || s->kind() == FieldKind::real) throw InputError("cline regions need a complex or quaternion structure");
  check_outside(x, ball);
  if (x.size() != s->real_dim()) throw InputError("structure dimension differs from the point dimension");
  Vec w = ball.center() - x;
  double d = w.norm();
  if (d <= ball.radius()) return AllDirections{};
  double q = ball.radius() / d;
  return FSCap{w / d, std::sqrt(1.0 - q * q), std::move(s)};
}

HitRegion body_margin_region(const Vec& x, std::shared_ptr<const Body> body, Mode mode) {
  if (!body) throw InputError("missing body");
  if (mode != Mode::line && mode != Mode::ray) throw InputError("margin fields support line and ray modes");
  if (x.size() != body->dim()) throw InputError("point and body dimensions differ");
  if (signed_distance(*body, x) <= 0.0) return AllDirections{};
  Ball bound = bounding_ball(*body);
  double lip = (x - bound.center()).norm() + bound.radius();
  return MarginField{x, std::move(body), mode, lip};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vec sample_direction(const DirectionSpace& space, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(space.ambient_dim);
  for (;;) {
    for (int i = 0; i < space.ambient_dim; ++i) v[i] = normal(rng);
    double n = v.norm();
    if (n > 1e-8) return v / n;
  }
}

namespace detail {

CubeSphere::CubeSphere(int dim, int base_divisions) : dim_(dim), base_(base_divisions) {
  if (dim < 2) throw InputError("cube sphere needs dimension >= 2");
  if (base_divisions < 1) throw InputError("cube sphere needs at least one division");
}

std::vector<SphereCell> CubeSphere::base_cells(bool antipodal_quotient) const {
  std::vector<SphereCell> cells;
  const int free = dim_ - 1;
  std::size_t per_facet = 1;
  for (int i = 0; i < free; ++i) per_facet *= static_cast<std::size_t>(base_);
  for (int axis = 0; axis < dim_; ++axis) {
    for (int sign : {1, -1}) {
      if (antipodal_quotient && sign < 0) continue;
      for (std::size_t k = 0; k < per_facet; ++k) {
        SphereCell c;
        c.axis = static_cast<std::int16_t>(axis);
        c.sign = static_cast<std::int8_t>(sign);
        c.index.resize(free);
        std::size_t rest = k;
        for (int j = 0; j < free; ++j) {
          c.index[j] = static_cast<std::int32_t>(rest % base_);
          rest /= base_;
        }
        cells.push_back(std::move(c));
      }
    }
  }
  return cells;
}

Vec CubeSphere::facet_point(const SphereCell& cell, const std::vector<double>& angles) const {
  Vec p(dim_);
  int j = 0;
  for (int i = 0; i < dim_; ++i) {
    if (i == cell.axis) {
      p[i] = cell.sign;
    } else {
      p[i] = std::tan(angles[j++]);
    }
  }
  return p / p.norm();
}

Vec CubeSphere::center(const SphereCell& cell) const {
  const double step = (kPi / 2) / (static_cast<double>(base_) * std::ldexp(1.0, cell.level));
  std::vector<double> angles(cell.index.size());
  for (std::size_t j = 0; j < angles.size(); ++j) angles[j] = -kPi / 4 + (cell.index[j] + 0.5) * step;
  return facet_point(cell, angles);
}

double CubeSphere::radius(const SphereCell& cell) const {
  // The angular distance to the center is quasiconvex on the facet plane, so
  // the maximum over the (tangent-space) box is attained at a corner.
  const double step = (kPi / 2) / (static_cast<double>(base_) * std::ldexp(1.0, cell.level));
  const std::size_t free = cell.index.size();
  Vec c = center(cell);
  std::vector<double> angles(free);
  double worst = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << free); ++mask) {
    for (std::size_t j = 0; j < free; ++j) {
      double lo = -kPi / 4 + cell.index[j] * step;
      angles[j] = (mask >> j) & 1U ? lo + step : lo;
    }
    worst = std::max(worst, angle_between(c, facet_point(cell, angles)));
  }
  return worst;
}

std::vector<SphereCell> CubeSphere::children(const SphereCell& cell) const {
  const std::size_t free = cell.index.size();
  std::vector<SphereCell> out;
  out.reserve(std::size_t{1} << free);
  for (std::size_t mask = 0; mask < (std::size_t{1} << free); ++mask) {
    SphereCell c = cell;
    c.level = static_cast<std::int8_t>(cell.level + 1);
    for (std::size_t j = 0; j < free; ++j) c.index[j] = 2 * cell.index[j] + static_cast<std::int32_t>((mask >> j) & 1U);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

namespace {

Net circle_net(double delta, bool quotient, std::size_t max_points) {
  double raw = 2 * kPi / delta;
  double n = std::ceil(raw - 1e-9);
  if (n > static_cast<double>(max_points)) throw ResourceError("net too large for the point budget", delta, n);
  auto count = static_cast<std::size_t>(n);
  if (count % 2 == 1) ++count;
  count = std::max<std::size_t>(count, 4);
  std::size_t keep = quotient ? count / 2 : count;
  Net net;
  net.points.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    double t = 2 * kPi * static_cast<double>(k) / static_cast<double>(count);
    net.points.push_back(make_vec({std::cos(t), std::sin(t)}));
  }
  net.resolution = kPi / static_cast<double>(count);
  return net;
}

// Spherical circumradius of the triangle (a, b, c).
double circumradius(const Vec& a, const Vec& b, const Vec& c) {
  Eigen::Vector3d x = a, y = b, z = c;
  Eigen::Vector3d n = (y - x).cross(z - x);
  if (n.dot(x + y + z) < 0) n = -n;
  n.normalize();
  return angle_between(n, a);
}

Net icosahedral_net(double delta, bool quotient, std::size_t max_points) {
  const double phi = (1 + std::sqrt(5.0)) / 2;
  std::vector<Vec> verts;
  const double base[12][3] = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                              {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                              {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (const auto& p : base) verts.push_back(unit(make_vec({p[0], p[1], p[2]})));
  std::vector<std::array<int, 3>> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  auto max_radius = [&]() {
    double r = 0.0;
    for (const auto& f : faces) r = std::max(r, circumradius(verts[f[0]], verts[f[1]], verts[f[2]]));
    return r;
  };
  double resolution = max_radius();
  while (resolution > delta) {
    // Each subdivision roughly quadruples the vertex count.
    double estimate = static_cast<double>(verts.size()) * 4.0;
    if (estimate > static_cast<double>(max_points))
      throw ResourceError("net too large for the point budget", delta, estimate);
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back(unit(verts[a] + verts[b]));
      int id = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
    resolution = max_radius();
  }
  Net net;
  net.resolution = resolution;
  for (const Vec& v : verts) {
    if (quotient) {
      // The vertex set is centrally symmetric; keep the representative whose
      // first nonzero coordinate is positive.
      int lead = std::abs(v[0]) > 1e-12 ? 0 : (std::abs(v[1]) > 1e-12 ? 1 : 2);
      if (v[lead] < 0) continue;
    }
    net.points.push_back(v);
  }
  return net;
}

Net cube_sphere_net(int dim, double delta, bool quotient, std::size_t max_points) {
  int s = static_cast<int>(std::ceil(kPi * std::sqrt(dim - 1.0) / (4 * delta) - 1e-9));
  s = std::max(s, 1);
  for (;;) {
    double facets = quotient ? dim : 2.0 * dim;
    double size = facets * std::pow(static_cast<double>(s), dim - 1);
    if (size > static_cast<double>(max_points)) throw ResourceError("net too large for the point budget", delta, size);
    detail::CubeSphere grid(dim, s);
    Net net;
    net.points.reserve(static_cast<std::size_t>(size));
    double worst = 0.0;
    for (const auto& cell : grid.base_cells(quotient)) {
      net.points.push_back(grid.center(cell));
      worst = std::max(worst, grid.radius(cell));
    }
    if (worst <= delta) {
      net.resolution = worst;
      return net;
    }
    s = static_cast<int>(std::ceil(s * worst / delta));
  }
}

}  // namespace

Net build_net(const DirectionSpace& space, double delta, std::size_t max_points) {
  if (!(delta > 0) || !std::isfinite(delta)) throw InputError("net resolution must be positive");
  if (space.ambient_dim == 2) return circle_net(delta, space.antipodal_quotient, max_points);
  if (space.ambient_dim == 3) return icosahedral_net(delta, space.antipodal_quotient, max_points);
  return cube_sphere_net(space.ambient_dim, delta, space.antipodal_quotient, max_points);
}

}  // namespace shadowlab
