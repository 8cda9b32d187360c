#include "shadowlab/constructions.hpp"

#include "shadowlab/distance.hpp"
#include "shadowlab/errors.hpp"
#include "shadowlab/margins.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace shadowlab {

namespace {

// Largest t with origin + t u still in the body (origin interior).
double exit_parameter(const Body& body, const Vec& origin, const Vec& u) {
  double lo = 0.0, hi = max_distance(body, origin) * 1.5 + 1e-9;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (signed_distance(body, origin + mid * u) <= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

std::vector<Vec> independent_normals(const std::vector<Vec>& normals, int n) {
  std::vector<Vec> chosen;
  Mat basis(n, 0);
  for (const Vec& v : normals) {
    Mat trial(n, basis.cols() + 1);
    trial << basis, v;
    Eigen::FullPivLU<Mat> lu(trial);
    lu.setThreshold(1e-9);
    if (lu.rank() == trial.cols()) {
      basis = trial;
      chosen.push_back(v);
      if (static_cast<int>(chosen.size()) == n) break;
    }
  }
  if (static_cast<int>(chosen.size()) < n) throw Error(ErrorKind::construction_failed, "circumscribed polytope has too few independent facets");
  return chosen;
}

FamilyResult build_family(const Body& input, const Vec& origin, const FamilyOptions& options, bool all_facets) {
  const int n = input.dim();
  if (origin.size() != n) throw InputError("origin dimension differs from the body");
  if (!(options.shrink > 0 && options.shrink < 1)) throw InputError("shrink factor must lie in (0, 1)");

  Body base(input.world());
  FamilyResult out;
  out.trace.recentering = Vec::Zero(n);
  if (signed_distance(base, origin) >= 0.0) {
    // Translate the body so that O becomes interior.
    out.trace.recentering = origin - inscribed_ball(base).center();
    base = apply_transform(base, Transform::translation(out.trace.recentering));
  }

  CircumscribedPolytope cp = circumscribe_polytope(base);
  std::vector<Vec> dirs = all_facets ? cp.facet_normals : independent_normals(cp.facet_normals, n);
  const HPolytope& poly = cp.polytope;

  double eta = options.eta > 0 ? options.eta : 0.05 * bounding_ball(base).radius();
  std::ostringstream failures;
  for (int iter = 1; iter <= options.max_iterations; ++iter, eta *= options.shrink) {
    ConstructionTrace& tr = out.trace;
    tr.facet_points.clear();
    tr.boundary_points.clear();
    tr.offset_points.clear();
    tr.ray_directions = dirs;
    tr.coefficients.clear();
    tr.eta = eta;
    tr.iterations = iter;

    std::vector<Vec> shifts;
    for (const Vec& u : dirs) {
      // Facet plane of the circumscribed polytope with this outward normal.
      double offset = -std::numeric_limits<double>::infinity();
      for (int f = 0; f < poly.facet_count(); ++f)
        if ((poly.normals().row(f).transpose() - u).norm() < 1e-12) offset = poly.offsets()[f];
      tr.facet_points.push_back(origin + (offset - u.dot(origin)) * u);
      Vec y = origin + exit_parameter(base, origin, u) * u;
      Vec z = y + eta * u;
      tr.boundary_points.push_back(y);
      tr.offset_points.push_back(z);
      shifts.push_back(origin - z);
    }
    std::vector<Body> copies;
    for (const Vec& s : shifts) copies.emplace_back(base.shape(), Transform::translation(s));
    tr.r1 = 0.0;
    tr.r2 = std::numeric_limits<double>::infinity();
    for (const Body& b : copies) {
      tr.r1 = std::max(tr.r1, max_distance(b, origin));
      tr.r2 = std::min(tr.r2, signed_distance(b, origin));
    }
    const double ratio = tr.r2 / tr.r1;
    Scene scene;
    scene.dim = n;
    scene.mode = all_facets ? Mode::ray : Mode::line;
    scene.point = origin;
    scene.name = all_facets ? "theorem3" : "theorem1";
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      double k = std::pow(ratio, static_cast<double>(i));
      if (i > 0) tr.coefficients.push_back(k);
      scene.bodies.emplace_back(base.shape(), Transform(shifts[i], origin, k));
    }
    scene.params = {{"eta", eta}, {"shrink", options.shrink}, {"iterations", iter},
                    {"body_count", static_cast<int>(scene.bodies.size())}};
    SceneCheck check = check_scene(scene);
    if (!check.disjoint) {
      failures << "iteration " << iter << ": bodies touch (gap " << check.min_gap << ")\n";
      continue;
    }
    VerifyResult v = verify_scene(scene, options.verify);
    if (std::holds_alternative<Covered>(v.verdict)) {
      out.scene = std::move(scene);
      out.verification = std::move(v);
      return out;
    }
    failures << "iteration " << iter << ": verdict " << verdict_name(v.verdict) << "\n";
  }
  throw Error(ErrorKind::construction_failed, "no admissible offset found after " +
                                                  std::to_string(options.max_iterations) + " iterations\n" + failures.str());
}

}  // namespace

FamilyResult construct_theorem1(const Body& body, const Vec& origin, const FamilyOptions& options) {
  return build_family(body, origin, options, false);
}

FamilyResult construct_theorem3(const Body& body, const Vec& origin, const FamilyOptions& options) {
  return build_family(body, origin, options, true);
}

Scene construct_theorem2(double eps, double shrink) {
  if (!(eps >= 0) || !std::isfinite(eps)) throw InputError("eps must be non-negative");
  if (!(shrink >= 0)) throw InputError("shrink must be non-negative");
  const double c = kTheorem2C;
  const double r[3] = {c + eps, c - eps / 2, c - eps / 4};
  if (r[1] <= 0) throw InputError("eps too large: a radius vanishes");
  // Triangle with side lengths r_i + r_j.
  const double a01 = r[0] + r[1], a02 = r[0] + r[2], a12 = r[1] + r[2];
  Eigen::Vector2d p0(0, 0), p1(a01, 0);
  double x = (a01 * a01 + a02 * a02 - a12 * a12) / (2 * a01);
  double y2 = a02 * a02 - x * x;
  if (y2 <= 0) throw InputError("eps too large: degenerate center triangle");
  Eigen::Vector2d p2(x, std::sqrt(y2));
  // Circumcenter.
  double d = 2 * (p0.x() * (p1.y() - p2.y()) + p1.x() * (p2.y() - p0.y()) + p2.x() * (p0.y() - p1.y()));
  auto sq = [](const Eigen::Vector2d& p) { return p.squaredNorm(); };
  Eigen::Vector2d o((sq(p0) * (p1.y() - p2.y()) + sq(p1) * (p2.y() - p0.y()) + sq(p2) * (p0.y() - p1.y())) / d,
                    (sq(p0) * (p2.x() - p1.x()) + sq(p1) * (p0.x() - p2.x()) + sq(p2) * (p1.x() - p0.x())) / d);
  const double R = (p0 - o).norm();
  for (double ri : r)
    if (ri >= R) throw InputError("eps too large: a radius reaches the circumradius");
  // Put the first center at angle pi/2 and keep counterclockwise order.
  const Eigen::Vector2d q0 = (p0 - o) / R;
  const double rot = kPi / 2 - std::atan2(q0.y(), q0.x());
  Eigen::Matrix2d rm;
  rm << std::cos(rot), -std::sin(rot), std::sin(rot), std::cos(rot);
  const Eigen::Vector2d pts[3] = {p0, p1, p2};
  Scene s;
  s.dim = 2;
  s.mode = Mode::line;
  s.point = Vec::Zero(2);
  s.sphere = SphereInfo{Vec::Zero(2), 1.0};
  s.name = "theorem2";
  s.params = {{"eps", eps}, {"shrink", shrink}};
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector2d cpos = rm * ((pts[i] - o) / R);
    double radius = r[i] / R - shrink;
    if (radius <= 0) throw InputError("shrink removes a disk");
    s.bodies.emplace_back(Ball(Vec(cpos), radius));
  }
  return s;
}

Scene construct_remark1(double shrink) {
  const Mat v = regular_simplex_vertices(3);
  const double r = 0.5 * (v.row(0) - v.row(1)).norm() - shrink;
  if (r <= 0) throw InputError("shrink removes the balls");
  Scene s;
  s.dim = 3;
  s.mode = Mode::line;
  s.point = 0.5 * (v.row(0) + v.row(1)).transpose();
  s.sphere = SphereInfo{Vec::Zero(3), 1.0};
  s.name = "remark1";
  s.params = {{"shrink", shrink}};
  for (int i = 0; i < 4; ++i) s.bodies.emplace_back(Ball(v.row(i).transpose(), r));
  return s;
}

Scene construct_remark3(int n) {
  if (n < 2) throw InputError("remark3 needs n >= 2");
  const Mat v = regular_simplex_vertices(n);
  const double r = 0.5 * (1.0 + 1.0 / n);
  Scene s;
  s.dim = n;
  s.mode = Mode::hyperplane;
  s.point = Vec::Zero(n);
  s.sphere = SphereInfo{Vec::Zero(n), 1.0};
  s.name = "remark3";
  s.params = {{"n", n}};
  for (int i = 0; i <= n; ++i) s.bodies.emplace_back(Ball(v.row(i).transpose(), r));
  return s;
}

EscapeResult construct_remark4_escape(const Scene& scene, const Vec& x, const SearchBudget& budget) {
  if (scene.bodies.empty()) throw InputError("escape needs at least one body");
  if (x.size() != scene.dim) throw InputError("query point dimension differs from the scene");
  std::vector<Ball> balls;
  for (const auto& b : scene.bodies) {
    if (!b.is_ball()) throw InputError("escape works on ball families");
    balls.push_back(*b.as_ball());
  }
  auto margins_of = [&](const Vec& u) {
    std::vector<double> m;
    for (const auto& b : scene.bodies) m.push_back(ray_margin(x, u, b));
    return m;
  };
  auto all_positive = [](const std::vector<double>& m) {
    for (double v : m)
      if (!(v > 0)) return false;
    return true;
  };

  EscapeResult out;
  if (balls.size() == 1) {
    Vec away = x - balls[0].center();
    out.direction = away.norm() > 0 ? unit(away) : basis_vector(scene.dim, 0);
    out.gap_point = x + out.direction;
  } else {
    // Closest pair of centers and the midpoint of the gap between the two balls.
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < balls.size(); ++i)
      for (std::size_t j = i + 1; j < balls.size(); ++j) {
        double d = (balls[i].center() - balls[j].center()).norm();
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    Vec u = (balls[bj].center() - balls[bi].center()) / best;
    double gap = best - balls[bi].radius() - balls[bj].radius();
    out.gap_point = balls[bi].center() + (balls[bi].radius() + 0.5 * gap) * u;
    Vec toward = out.gap_point - x;
    out.direction = toward.norm() > 0 ? unit(toward) : u;
  }
  out.margins = margins_of(out.direction);
  if (all_positive(out.margins)) {
    out.from_recipe = true;
    return out;
  }
  CoverageProblem p = coverage_problem_at(scene, x);
  p.space = DirectionSpace::real_sphere(scene.dim, false);
  for (auto& r : p.regions) {
    if (auto* cap = std::get_if<Cap>(&r)) cap->antipodal = false;
  }
  auto w = falsify(p, budget);
  if (w) {
    auto m = margins_of(w->direction);
    if (all_positive(m)) {
      out.direction = w->direction;
      out.margins = m;
      out.from_recipe = false;
      return out;
    }
  }
  throw Error(ErrorKind::escape_not_found, "no escaping ray found within the search budget");
}

int theorem4_real_dim(int n, FieldKind field) {
  if (n < 2) throw InputError("field dimension must be at least 2");
  switch (field) {
    case FieldKind::complex: return 2 * n - 1;
    case FieldKind::quaternion: return 4 * n - 3;
    case FieldKind::real: break;
  }
  throw InputError("theorem4 needs a complex or quaternion field");
}

Scene construct_theorem4(int n, FieldKind field, const Scene& real_config) {
  const int d = theorem4_real_dim(n, field);
  if (real_config.field != FieldKind::real || real_config.dim != d)
    throw Error(ErrorKind::dependency, "theorem4 needs a real configuration in dimension " + std::to_string(d) +
                                           ", got dimension " + std::to_string(real_config.dim));
  const int block = field == FieldKind::complex ? 2 : 4;
  const int ambient = block * n;
  const DirectionSpace space = DirectionSpace::for_mode(Mode::cline, field, ambient);
  Scene s;
  s.field = field;
  s.dim = ambient;
  s.mode = Mode::cline;
  s.point = embed_certification_point(space, real_config.point);
  if (real_config.sphere)
    s.sphere = SphereInfo{embed_certification_point(space, real_config.sphere->center), real_config.sphere->radius};
  s.name = "theorem4";
  s.seed = real_config.seed;
  s.params = {{"n", n}, {"field", to_string(field)}, {"source", real_config.name},
              {"source_params", real_config.params}};
  for (const auto& b : real_config.bodies) {
    const Ball* ball = b.as_ball();
    if (!ball) throw Error(ErrorKind::dependency, "theorem4 needs a ball configuration");
    s.bodies.emplace_back(Ball(embed_certification_point(space, ball->center()), ball->radius()));
  }
  return s;
}

}  // namespace shadowlab
