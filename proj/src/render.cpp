#include "shadowlab/render.hpp"

#include "shadowlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace shadowlab {

namespace {

using Vec2 = Eigen::Vector2d;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

struct ProjectedBall { Vec2 c; double r; };
struct ProjectedEllipse { Vec2 c; double a, b, angle_deg; };
using Polygon = std::vector<Vec2>;
using Outline = std::variant<ProjectedBall, ProjectedEllipse, Polygon>;

Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-15) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-15) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

Outline project(const Shape& world, const Mat& p) {
  return std::visit(
      [&](const auto& s) -> Outline {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return ProjectedBall{p * s.center(), s.radius()};
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          Mat m = p * s.orientation() * s.semi_axes().asDiagonal();
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(Eigen::Matrix2d(m * m.transpose()));
          Eigen::Vector2d major = eig.eigenvectors().col(1);
          double angle = std::atan2(major.y(), major.x()) * 180.0 / kPi;
          if (angle <= -90.0) angle += 180.0;
          if (angle > 90.0) angle -= 180.0;
          return ProjectedEllipse{p * s.center(), std::sqrt(std::max(0.0, eig.eigenvalues()[1])),
                                  std::sqrt(std::max(0.0, eig.eigenvalues()[0])), angle};
        } else {
          std::vector<Vec2> pts;
          for (Eigen::Index i = 0; i < s.vertices().rows(); ++i) pts.push_back(p * s.vertices().row(i).transpose());
          return convex_hull(std::move(pts));
        }
      },
      world);
}

struct Box {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  void add(const Vec2& c, double r = 0.0) {
    x0 = std::min(x0, c.x() - r);
    y0 = std::min(y0, c.y() - r);
    x1 = std::max(x1, c.x() + r);
    y1 = std::max(y1, c.y() + r);
  }
};

}  // namespace

Projection parse_projection(const std::string& spec, int dim) {
  Projection p;
  char comma = 0;
  std::istringstream in(spec);
  if (!(in >> p.first >> comma >> p.second) || comma != ',' || !in.eof())
    throw InputError("projection must look like 'i,j', got '" + spec + "'");
  if (p.first < 0 || p.second < 0 || p.first >= dim || p.second >= dim || p.first == p.second)
    throw InputError("projection indices must be distinct and below " + std::to_string(dim));
  return p;
}

std::string render_svg(const Scene& scene, const RenderOptions& options) {
  const Projection& pr = options.projection;
  if (pr.first >= scene.dim || pr.second >= scene.dim || pr.first == pr.second)
    throw InputError("projection does not fit the scene dimension");
  Mat p = Mat::Zero(2, scene.dim);
  p(0, pr.first) = 1.0;
  p(1, pr.second) = 1.0;

  std::vector<Outline> outlines;
  Box box;
  for (const auto& b : scene.bodies) {
    outlines.push_back(project(b.world(), p));
    std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, ProjectedBall>) box.add(o.c, o.r);
          else if constexpr (std::is_same_v<T, ProjectedEllipse>) box.add(o.c, o.a);
          else for (const auto& v : o) box.add(v);
        },
        outlines.back());
  }
  const Vec2 x = p * scene.point;
  box.add(x);
  if (scene.sphere) box.add(p * scene.sphere->center, scene.sphere->radius);
  double span = std::max({box.x1 - box.x0, box.y1 - box.y0, 1e-9});
  const double pad = 0.08 * span;
  const double scale = options.size_px / (span + 2 * pad);
  const double cx = 0.5 * (box.x0 + box.x1), cy = 0.5 * (box.y0 + box.y1);
  const double half = 0.5 * options.size_px;
  auto px = [&](const Vec2& v) { return Vec2(half + scale * (v.x() - cx), half - scale * (v.y() - cy)); };

  std::ostringstream out;
  const std::string size = std::to_string(options.size_px);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!scene.name.empty()) out << "<title>" << scene.name << "</title>\n";

  if (scene.sphere) {
    Vec2 c = px(p * scene.sphere->center);
    out << "<circle id=\"sphere\" cx=\"" << fmt(c.x()) << "\" cy=\"" << fmt(c.y()) << "\" r=\""
        << fmt(scale * scene.sphere->radius) << "\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"6 4\"/>\n";
  }
  const char* style = "fill=\"#4a90d9\" fill-opacity=\"0.35\" stroke=\"#1f4e8c\" stroke-width=\"1.5\"";
  for (std::size_t i = 0; i < outlines.size(); ++i) {
    const std::string id = "body" + std::to_string(i);
    std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, ProjectedBall>) {
            Vec2 c = px(o.c);
            out << "<circle id=\"" << id << "\" cx=\"" << fmt(c.x()) << "\" cy=\"" << fmt(c.y()) << "\" r=\""
                << fmt(scale * o.r) << "\" " << style << "/>\n";
          } else if constexpr (std::is_same_v<T, ProjectedEllipse>) {
            Vec2 c = px(o.c);
            out << "<ellipse id=\"" << id << "\" cx=\"" << fmt(c.x()) << "\" cy=\"" << fmt(c.y()) << "\" rx=\""
                << fmt(scale * o.a) << "\" ry=\"" << fmt(scale * o.b) << "\" transform=\"rotate("
                << fmt(-o.angle_deg) << ' ' << fmt(c.x()) << ' ' << fmt(c.y()) << ")\" " << style << "/>\n";
          } else {
            out << "<polygon id=\"" << id << "\" points=\"";
            for (std::size_t k = 0; k < o.size(); ++k) {
              Vec2 v = px(o[k]);
              out << (k ? " " : "") << fmt(v.x()) << ',' << fmt(v.y());
            }
            out << "\" " << style << "/>\n";
          }
        },
        outlines[i]);
  }

  if (options.witness) {
    Vec2 d = p * (*options.witness);
    if (d.norm() > 1e-12) {
      d.normalize();
      const double reach = 2.0 * (span + 2 * pad);
      Vec2 a = scene.mode == Mode::ray ? x : Vec2(x - reach * d);
      Vec2 b = x + reach * d;
      Vec2 pa = px(a), pb = px(b);
      out << "<line id=\"witness\" x1=\"" << fmt(pa.x()) << "\" y1=\"" << fmt(pa.y()) << "\" x2=\"" << fmt(pb.x())
          << "\" y2=\"" << fmt(pb.y()) << "\" stroke=\"#d0021b\" stroke-width=\"1.5\"/>\n";
    }
  }
  Vec2 q = px(x);
  out << "<circle id=\"point\" cx=\"" << fmt(q.x()) << "\" cy=\"" << fmt(q.y())
      << "\" r=\"3.0000\" fill=\"black\"/>\n";
  if (scene.dim > 2) {
    out << "<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"12\">orthographic projection onto axes "
        << pr.first << ',' << pr.second << " of R^" << scene.dim << "; overlaps in the picture need not be real"
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace shadowlab
