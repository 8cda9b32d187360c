#pragma once

#include "shadowlab/body.hpp"
#include "shadowlab/directions.hpp"

#include <cmath>
#include <random>

namespace testing_support {

using shadowlab::Mat;
using shadowlab::Rng;
using shadowlab::Vec;

inline Vec gaussian(int dim, Rng& rng) {
  std::normal_distribution<double> g;
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = g(rng);
  return v;
}

inline Vec random_unit(int dim, Rng& rng) { return gaussian(dim, rng).normalized(); }

inline double uniform(double lo, double hi, Rng& rng) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Mat random_rotation(int dim, Rng& rng) {
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i) a.col(i) = gaussian(dim, rng);
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ();
}

// Parameter interval {t : x + t u in polytope}, by clipping against each slab.
inline bool polytope_line_interval(const Mat& normals, const Vec& offsets, const Vec& x, const Vec& u, double& lo,
                                   double& hi) {
  lo = -1e300;
  hi = 1e300;
  for (Eigen::Index i = 0; i < normals.rows(); ++i) {
    const double a = normals.row(i).dot(u);
    const double b = offsets[i] - normals.row(i).dot(x);
    if (std::abs(a) < 1e-15) {
      if (b < 0) return false;
      continue;
    }
    if (a > 0) hi = std::min(hi, b / a);
    else lo = std::max(lo, b / a);
  }
  return lo <= hi;
}

// Real roots of the ellipsoid quadratic (x + t u - c)^T A (x + t u - c) = 1.
inline bool ellipsoid_line_interval(const Vec& c, const Vec& axes, const Mat& q, const Vec& x, const Vec& u,
                                    double& lo, double& hi) {
  Mat a = q * axes.cwiseInverse().cwiseAbs2().asDiagonal() * q.transpose();
  const Vec d = x - c;
  const double qa = u.dot(a * u), qb = 2 * u.dot(a * d), qc = d.dot(a * d) - 1.0;
  const double disc = qb * qb - 4 * qa * qc;
  if (disc < 0) return false;
  lo = (-qb - std::sqrt(disc)) / (2 * qa);
  hi = (-qb + std::sqrt(disc)) / (2 * qa);
  return true;
}

}  // namespace testing_support
