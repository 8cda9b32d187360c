#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace shadowlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kUnitTolerance = 1e-9;

inline bool is_unit(const Vec& u, double tol = kUnitTolerance) {
  return std::abs(u.norm() - 1.0) <= tol;
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

/// Angle in [0, pi] between two unit vectors; clamps the dot product.
inline double angle_between(const Vec& a, const Vec& b) {
  // atan2 form stays accurate for nearly parallel vectors.
  return std::atan2((a - b * a.dot(b)).norm(), a.dot(b));
}

inline Vec unit(const Vec& v) { return v / v.norm(); }

inline Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline Vec basis_vector(int dim, int axis) {
  Vec e = Vec::Zero(dim);
  e[axis] = 1.0;
  return e;
}

}  // namespace shadowlab
