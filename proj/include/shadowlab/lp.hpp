#pragma once

#include "shadowlab/linalg.hpp"

namespace shadowlab::lp {

enum class Status { optimal, unbounded, infeasible };

struct Result {
  Status status = Status::infeasible;
  double value = 0.0;
  Vec x;
};

/// Maximizes c·x subject to A x <= b with x unrestricted in sign.
/// Dense two-phase simplex with Bland's rule; intended for the small
/// programs that polytope validation and Chebyshev centers need.
Result maximize(const Vec& c, const Mat& A, const Vec& b);

}  // namespace shadowlab::lp
