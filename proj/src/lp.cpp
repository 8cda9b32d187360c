#include "shadowlab/lp.hpp"

#include <limits>
#include <vector>

namespace shadowlab::lp {
namespace {

constexpr double kPivotEps = 1e-11;

struct Tableau {
  // Row 0 holds the objective in "z - c·x = 0" form; the last column is the rhs.
  Mat t;
  std::vector<int> basis;  // basis[r] for constraint rows r = 1..m (index r-1)

  int rows() const { return static_cast<int>(t.rows()); }
  int rhs() const { return static_cast<int>(t.cols()) - 1; }

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int r = 0; r < rows(); ++r) {
      if (r == row) continue;
      const double f = t(r, col);
      if (f != 0.0) t.row(r) -= f * t.row(row);
    }
    basis[row - 1] = col;
  }

  // Returns false when the objective is unbounded along some column.
  bool optimize(int usable_cols) {
    for (int iter = 0; iter < 50000; ++iter) {
      int enter = -1;
      for (int j = 0; j < usable_cols; ++j) {
        if (t(0, j) < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 1; r < rows(); ++r) {
        const double a = t(r, enter);
        if (a > kPivotEps) {
          const double ratio = t(r, rhs()) / a;
          if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave > 0 && basis[r - 1] < basis[leave - 1])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return true;
  }
};

}  // namespace

Result maximize(const Vec& c, const Mat& A, const Vec& b) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  int artificial = 0;
  for (int i = 0; i < m; ++i) artificial += b[i] < 0.0 ? 1 : 0;

  // Columns: x+ (n) | x- (n) | slack (m) | artificial | rhs
  const int structural = 2 * n + m;
  const int cols = structural + artificial + 1;
  Tableau tab;
  tab.t = Mat::Zero(m + 1, cols);
  tab.basis.assign(m, -1);
  int next_art = structural;
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    tab.t.block(i + 1, 0, 1, n) = sign * A.row(i);
    tab.t.block(i + 1, n, 1, n) = -sign * A.row(i);
    tab.t(i + 1, 2 * n + i) = sign;
    tab.t(i + 1, cols - 1) = sign * b[i];
    if (b[i] < 0.0) {
      tab.t(i + 1, next_art) = 1.0;
      tab.basis[i] = next_art++;
    } else {
      tab.basis[i] = 2 * n + i;
    }
  }

  Result result;
  if (artificial > 0) {
    // Phase one: maximize -sum(artificial).
    for (int j = structural; j < structural + artificial; ++j) tab.t(0, j) = 1.0;
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] >= structural) tab.t.row(0) -= tab.t.row(i + 1);
    }
    tab.optimize(structural + artificial);
    if (tab.t(0, cols - 1) < -1e-9) {
      result.status = Status::infeasible;
      return result;
    }
    // Drive remaining artificial variables out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < structural) continue;
      for (int j = 0; j < structural; ++j) {
        if (std::abs(tab.t(i + 1, j)) > kPivotEps) {
          tab.pivot(i + 1, j);
          break;
        }
      }
    }
  }

  tab.t.row(0).setZero();
  for (int j = 0; j < n; ++j) {
    tab.t(0, j) = -c[j];
    tab.t(0, n + j) = c[j];
  }
  for (int i = 0; i < m; ++i) {
    const int bj = tab.basis[i];
    const double f = tab.t(0, bj);
    if (f != 0.0) tab.t.row(0) -= f * tab.t.row(i + 1);
  }
  if (!tab.optimize(structural)) {
    result.status = Status::unbounded;
    return result;
  }

  Vec z = Vec::Zero(structural);
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < structural) z[tab.basis[i]] = tab.t(i + 1, cols - 1);
  }
  result.status = Status::optimal;
  result.x = z.head(n) - z.segment(n, n);
  result.value = c.dot(result.x);
  return result;
}

}  // namespace shadowlab::lp
