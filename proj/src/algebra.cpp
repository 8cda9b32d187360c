#include "shadowlab/algebra.hpp"

#include "shadowlab/errors.hpp"

namespace shadowlab {

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::real: return "real";
    case FieldKind::complex: return "complex";
    case FieldKind::quaternion: return "quaternion";
  }
  return "unknown";
}

FieldKind field_kind_from_string(const std::string& name) {
  if (name == "real") return FieldKind::real;
  if (name == "complex") return FieldKind::complex;
  if (name == "quaternion") return FieldKind::quaternion;
  throw InputError("unknown field kind '" + name + "'");
}

AlgebraStructure::AlgebraStructure(FieldKind kind, int field_dim)
    : kind_(kind), field_dim_(field_dim), real_dim_(field_dim * (kind == FieldKind::real ? 1 : kind == FieldKind::complex ? 2 : 4)) {
  if (field_dim < 1) throw InputError("field dimension must be positive");
  const int n = field_dim_;
  if (kind_ == FieldKind::complex) {
    Mat J = Mat::Zero(real_dim_, real_dim_);
    for (int b = 0; b < n; ++b) {
      // (a + b i) i = -b + a i
      J(2 * b, 2 * b + 1) = -1.0;
      J(2 * b + 1, 2 * b) = 1.0;
    }
    units_ = {J};
  } else if (kind_ == FieldKind::quaternion) {
    Mat J = Mat::Zero(real_dim_, real_dim_);
    Mat K = Mat::Zero(real_dim_, real_dim_);
    for (int b = 0; b < n; ++b) {
      const int o = 4 * b;
      // q i for q = a + b i + c j + d k is (-b, a, d, -c)
      J(o + 0, o + 1) = -1.0;
      J(o + 1, o + 0) = 1.0;
      J(o + 2, o + 3) = 1.0;
      J(o + 3, o + 2) = -1.0;
      // q j is (-c, -d, a, b)
      K(o + 0, o + 2) = -1.0;
      K(o + 1, o + 3) = -1.0;
      K(o + 2, o + 0) = 1.0;
      K(o + 3, o + 1) = 1.0;
    }
    units_ = {J, K, J * K};
  }
}

AlgebraStructure AlgebraStructure::real(int n) { return AlgebraStructure(FieldKind::real, n); }
AlgebraStructure AlgebraStructure::complex(int n) { return AlgebraStructure(FieldKind::complex, n); }
AlgebraStructure AlgebraStructure::quaternion(int n) { return AlgebraStructure(FieldKind::quaternion, n); }
AlgebraStructure AlgebraStructure::make(FieldKind kind, int field_dim) { return AlgebraStructure(kind, field_dim); }

std::vector<Vec> AlgebraStructure::line_basis(const Vec& v) const {
  std::vector<Vec> basis;
  basis.push_back(unit(v));
  for (const Mat& U : units_) {
    Vec w = U * v;
    for (const Vec& b : basis) w -= b.dot(w) * b;
    const double len = w.norm();
    if (len > 1e-12) basis.push_back(w / len);
  }
  return basis;
}

double AlgebraStructure::overlap(const Vec& a, const Vec& v) const {
  double sq = 0.0;
  for (const Vec& b : line_basis(v)) {
    const double c = a.dot(b);
    sq += c * c;
  }
  return std::sqrt(sq);
}

Vec AlgebraStructure::scale_by_unit(const Vec& v, const Vec& q) const {
  if (q.size() != block()) throw InputError("field scalar has the wrong number of components");
  Vec out = q[0] * v;
  for (std::size_t i = 0; i < units_.size(); ++i) {
    // v k = -(J K) v, since (v j) i = v (j i) = -v k.
    const double sign = (kind_ == FieldKind::quaternion && i == 2) ? -1.0 : 1.0;
    out += sign * q[static_cast<Eigen::Index>(i + 1)] * (units_[i] * v);
  }
  return out;
}

}  // namespace shadowlab
