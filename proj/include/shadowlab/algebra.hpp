#pragma once

#include "shadowlab/linalg.hpp"

#include <string>
#include <vector>

namespace shadowlab {

enum class FieldKind { real, complex, quaternion };

const char* to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& name);

/// Real coordinates of K^n with the action of the imaginary units.
///
/// Complex vectors are stored as blocks (re, im); quaternionic vectors as
/// blocks (1, i, j, k) with scalars acting on the right. J and K are right
/// multiplication by i and j, and L = J K.
class AlgebraStructure {
 public:
  static AlgebraStructure real(int n);
  static AlgebraStructure complex(int n);
  static AlgebraStructure quaternion(int n);
  static AlgebraStructure make(FieldKind kind, int field_dim);

  FieldKind kind() const { return kind_; }
  int field_dim() const { return field_dim_; }
  int real_dim() const { return real_dim_; }
  int block() const { return kind_ == FieldKind::real ? 1 : (kind_ == FieldKind::complex ? 2 : 4); }
  /// Imaginary-unit maps (empty for real, {J} for complex, {J, K, L} for quaternions).
  const std::vector<Mat>& units() const { return units_; }

  /// Orthonormal real basis of the field line through the origin spanned by v.
  std::vector<Vec> line_basis(const Vec& v) const;
  /// |<a, v>| for unit v: the norm of the projection of a onto the field line of v.
  double overlap(const Vec& a, const Vec& v) const;
  /// v times the unit field scalar with real coordinates `q` (length = block()).
  Vec scale_by_unit(const Vec& v, const Vec& q) const;

 private:
  AlgebraStructure(FieldKind kind, int field_dim);

  FieldKind kind_;
  int field_dim_;
  int real_dim_;
  std::vector<Mat> units_;
};

}  // namespace shadowlab
