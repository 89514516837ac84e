#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fermigns/grid.hpp"

namespace fermigns {

using cplx = std::complex<double>;

enum class FieldTag : std::uint32_t { generic = 0, orbital = 1, density = 2, potential = 3 };

std::string to_string(FieldTag tag);
FieldTag field_tag_from_string(const std::string& name);

/// Complex samples of a function on a Grid.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& grid, FieldTag tag = FieldTag::generic);
  Field(const Grid& grid, std::vector<cplx> values, FieldTag tag = FieldTag::generic);

  /// Samples f(x, y, z) at every grid point.
  static Field sample(const Grid& grid, const std::function<cplx(double, double, double)>& f,
                      FieldTag tag = FieldTag::generic);
  /// Real field from real samples.
  static Field from_real(const Grid& grid, std::span<const double> values,
                         FieldTag tag = FieldTag::generic);

  const Grid& grid() const { return grid_; }
  FieldTag tag() const { return tag_; }
  void set_tag(FieldTag tag) { tag_ = tag; }

  std::size_t size() const { return values_.size(); }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  std::vector<double> real_part() const;
  double max_abs_imag() const;

  /// Same samples attached to another grid with the same n (dilation/translation
  /// by re-interpretation).
  Field reinterpreted(const Grid& grid) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx s);
  Field& operator*=(double s);

 private:
  Grid grid_;
  FieldTag tag_ = FieldTag::generic;
  std::vector<cplx> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
Field operator*(cplx s, Field a);

/// Discrete L2 inner product h^3 sum conj(a) b.
cplx inner(const Field& a, const Field& b);
double norm(const Field& a);
/// h^3 sum of the real parts.
double integral(const Field& a);
/// h^3 sum over plain real arrays on a grid.
double integral(const Grid& grid, std::span<const double> values);
/// a += s * b
void axpy(cplx s, const Field& b, Field& a);

}  // namespace fermigns
