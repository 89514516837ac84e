#include "fermigns/field.hpp"

#include <cmath>

#include "fermigns/error.hpp"

namespace fermigns {

std::string to_string(FieldTag tag) {
  switch (tag) {
    case FieldTag::orbital: return "orbital";
    case FieldTag::density: return "density";
    case FieldTag::potential: return "potential";
    case FieldTag::generic: break;
  }
  return "generic";
}

FieldTag field_tag_from_string(const std::string& name) {
  if (name == "orbital") return FieldTag::orbital;
  if (name == "density") return FieldTag::density;
  if (name == "potential") return FieldTag::potential;
  if (name == "generic") return FieldTag::generic;
  throw InputError("unknown field tag '" + name + "'");
}

Field::Field(const Grid& grid, FieldTag tag) : grid_(grid), tag_(tag), values_(grid.size()) {}

Field::Field(const Grid& grid, std::vector<cplx> values, FieldTag tag)
    : grid_(grid), tag_(tag), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InputError("field sample count does not match grid");
  }
}

Field Field::sample(const Grid& grid, const std::function<cplx(double, double, double)>& f,
                    FieldTag tag) {
  Field out(grid, tag);
  const int n = grid.points();
  for (int ix = 0; ix < n; ++ix) {
    const double x = grid.coordinate(0, ix);
    for (int iy = 0; iy < n; ++iy) {
      const double y = grid.coordinate(1, iy);
      for (int iz = 0; iz < n; ++iz) {
        out.values_[grid.flat(ix, iy, iz)] = f(x, y, grid.coordinate(2, iz));
      }
    }
  }
  return out;
}

Field Field::from_real(const Grid& grid, std::span<const double> values, FieldTag tag) {
  if (values.size() != grid.size()) throw InputError("field sample count does not match grid");
  Field out(grid, tag);
  for (std::size_t i = 0; i < values.size(); ++i) out.values_[i] = values[i];
  return out;
}

std::vector<double> Field::real_part() const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].real();
  return out;
}

double Field::max_abs_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

Field Field::reinterpreted(const Grid& grid) const {
  if (grid.points() != grid_.points()) {
    throw InputError("re-interpretation requires the same number of points");
  }
  Field out = *this;
  out.grid_ = grid;
  return out;
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(grid_, other.grid_, "Field::operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(grid_, other.grid_, "Field::operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }
Field operator*(cplx s, Field a) { return a *= s; }

cplx inner(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  cplx acc{0.0, 0.0};
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) acc += std::conj(av[i]) * bv[i];
  return acc * a.grid().cell_volume();
}

double norm(const Field& a) {
  double acc = 0.0;
  for (const auto& v : a.values()) acc += std::norm(v);
  return std::sqrt(acc * a.grid().cell_volume());
}

double integral(const Field& a) {
  double acc = 0.0;
  for (const auto& v : a.values()) acc += v.real();
  return acc * a.grid().cell_volume();
}

double integral(const Grid& grid, std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * grid.cell_volume();
}

void axpy(cplx s, const Field& b, Field& a) {
  require_same_grid(a.grid(), b.grid(), "axpy");
  auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] += s * bv[i];
}

}  // namespace fermigns
