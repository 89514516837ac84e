#pragma once

#include <array>
#include <limits>
#include <vector>

#include "fermigns/field.hpp"

namespace fermigns {

/// One factor |x - x_j|^{p_j} of a polynomial-zeros potential.
struct PotentialZero {
  std::array<double, 3> point{0.0, 0.0, 0.0};
  double exponent = 0.5;
};

/// Nonnegative external potential: either sampled values or
/// V(x) = h prod_j |x - x_j|^{p_j} with a positive constant h.
struct PotentialSpec {
  enum class Form { sampled, polynomial_zeros };
  Form form = Form::polynomial_zeros;
  Field samples;                     ///< sampled form only
  std::vector<PotentialZero> zeros;  ///< polynomial form only
  double prefactor = 1.0;            ///< h

  static PotentialSpec polynomial(std::vector<PotentialZero> zeros, double prefactor = 1.0);
  static PotentialSpec sampled(Field values);

  /// Exponent ranges, positivity and, for sampled potentials, the trapping
  /// emulation (median boundary value at least 10 times the interior median).
  void validate() const;

  std::vector<double> sample(const Grid& grid) const;
  double value(const std::array<double, 3>& x) const;

  /// p = max_j p_j.
  double leading_exponent() const;
  /// iota_j = lim V(x)/|x - x_j|^p; +inf for zeros with p_j < p.
  std::vector<double> iota() const;
  /// min_j iota_j.
  double iota_min() const;
  /// Zeros attaining iota_min.
  std::vector<std::array<double, 3>> selected_zeros() const;
};

}  // namespace fermigns
