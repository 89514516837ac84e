#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fermigns/field.hpp"

namespace fermigns {

/// Analytic continuation of sum over nonzero k in Z^3 of |k|^{-s}.
double lattice_zeta(double s);

/// Free-space convolution with |x|^{-alpha}. The kernel is tabulated on the
/// doubled grid (2n per axis) with corrected weights at and next to the
/// origin, and its real spectrum stored once.
class RieszKernel {
 public:
  RieszKernel(const Grid& grid, double alpha);

  const Grid& grid() const { return grid_; }
  double alpha() const { return alpha_; }

  /// (f * |x|^{-alpha}) on the grid for real samples f of any sign.
  std::vector<double> convolve(std::span<const double> f) const;

 private:
  Grid grid_;
  double alpha_;
  std::vector<double> spectrum_;
};

/// Shared kernel for (grid, alpha); a small per-thread cache.
const RieszKernel& riesz_kernel(const Grid& grid, double alpha);

void validate_riesz_exponent(double alpha);

/// rho * |x|^{-alpha}. Rejects densities with samples below -1e-12 (scaled to
/// the field maximum when that exceeds one).
Field riesz_convolve(const Field& rho, double alpha);

/// Same convolution without the sign check, for signed potentials.
Field riesz_convolve_signed(const Field& f, double alpha);

/// h^3 sum (rho1 * |x|^{-alpha}) rho2.
double hartree_energy(const Field& rho1, const Field& rho2, double alpha);

}  // namespace fermigns
