#include "fermigns/riesz.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <list>
#include <string>

#include "fermigns/error.hpp"
#include "fermigns/fft.hpp"

namespace fermigns {

void validate_riesz_exponent(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw ConfigError("alpha must lie in (0, 2), got " + std::to_string(alpha));
  }
}

namespace {

/// Upper incomplete gamma for any real a at x > 0, via the downward
/// recurrence Gamma(a, x) = (Gamma(a + 1, x) - x^a e^{-x}) / a for a <= 0.
double upper_gamma(double a, double x) {
  if (a > 0.0) return boost::math::tgamma(a, x);
  if (a == 0.0) return boost::math::expint(1, x);
  return (upper_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

}  // namespace

double lattice_zeta(double s) {
  if (s == 0.0 || s == 3.0) throw ConfigError("lattice zeta has a pole or removable point here");
  // Theta-function splitting at t = 1; terms decay like exp(-pi |k|^2).
  double total = -2.0 / s - 2.0 / (3.0 - s);
  constexpr int R = 5;
  for (int i = -R; i <= R; ++i) {
    for (int j = -R; j <= R; ++j) {
      for (int k = -R; k <= R; ++k) {
        const int n2 = i * i + j * j + k * k;
        if (n2 == 0 || n2 > R * R) continue;
        const double x = M_PI * n2;
        total += upper_gamma(0.5 * s, x) * std::pow(x, -0.5 * s) +
                 upper_gamma(0.5 * (3.0 - s), x) * std::pow(x, -0.5 * (3.0 - s));
      }
    }
  }
  return total * std::pow(M_PI, 0.5 * s) / boost::math::tgamma(0.5 * s);
}

RieszKernel::RieszKernel(const Grid& grid, double alpha) : grid_(grid), alpha_(alpha) {
  validate_riesz_exponent(alpha);
  const int n = grid.points();
  const int m = 2 * n;
  const double h = grid.spacing();
  auto& fft = detail::real_fft(m);
  auto real = fft.real_buffer();
  // Corrected trapezoidal rule for the homogeneous singularity: the
  // punctured lattice sum of |y|^{-alpha} f(y) overshoots the integral by
  // h^{3-alpha} Z(alpha) f(0) + h^{5-alpha} Z(alpha-2) lap f(0) / 6 + O(h^{7-alpha}),
  // Z being the cubic lattice zeta function. The Laplacian is taken with the
  // seven-point stencil, which moves weight onto the six nearest neighbours.
  const double z0 = lattice_zeta(alpha);
  const double z2 = lattice_zeta(alpha - 2.0);
  const double scale = std::pow(h, -alpha);
  const double center = scale * (z2 - z0);
  const double neighbour = scale * (1.0 - z2 / 6.0);
  auto offset = [m, n](int j) { return j < n ? j : j - m; };
  for (int ix = 0; ix < m; ++ix) {
    const double x = offset(ix) * h;
    for (int iy = 0; iy < m; ++iy) {
      const double y = offset(iy) * h;
      for (int iz = 0; iz < m; ++iz) {
        const double z = offset(iz) * h;
        const double r2 = x * x + y * y + z * z;
        const std::size_t idx = (static_cast<std::size_t>(ix) * m + iy) * m + iz;
        const int taxi = std::abs(offset(ix)) + std::abs(offset(iy)) + std::abs(offset(iz));
        if (taxi == 0) {
          real[idx] = center;
        } else if (taxi == 1) {
          real[idx] = neighbour;
        } else {
          real[idx] = std::pow(r2, -0.5 * alpha);
        }
      }
    }
  }
  fft.forward();
  auto spec = fft.spectrum();
  spectrum_.resize(spec.size());
  // The kernel is even on the doubled lattice, so its spectrum is real.
  for (std::size_t i = 0; i < spec.size(); ++i) spectrum_[i] = spec[i].real();
}

std::vector<double> RieszKernel::convolve(std::span<const double> f) const {
  const int n = grid_.points();
  const int m = 2 * n;
  if (f.size() != grid_.size()) throw InputError("convolution input size does not match grid");
  auto& fft = detail::real_fft(m);
  auto real = fft.real_buffer();
  std::fill(real.begin(), real.end(), 0.0);
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const std::size_t src = grid_.flat(ix, iy, 0);
      const std::size_t dst = (static_cast<std::size_t>(ix) * m + iy) * m;
      std::copy_n(f.begin() + static_cast<std::ptrdiff_t>(src), n, real.begin() + static_cast<std::ptrdiff_t>(dst));
    }
  }
  fft.forward();
  auto spec = fft.spectrum();
  const double scale = grid_.cell_volume() / (static_cast<double>(m) * m * m);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= spectrum_[i] * scale;
  fft.backward();
  std::vector<double> out(grid_.size());
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const std::size_t src = (static_cast<std::size_t>(ix) * m + iy) * m;
      std::copy_n(real.begin() + static_cast<std::ptrdiff_t>(src), n,
                  out.begin() + static_cast<std::ptrdiff_t>(grid_.flat(ix, iy, 0)));
    }
  }
  return out;
}

const RieszKernel& riesz_kernel(const Grid& grid, double alpha) {
  thread_local std::list<RieszKernel> cache;
  for (auto it = cache.begin(); it != cache.end(); ++it) {
    const Grid& g = it->grid();
    if (g.points() == grid.points() && g.spacing() == grid.spacing() && it->alpha() == alpha) {
      cache.splice(cache.begin(), cache, it);
      return cache.front();
    }
  }
  cache.emplace_front(grid, alpha);
  if (cache.size() > 4) cache.pop_back();
  return cache.front();
}

Field riesz_convolve(const Field& rho, double alpha) {
  validate_riesz_exponent(alpha);
  double peak = 0.0;
  double lowest = 0.0;
  for (const auto& v : rho.values()) {
    peak = std::max(peak, v.real());
    lowest = std::min(lowest, v.real());
  }
  if (lowest < -1e-12 * std::max(1.0, peak)) {
    throw InputError("density has negative samples (min " + std::to_string(lowest) + ")");
  }
  return riesz_convolve_signed(rho, alpha);
}

Field riesz_convolve_signed(const Field& f, double alpha) {
  const auto& kernel = riesz_kernel(f.grid(), alpha);
  const auto re = f.real_part();
  return Field::from_real(f.grid(), kernel.convolve(re), FieldTag::potential);
}

double hartree_energy(const Field& rho1, const Field& rho2, double alpha) {
  require_same_grid(rho1.grid(), rho2.grid(), "hartree_energy");
  const Field w = riesz_convolve(rho1, alpha);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i].real() * rho2[i].real();
  return acc * rho1.grid().cell_volume();
}

}  // namespace fermigns
