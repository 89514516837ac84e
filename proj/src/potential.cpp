#include "fermigns/potential.hpp"

#include <algorithm>
#include <cmath>

#include "fermigns/error.hpp"

namespace fermigns {

PotentialSpec PotentialSpec::polynomial(std::vector<PotentialZero> zeros, double prefactor) {
  PotentialSpec s;
  s.form = Form::polynomial_zeros;
  s.zeros = std::move(zeros);
  s.prefactor = prefactor;
  return s;
}

PotentialSpec PotentialSpec::sampled(Field values) {
  PotentialSpec s;
  s.form = Form::sampled;
  s.samples = std::move(values);
  return s;
}

void PotentialSpec::validate() const {
  if (form == Form::polynomial_zeros) {
    if (zeros.empty()) throw ConfigError("potential: at least one zero is required");
    if (!(prefactor > 0.0) || !std::isfinite(prefactor)) throw ConfigError("potential: prefactor h must be positive");
    for (const auto& z : zeros) {
      if (!(z.exponent > 0.0 && z.exponent < 1.0)) {
        throw ConfigError("potential: exponents p_j must lie in (0, 1), got " + std::to_string(z.exponent));
      }
    }
    return;
  }
  if (samples.size() == 0) throw ConfigError("potential: sampled form needs values");
  const Grid& g = samples.grid();
  const int n = g.points();
  std::vector<double> interior, boundary;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double v = samples[g.flat(i, j, k)].real();
        if (v < 0.0) throw InputError("potential: V must be nonnegative");
        const bool edge = i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1;
        (edge ? boundary : interior).push_back(v);
      }
    }
  }
  auto median = [](std::vector<double>& v) {
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
  };
  // In a cube the interior median already sits near the faces, so the
  // typical boundary value is compared rather than the smallest one.
  if (!(median(boundary) >= 10.0 * median(interior))) {
    throw InputError("potential: not trapping on this box (boundary median below 10x the interior median)");
  }
}

double PotentialSpec::value(const std::array<double, 3>& x) const {
  if (form == Form::sampled) throw ConfigError("potential: pointwise values need the polynomial form");
  double v = prefactor;
  for (const auto& z : zeros) {
    const double dx = x[0] - z.point[0], dy = x[1] - z.point[1], dz = x[2] - z.point[2];
    v *= std::pow(dx * dx + dy * dy + dz * dz, 0.5 * z.exponent);
  }
  return v;
}

std::vector<double> PotentialSpec::sample(const Grid& grid) const {
  if (form == Form::sampled) {
    require_same_grid(samples.grid(), grid, "potential");
    return samples.real_part();
  }
  std::vector<double> out(grid.size());
  const int n = grid.points();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        out[grid.flat(i, j, k)] = value({grid.coordinate(0, i), grid.coordinate(1, j), grid.coordinate(2, k)});
      }
    }
  }
  return out;
}

double PotentialSpec::leading_exponent() const {
  if (form == Form::sampled) throw ConfigError("potential: the zero structure needs the polynomial form");
  double p = 0.0;
  for (const auto& z : zeros) p = std::max(p, z.exponent);
  return p;
}

std::vector<double> PotentialSpec::iota() const {
  const double p = leading_exponent();
  std::vector<double> out;
  for (std::size_t j = 0; j < zeros.size(); ++j) {
    if (zeros[j].exponent < p) {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    double v = prefactor;
    for (std::size_t k = 0; k < zeros.size(); ++k) {
      if (k == j) continue;
      const auto& a = zeros[j].point;
      const auto& b = zeros[k].point;
      const double d2 = (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]);
      v *= std::pow(d2, 0.5 * zeros[k].exponent);
    }
    out.push_back(v);
  }
  return out;
}

double PotentialSpec::iota_min() const {
  const auto io = iota();
  return *std::min_element(io.begin(), io.end());
}

std::vector<std::array<double, 3>> PotentialSpec::selected_zeros() const {
  const auto io = iota();
  const double m = *std::min_element(io.begin(), io.end());
  std::vector<std::array<double, 3>> out;
  for (std::size_t j = 0; j < io.size(); ++j) {
    if (io[j] <= m * (1.0 + 1e-12)) out.push_back(zeros[j].point);
  }
  return out;
}

}  // namespace fermigns
