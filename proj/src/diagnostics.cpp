#include "fermigns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fermigns/error.hpp"
#include "fermigns/kinetic.hpp"
#include "fermigns/riesz.hpp"
#include "fermigns/spectral.hpp"

namespace fermigns {

IdentityReport make_report(std::string name, double lhs, double rhs, double tolerance) {
  IdentityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.residual = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30});
  r.pass = std::isfinite(r.residual) && r.residual < tolerance;
  return r;
}

namespace {

IdentityReport skipped(std::string name, std::string note) {
  IdentityReport r;
  r.name = std::move(name);
  r.skipped = true;
  r.note = std::move(note);
  return r;
}

double weighted_integral(const Field& w, const Field& u) {
  double acc = 0.0;
  for (std::size_t p = 0; p < u.size(); ++p) acc += w[p].real() * std::norm(u[p]);
  return acc * u.grid().cell_volume();
}

}  // namespace

std::vector<IdentityReport> pohozaev_per_orbital(const DensityOperator& gamma, const std::vector<double>& mu,
                                                 double alpha, double tolerance) {
  validate_riesz_exponent(alpha);
  std::vector<IdentityReport> out;
  if (gamma.rank() == 0 || gamma.trace() <= 0.0) {
    out.push_back(skipped("pohozaev_orbital", "zero state"));
    return out;
  }
  if (mu.size() != gamma.rank()) throw InputError("pohozaev_per_orbital: one multiplier per orbital required");
  const Field rho = density(gamma);
  const Field w = riesz_convolve(rho, alpha);
  const Field wx = riesz_convolve_signed(radial_derivative(rho), alpha);
  for (std::size_t i = 0; i < gamma.rank(); ++i) {
    const Field& u = gamma.frame[i];
    const double lhs = kinetic_form(u);
    const double rhs = (6.0 - alpha) / alpha * weighted_integral(w, u) + 1.5 * mu[i] * std::pow(norm(u), 2) +
                       weighted_integral(wx, u) / alpha;
    out.push_back(make_report("pohozaev_orbital_" + std::to_string(i), lhs, rhs, tolerance));
  }
  return out;
}

IdentityReport pohozaev_trace(const DensityOperator& gamma, const std::vector<double>& mu, double alpha,
                              double tolerance) {
  validate_riesz_exponent(alpha);
  if (gamma.rank() == 0 || gamma.trace() <= 0.0) return skipped("pohozaev_trace", "zero state");
  if (mu.size() != gamma.rank()) throw InputError("pohozaev_trace: one multiplier per orbital required");
  const Field rho = density(gamma);
  const double d = hartree_energy(rho, rho, alpha);
  double s = 0.0;
  for (std::size_t i = 0; i < gamma.rank(); ++i) s += mu[i] * gamma.weights[i] * std::pow(norm(gamma.frame[i]), 2);
  return make_report("pohozaev_trace", trace_kinetic(gamma), (6.0 - alpha) / (2.0 * alpha) * d + 1.5 * s, tolerance);
}

IdentityReport virial_check(const DensityOperator& gamma, double alpha, double tolerance) {
  validate_riesz_exponent(alpha);
  if (gamma.rank() == 0 || gamma.trace() <= 0.0) return skipped("virial", "zero state");
  const Field rho = density(gamma);
  auto r = make_report("virial", trace_kinetic(gamma), hartree_energy(rho, rho, alpha), tolerance);
  if (!r.pass) r.note = "kinetic trace and interaction integral differ; the state is not a normalized solution";
  return r;
}

DecayFit decay_fit(const Field& f, double r_min, double r_max) {
  const Grid& g = f.grid();
  const double L = g.box_length();
  const double h = g.spacing();
  if (r_min <= 0.0) r_min = L / 8.0;
  if (r_max <= 0.0) r_max = L / 4.0;
  if (!(r_max > r_min)) throw ConfigError("decay_fit: empty radial window");
  DecayFit fit;
  fit.r_min = r_min;
  fit.r_max = r_max;
  const int n = g.points();
  const auto& c = g.center();
  const int nshell = static_cast<int>(std::ceil((r_max - r_min) / h));
  std::vector<double> shell_max(static_cast<std::size_t>(nshell), 0.0);
  std::vector<double> shell_r(static_cast<std::size_t>(nshell), 0.0);
  double peak = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.coordinate(0, i) - c[0];
    for (int j = 0; j < n; ++j) {
      const double y = g.coordinate(1, j) - c[1];
      for (int k = 0; k < n; ++k) {
        const double z = g.coordinate(2, k) - c[2];
        const double a = std::abs(f[g.flat(i, j, k)]);
        peak = std::max(peak, a);
        const double r = std::sqrt(x * x + y * y + z * z);
        if (r < r_min || r >= r_max) continue;
        auto s = static_cast<std::size_t>((r - r_min) / h);
        s = std::min(s, shell_max.size() - 1);
        if (a > shell_max[s]) {
          shell_max[s] = a;
          shell_r[s] = r;
        }
      }
    }
  }
  std::vector<double> lx, ly;
  for (int s = 0; s < nshell; ++s) {
    const double v = shell_max[static_cast<std::size_t>(s)];
    if (v <= 1e-13 * peak || v == 0.0) continue;
    lx.push_back(std::log(shell_r[static_cast<std::size_t>(s)]));
    ly.push_back(std::log(v));
  }
  fit.shells = static_cast<int>(lx.size());
  if (fit.shells < 3) {
    fit.note = "tail below the noise floor";
    fit.exponent = -std::numeric_limits<double>::infinity();
    return fit;
  }
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / m;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    ss_res += std::pow(ly[i] - (icpt + slope * lx[i]), 2);
    ss_tot += std::pow(ly[i] - sy / m, 2);
  }
  fit.exponent = slope;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  fit.reliable = fit.r_squared >= 0.9 && fit.shells >= 0.5 * nshell;
  fit.power_law = fit.reliable && slope > -8.0;
  if (!fit.reliable) fit.note = "window too noisy";
  else if (!fit.power_law) fit.note = "not power-law";
  return fit;
}

std::vector<IdentityReport> oracle_suite(const Grid& g) {
  const double a = std::pow(M_PI, -0.75);
  const Field u = Field::sample(g, [&](double x, double y, double z) {
    return cplx(a * std::exp(-(x * x + y * y + z * z) / 2.0), 0.0);
  }, FieldTag::orbital);
  Field rho(g, FieldTag::density);
  for (std::size_t i = 0; i < u.size(); ++i) rho[i] = std::norm(u[i]);

  std::vector<IdentityReport> out;
  out.push_back(make_report("gaussian kinetic form", kinetic_form(u), 2.0 / std::sqrt(M_PI), 1e-3));
  out.push_back(make_report("gaussian coulomb self-energy", hartree_energy(rho, rho, 1.0),
                            std::sqrt(2.0 / M_PI), 1e-3));

  const Field w = riesz_convolve(rho, 1.0);
  const int n = g.points();
  const double rmax = g.box_length() / 4.0;
  double worst = 0.0, at = 0.0, computed = 0.0, exact_at = 0.0;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      for (int iz = 0; iz < n; ++iz) {
        const double x = g.coordinate(0, ix) - g.center()[0];
        const double y = g.coordinate(1, iy) - g.center()[1];
        const double z = g.coordinate(2, iz) - g.center()[2];
        const double r = std::sqrt(x * x + y * y + z * z);
        if (r > rmax) continue;
        const double exact = r == 0.0 ? 2.0 / std::sqrt(M_PI) : std::erf(r) / r;
        const double v = w[g.flat(ix, iy, iz)].real();
        if (std::abs(v - exact) > worst) {
          worst = std::abs(v - exact);
          at = r;
          computed = v;
          exact_at = exact;
        }
      }
    }
  }
  IdentityReport pot;
  pot.name = "gaussian coulomb potential (max pointwise error)";
  pot.lhs = computed;
  pot.rhs = exact_at;
  pot.residual = worst;
  pot.tolerance = 1e-4;
  pot.pass = worst <= 1e-4;
  pot.note = "absolute error, worst at r = " + std::to_string(at);
  out.push_back(pot);
  return out;
}

}  // namespace fermigns
