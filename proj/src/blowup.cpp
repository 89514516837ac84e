#include "fermigns/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "fermigns/error.hpp"
#include "fermigns/riesz.hpp"

namespace fermigns {

namespace {

double moment(const Field& rho, double p, const std::array<double, 3>& y) {
  const Grid& g = rho.grid();
  const int n = g.points();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x0 = g.coordinate(0, i) + y[0];
    for (int j = 0; j < n; ++j) {
      const double x1 = g.coordinate(1, j) + y[1];
      for (int k = 0; k < n; ++k) {
        const double x2 = g.coordinate(2, k) + y[2];
        acc += std::pow(x0 * x0 + x1 * x1 + x2 * x2, 0.5 * p) * rho[g.flat(i, j, k)].real();
      }
    }
  }
  return acc * g.cell_volume();
}

}  // namespace

KappaBar compute_kappa_bar(const Field& rho, double p) {
  if (!(p > 0.0)) throw ConfigError("kappa_bar: p must be positive");
  const Grid& g = rho.grid();
  const double h = g.spacing();
  // The minimizer sits near -(mass center); scan a coarse cube around it.
  std::array<double, 3> c{0.0, 0.0, 0.0};
  double mass = 0.0;
  const int n = g.points();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double m = rho[g.flat(i, j, k)].real();
        if (m < 0.0) throw InputError("kappa_bar: density must be nonnegative");
        c[0] += m * g.coordinate(0, i);
        c[1] += m * g.coordinate(1, j);
        c[2] += m * g.coordinate(2, k);
        mass += m;
      }
    }
  }
  if (!(mass > 0.0)) throw DegenerateInputError("kappa_bar of a zero density");
  for (auto& v : c) v = -v / mass;
  KappaBar best{moment(rho, p, c), c};
  const std::array<double, 3> c0 = c;
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      for (int d = -2; d <= 2; ++d) {
        const std::array<double, 3> y{c0[0] + a * h, c0[1] + b * h, c0[2] + d * h};
        const double v = moment(rho, p, y);
        if (v < best.value) best = {v, y};
      }
    }
  }
  for (double step = 0.5 * h; step > 1e-4 * h; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int a = 0; a < 3; ++a) {
        for (int s : {-1, 1}) {
          auto y = best.argmin;
          y[a] += s * step;
          const double v = moment(rho, p, y);
          if (v < best.value) {
            best = {v, y};
            improved = true;
          }
        }
      }
    }
  }
  return best;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("fit_power_law: need matching samples");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InputError("fit_power_law: samples must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  PowerFit f;
  f.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icpt = (sy - f.exponent * sx) / m;
  f.prefactor = std::exp(icpt);
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ly = std::log(y[i]);
    ss_res += std::pow(ly - icpt - f.exponent * std::log(x[i]), 2);
    ss_tot += std::pow(ly - sy / m, 2);
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return f;
}

BlowupConstants blowup_constants(const GnsResult& gns, const PotentialSpec& potential) {
  BlowupConstants bc;
  bc.p = potential.leading_exponent();
  const DensityOperator& g = gns.optimizer;
  double t = 0.0;
  for (const auto& f : g.frame.orbitals()) t += kinetic_form(f);
  const Grid unit = g.grid().rescaled(t);
  Block u;
  for (const auto& f : g.frame.orbitals()) u.push_back(std::pow(t, -1.5) * f.reinterpreted(unit));
  const Field rho = density(u, std::vector<double>(u.size(), 1.0));
  const auto kb = compute_kappa_bar(rho, bc.p);
  bc.kappa_bar = kb.value;
  bc.kappa_argmin = kb.argmin;
  bc.iota = potential.iota_min();
  bc.interaction = hartree_energy(rho, rho, 1.0);
  const double p = bc.p;
  const double a = p * bc.iota * bc.kappa_bar;
  bc.energy_prefactor = (p + 1.0) / p * std::pow(a, 1.0 / (p + 1.0)) * std::pow(bc.interaction, p / (p + 1.0));
  bc.epsilon_prefactor = std::pow(bc.interaction / a, 1.0 / (p + 1.0));
  return bc;
}

BlowupFit fit_blowup(const std::vector<SweepRecord>& records, const PotentialSpec& potential, const GnsResult& gns) {
  if (potential.form != PotentialSpec::Form::polynomial_zeros) {
    throw ConfigError("fit_blowup needs a polynomial-zeros potential");
  }
  std::vector<SweepRecord> use;
  for (const auto& r : records) {
    if (r.converged && r.energy > 0.0 && r.epsilon > 0.0) use.push_back(r);
  }
  if (use.size() < 5) throw InputError("fit_blowup: at least five converged records are required");
  BlowupFit fit;
  fit.records_used = use.size();
  fit.k_estimate = gns.k_est;
  const double p = potential.leading_exponent();
  fit.expected_energy_exponent = p / (p + 1.0);
  fit.expected_epsilon_exponent = 1.0 / (p + 1.0);
  double kmax = 0.0;
  for (const auto& r : use) kmax = std::max(kmax, r.coupling);

  std::vector<double> es, eps;
  for (const auto& r : use) {
    es.push_back(r.energy);
    eps.push_back(r.epsilon);
  }
  auto fits_at = [&](double kinf) {
    std::vector<double> gap;
    for (const auto& r : use) gap.push_back(kinf - r.coupling);
    return std::pair{fit_power_law(gap, es), fit_power_law(gap, eps)};
  };
  // Sum of squared log residuals of both fits, minimized over log(K_inf - K_max).
  auto cost = [&](double log_gap) {
    const double kinf = kmax + std::exp(log_gap);
    double acc = 0.0;
    for (const auto& [ys, f] : {std::pair{&es, fits_at(kinf).first}, std::pair{&eps, fits_at(kinf).second}}) {
      for (std::size_t i = 0; i < use.size(); ++i) {
        const double pred = std::log(f.prefactor) + f.exponent * std::log(kinf - use[i].coupling);
        acc += std::pow(std::log((*ys)[i]) - pred, 2);
      }
    }
    return acc;
  };
  const double start_gap = std::max(fit.k_estimate - kmax, 1e-6 * kmax);
  const double lo = std::log(start_gap) - 4.0, hi = std::log(start_gap) + 4.0;
  const auto [log_gap, c] = boost::math::tools::brent_find_minima(cost, lo, hi, 40);
  (void)c;
  fit.k_infinity = kmax + std::exp(log_gap);
  const auto [fe, fv] = fits_at(fit.k_infinity);
  fit.energy = fe;
  fit.epsilon = fv;
  fit.reliable = fe.r_squared >= 0.98 && fv.r_squared >= 0.98;

  const BlowupConstants bc = blowup_constants(gns, potential);
  fit.kappa_bar = bc.kappa_bar;
  fit.kappa_argmin = bc.kappa_argmin;
  fit.iota = bc.iota;
  fit.interaction = bc.interaction;
  fit.predicted_energy_prefactor = bc.energy_prefactor;
  fit.predicted_epsilon_prefactor = bc.epsilon_prefactor;

  const auto& last = use.back();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : potential.selected_zeros()) {
    const double d = std::hypot(last.center[0] - z[0], last.center[1] - z[1], last.center[2] - z[2]);
    if (d < best) {
      best = d;
      fit.limit_point = z;
    }
  }
  fit.center_distance = best;
  for (int k = 0; k < 3; ++k) fit.scaled_offset[k] = (last.center[k] - fit.limit_point[k]) / last.epsilon;
  return fit;
}

}  // namespace fermigns
