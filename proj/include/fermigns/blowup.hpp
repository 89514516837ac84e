#pragma once

#include <array>
#include <vector>

#include "fermigns/gns.hpp"
#include "fermigns/potential.hpp"
#include "fermigns/trapped.hpp"

namespace fermigns {

struct KappaBar {
  double value = 0.0;              ///< inf_y int |x + y|^p rho(x) dx
  std::array<double, 3> argmin{};  ///< y*
};

/// Coarse search over grid points followed by a shrinking pattern search.
KappaBar compute_kappa_bar(const Field& rho, double p);

/// Closed-form ingredients of the blow-up laws, from a GNS optimizer
/// rescaled to unit kinetic trace.
struct BlowupConstants {
  double p = 0.0;
  double iota = 0.0;
  double kappa_bar = 0.0;
  std::array<double, 3> kappa_argmin{};
  double interaction = 0.0;
  double energy_prefactor = 0.0;   ///< E ~ A_E (K_inf - K)^{p/(p+1)}
  double epsilon_prefactor = 0.0;  ///< eps ~ A_eps (K_inf - K)^{1/(p+1)}
};

BlowupConstants blowup_constants(const GnsResult& gns, const PotentialSpec& potential);

struct PowerFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
};

struct BlowupFit {
  double k_infinity = 0.0;  ///< fitted threshold
  double k_estimate = 0.0;  ///< GNS value used to start the fit
  PowerFit energy;          ///< E = A (K_inf - K)^e
  PowerFit epsilon;
  double expected_energy_exponent = 0.0;   ///< p / (p + 1)
  double expected_epsilon_exponent = 0.0;  ///< 1 / (p + 1)
  double predicted_energy_prefactor = 0.0;
  double predicted_epsilon_prefactor = 0.0;
  double kappa_bar = 0.0;
  std::array<double, 3> kappa_argmin{};
  double iota = 0.0;
  double interaction = 0.0;   ///< D of the optimizer at unit kinetic trace
  bool reliable = false;      ///< both fits have R^2 >= 0.98
  std::array<double, 3> limit_point{};      ///< selected zero closest to the last center
  double center_distance = 0.0;             ///< |z_last - limit_point|
  std::array<double, 3> scaled_offset{};    ///< (z_last - limit_point) / epsilon_last
  std::size_t records_used = 0;
};

/// Joint fit of log E and log epsilon against log(K_inf - K) with K_inf
/// free, started at the GNS estimate. Needs at least five converged records
/// and a polynomial-zeros potential.
BlowupFit fit_blowup(const std::vector<SweepRecord>& records, const PotentialSpec& potential,
                     const GnsResult& gns);

/// Least squares line through (log x, log y).
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fermigns
