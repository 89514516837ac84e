#pragma once

#include <string>
#include <vector>

#include "fermigns/state.hpp"

namespace fermigns {

struct IdentityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  ///< |lhs - rhs| / max(|lhs|, |rhs|, 1e-30)
  double tolerance = 1e-3;
  bool pass = false;
  bool skipped = false;
  std::string note;
};

IdentityReport make_report(std::string name, double lhs, double rhs, double tolerance);

/// Per-orbital Pohozaev identity of a solution of
///   sqrt(-Lap) u_i - (2/alpha)(rho * |x|^{-alpha}) u_i = mu_i u_i.
/// `mu` lists the multipliers in frame order.
std::vector<IdentityReport> pohozaev_per_orbital(const DensityOperator& gamma, const std::vector<double>& mu,
                                                 double alpha, double tolerance = 1e-3);

/// Trace-level Pohozaev identity.
IdentityReport pohozaev_trace(const DensityOperator& gamma, const std::vector<double>& mu, double alpha,
                              double tolerance = 1e-3);

/// Tr(sqrt(-Lap) gamma) against the interaction integral.
IdentityReport virial_check(const DensityOperator& gamma, double alpha, double tolerance = 1e-3);

struct DecayFit {
  double exponent = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double r_squared = 0.0;
  int shells = 0;
  bool reliable = false;   ///< R^2 >= 0.9 and enough shells above the noise floor
  bool power_law = false;  ///< exponent within the range of algebraic tails
  std::string note;
};

/// Slope of log(max |f| on radial shells) against log r over [r_min, r_max],
/// radii measured from the grid center. Defaults to [L/8, L/4].
DecayFit decay_fit(const Field& f, double r_min = 0.0, double r_max = 0.0);

/// Closed-form checks on the unit Gaussian: kinetic form 2/sqrt(pi) and
/// Coulomb self-energy sqrt(2/pi) (relative 1e-3), and the Coulomb potential
/// erf(r)/r pointwise within 1e-4 absolute for r <= L/4.
std::vector<IdentityReport> oracle_suite(const Grid& grid);

}  // namespace fermigns
