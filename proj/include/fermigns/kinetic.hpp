#pragma once

#include <cmath>

#include "fermigns/field.hpp"

namespace fermigns {

/// sqrt(-Lap + m^2), optionally minus m (the convention that subtracts the
/// rest mass). m = 0 gives sqrt(-Lap) either way.
struct KineticSpec {
  double mass = 0.0;
  bool subtract_rest_mass = false;

  double symbol(double xi_abs) const {
    const double e = std::sqrt(xi_abs * xi_abs + mass * mass);
    return subtract_rest_mass ? e - mass : e;
  }
};

void validate(const KineticSpec& spec);

/// Fourier multiplier sqrt(|xi|^2 + m^2) (- m) applied to u.
Field apply_fractional_kinetic(const Field& u, const KineticSpec& spec = {});

/// <u, T u> evaluated in frequency space.
double kinetic_form(const Field& u, const KineticSpec& spec = {});

}  // namespace fermigns
