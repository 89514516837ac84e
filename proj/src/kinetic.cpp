#include "fermigns/kinetic.hpp"

#include "fermigns/error.hpp"
#include "fermigns/spectral.hpp"

namespace fermigns {

void validate(const KineticSpec& spec) {
  if (!(spec.mass >= 0.0) || !std::isfinite(spec.mass)) {
    throw ConfigError("mass must be nonnegative");
  }
}

Field apply_fractional_kinetic(const Field& u, const KineticSpec& spec) {
  validate(spec);
  return apply_radial_multiplier(u, [&](double xi2) { return spec.symbol(std::sqrt(xi2)); });
}

double kinetic_form(const Field& u, const KineticSpec& spec) {
  validate(spec);
  return radial_multiplier_form(u, [&](double xi2) { return spec.symbol(std::sqrt(xi2)); });
}

}  // namespace fermigns
