#pragma once

#include <cstdint>
#include <vector>

#include "fermigns/block.hpp"
#include "fermigns/kinetic.hpp"

namespace fermigns {

/// T + v(x): a fractional kinetic term plus a real multiplication potential.
struct LocalHamiltonian {
  Grid grid;
  KineticSpec kinetic;
  std::vector<double> potential;  ///< empty means v = 0

  Field apply(const Field& u) const;
  /// (symbol(|xi|) + shift)^{-1} applied to r.
  Field precondition(const Field& r, double shift) const;
  double expectation(const Field& u) const;
};

struct EigenControls {
  int max_iterations = 500;
  double tolerance = 1e-6;  ///< on ||H psi - lambda psi|| for normalized psi
  int guard_vectors = 2;    ///< extra block columns beyond the requested count
  std::uint64_t seed = 7;
};

struct EigenResult {
  std::vector<double> values;
  Block vectors;
  std::vector<double> residuals;
  bool converged = false;
  int iterations = 0;
};

/// Lowest `count` eigenpairs by block LOBPCG with soft locking. Vectors in
/// `deflate` (orthonormal) are projected out of every search direction.
EigenResult lowest_eigenpairs(const LocalHamiltonian& h, int count, const EigenControls& controls = {},
                              const Block& guess = {}, const Block& deflate = {});

/// Smooth deterministic start vectors: Gaussian envelopes times low-order
/// monomials plus a small seeded perturbation.
Block smooth_start_block(const Grid& grid, int count, std::uint64_t seed, double width);

}  // namespace fermigns
