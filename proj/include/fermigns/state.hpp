#pragma once

#include <span>
#include <string>
#include <vector>

#include "fermigns/block.hpp"
#include "fermigns/kinetic.hpp"

namespace fermigns {

/// Schatten exponent q in [1, inf].
class SchattenIndex {
 public:
  SchattenIndex() = default;
  explicit SchattenIndex(double q);
  static SchattenIndex infinity();
  /// Accepts a number or "inf"/"infinity".
  static SchattenIndex parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  double value() const;
  /// q' = q / (q - 1), with 1 for q = inf and inf for q = 1.
  double dual() const;
  std::string to_string() const;

 private:
  double q_ = 1.0;
  bool infinite_ = true;
};

/// Orthonormal orbitals on a common grid.
class OrthoFrame {
 public:
  OrthoFrame() = default;

  const Block& orbitals() const { return orbitals_; }
  std::size_t rank() const { return orbitals_.size(); }
  const Grid& grid() const { return orbitals_.front().grid(); }
  const Field& operator[](std::size_t i) const { return orbitals_[i]; }

  /// Wraps orbitals that the caller guarantees to be orthonormal; checks the
  /// Gram matrix to `tolerance` and throws InputError otherwise.
  static OrthoFrame adopt(Block orbitals, double tolerance = 1e-8);

 private:
  friend OrthoFrame loewdin_orthonormalize(Block raw);
  Block orbitals_;
};

/// gamma = sum_i k_i |u_i><u_i|.
struct DensityOperator {
  OrthoFrame frame;
  std::vector<double> weights;

  DensityOperator() = default;
  DensityOperator(OrthoFrame f, std::vector<double> k);

  std::size_t rank() const;
  const Grid& grid() const { return frame.grid(); }
  double trace() const;
};

/// Symmetric orthonormalization (u_1..u_R) G^{-1/2}. Throws DegeneracyError
/// when the smallest Gram eigenvalue is <= 1e-10.
OrthoFrame loewdin_orthonormalize(Block raw);

/// G^{-1/2} of a Hermitian positive Gram matrix, with the same degeneracy rule.
Eigen::MatrixXcd inverse_sqrt_gram(const Eigen::MatrixXcd& g);

/// sum_i k_i |u_i|^2 as a real density field.
Field density(const DensityOperator& gamma);
Field density(const Block& orbitals, std::span<const double> weights);

double schatten_norm(std::span<const double> weights, const SchattenIndex& q);
double schatten_norm(const DensityOperator& gamma, const SchattenIndex& q);

/// <u_i, T u_i> for every orbital.
std::vector<double> orbital_kinetic(const Block& orbitals, const KineticSpec& spec);
double trace_kinetic(const DensityOperator& gamma, const KineticSpec& spec = {});
double trace_potential(const DensityOperator& gamma, const Field& potential);

}  // namespace fermigns
