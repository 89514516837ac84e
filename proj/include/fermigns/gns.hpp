#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fermigns/frame_descent.hpp"
#include "fermigns/state.hpp"

namespace fermigns {

struct GnsLogEntry {
  int restart;
  int iteration;
  double ratio;
  double residual;
  std::string event;
};

struct GnsControls {
  int restarts = 8;
  int max_iterations = 3000;     ///< total frame iterations per restart
  int sweep_iterations = 150;    ///< frame iterations between weight steps
  double tolerance = 1e-5;       ///< on the Euler-Lagrange residual
  std::uint64_t seed = 1;
  double init_width = 0.0;       ///< Gaussian width of the initial frames; 0 means 2.5 h
  std::function<void(const GnsLogEntry&)> on_log;  ///< progress hook, may be empty
};

struct GnsProblem {
  double alpha = 1.0;
  SchattenIndex q = SchattenIndex::infinity();
  int rank_cap = 1;
  Grid grid;
  GnsControls controls;

  /// Enforces 0 < alpha < 2, 1 <= q <= (2 - alpha)/(1 - alpha)_+ and N >= 1.
  void validate() const;
};

struct GnsResult {
  double k_est = 0.0;
  DensityOperator optimizer;  ///< weights normalized so that Tr(|D| gamma) = D(gamma)
  std::vector<double> multipliers;
  std::vector<double> residuals;
  std::size_t rank = 0;
  bool converged = false;
  double max_imag = 0.0;
  std::vector<double> restart_ratios;
  std::vector<GnsLogEntry> log;
};

/// ||gamma||_{S^q}^{(2-alpha)/alpha} Tr(sqrt(-Lap) gamma) / D(gamma)^{1/alpha}.
double gns_ratio(const DensityOperator& gamma, double alpha, const SchattenIndex& q);

/// sqrt(-Lap) v - (2/alpha) (rho_gamma * |x|^{-alpha}) v.
Field mean_field_operator_apply(const DensityOperator& gamma, double alpha, const Field& v);

struct WeightUpdate {
  std::vector<double> weights;     ///< same length as mu; dropped entries are 0
  std::vector<std::size_t> drop;   ///< orbitals whose multiplier is not negative
};

/// Closed-form weights for multipliers mu under Tr = D = 1. Entries with
/// mu_i >= -1e-10 are returned in `drop` and get weight 0.
WeightUpdate weight_update(const std::vector<double>& mu, double alpha, const SchattenIndex& q);

/// Rescales the weights so that Tr(sqrt(-Lap) gamma) = D(gamma).
DensityOperator normalize_virial(const DensityOperator& gamma, double alpha);

/// Multipliers <u_i, H u_i> and residuals ||H u_i - mu_i u_i||. When several
/// weights coincide the frame is first rotated to the Ritz basis of H inside
/// each cluster; the returned operator carries that rotated frame.
struct ElReport {
  DensityOperator gamma;
  std::vector<double> multipliers;
  std::vector<double> residuals;
  double max_offdiagonal = 0.0;
};
ElReport euler_lagrange(const DensityOperator& gamma, double alpha);

/// Full solver: best of the seeded restarts, or a single run from `start`.
GnsResult optimize_gns(const GnsProblem& problem, const std::optional<DensityOperator>& start = std::nullopt);

struct MonotonicityReport {
  double k_n = 0.0;
  double k_2n = 0.0;
  double gap = 0.0;  ///< k_n - k_2n
  bool weak_holds = false;
  bool strict_gap = false;
};

MonotonicityReport monotonicity_check(const GnsResult& rank_n, const GnsResult& rank_2n, double tolerance = 1e-4);

}  // namespace fermigns
