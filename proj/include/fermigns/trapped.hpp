#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "fermigns/eigensolver.hpp"
#include "fermigns/potential.hpp"
#include "fermigns/state.hpp"

namespace fermigns {

struct TrappedControls {
  int max_iterations = 2000;
  double tolerance = 1e-6;       ///< on the one-body residual of the frame
  int restarts = 1;
  std::uint64_t seed = 1;
  double energy_floor = -1e3;    ///< energies below signal K beyond the threshold
  double perturbation = 0.3;     ///< amplitude of the seeded start perturbation
  EigenControls eigen;
};

/// Minimize Tr((sqrt(-Lap + m^2) + V) gamma) - K D(gamma) over rank <= N
/// projections, with the Coulomb kernel.
struct TrappedProblem {
  int particles = 1;  ///< N
  double coupling = 0.1;  ///< K
  double mass = 1.0;
  PotentialSpec potential;
  Grid grid;
  TrappedControls controls;

  void validate() const;
};

struct TrappedResult {
  double energy = 0.0;
  OrthoFrame frame;
  std::vector<double> multipliers;  ///< orbital energies of H_V, ascending
  double epsilon = 0.0;             ///< 1 / Tr(sqrt(-Lap) gamma)
  double residual = 0.0;
  bool aufbau_verified = false;
  double complement_lowest = 0.0;   ///< lowest eigenvalue of H_V beyond the frame
  bool converged = false;
  bool unbounded = false;
  std::vector<double> restart_energies;
  std::size_t rank() const { return frame.rank(); }
};

/// The functional at a frame with unit weights.
double hf_energy(const OrthoFrame& frame, const TrappedProblem& problem);

TrappedResult minimize_trapped(const TrappedProblem& problem, const std::optional<Block>& start = std::nullopt);

/// Density centroid refined on the half-mass ball around it.
std::array<double, 3> blowup_center(const Field& rho);

struct DivergenceSample {
  double scale;   ///< R
  double energy;
};

struct DivergenceReport {
  std::vector<DivergenceSample> trajectory;
  double energy_at_unit_scale = 0.0;
  bool unbounded = false;         ///< energy fell below -1e3 |E(R = 1)|
  int trials = 0;
  bool interior_minimum = false;  ///< minimum strictly inside the scanned R range
  double min_energy = 0.0;
  double min_scale = 0.0;
};

/// Energies of the trial family obtained by concentrating a GNS optimizer
/// frame at x0 with scale 1/R. Concentration is exact grid re-interpretation,
/// so orthonormality is kept without a cut-off. R runs over ratio^j for
/// j = j_min..; for K below the estimate the scan stops at j_max.
DivergenceReport divergence_probe(const TrappedProblem& problem, const OrthoFrame& gns_frame,
                                  const std::array<double, 3>& x0, double ratio = 1.05, int j_min = -40,
                                  int j_max = 100, int max_trials = 1000);

struct SweepRecord {
  double coupling;
  double energy;
  double epsilon;
  std::size_t rank;
  std::vector<double> multipliers;
  std::array<double, 3> center;
  double box_length;
  double spacing;
  bool converged;
  bool aufbau_verified;
  OrthoFrame frame;
};

struct SweepOptions {
  bool adaptive_box = true;
  double cells_per_epsilon = 3.0;  ///< target epsilon / h on the adapted grid
  double k_reference = 0.0;        ///< threshold estimate used to predict epsilon; 0 disables
  int cold_every = 5;              ///< cold restart on every k-th point (0 disables)
  /// Start of the first point on an adapted box: a blow-up profile (for
  /// example the GNS optimizer frame) and the expected epsilon there. On a
  /// fixed lattice a cold start near the threshold collapses to the grid
  /// scale, so both should be given for near-threshold sweeps.
  std::optional<OrthoFrame> profile;
  double initial_epsilon = 0.0;
  std::function<void(const SweepRecord&)> on_record;  ///< progress hook, may be empty
};

/// Warm-started minimizations along an increasing list of couplings.
std::vector<SweepRecord> sweep_k(const TrappedProblem& base, const std::vector<double>& couplings,
                                 const SweepOptions& options = {});

}  // namespace fermigns
