#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fermigns/potential.hpp"
#include "fermigns/state.hpp"

namespace fermigns {

struct GridConfig {
  double box_length = 24.0;
  int points = 64;
  std::array<double, 3> center{0.0, 0.0, 0.0};
};

/// Couplings for trapped sweeps: an explicit list, or a geometric ladder
/// K_j = K_ref (1 - gap (end/gap)^{j/(count-1)}) approaching K_ref (1 - end).
struct LadderConfig {
  std::vector<double> couplings;
  int count = 8;
  double gap = 0.1;
  double end = 0.01;
};

struct PotentialConfig {
  std::string kind = "polynomial";  ///< "polynomial" or "field"
  std::vector<PotentialZero> zeros{PotentialZero{}};
  double prefactor = 1.0;
  std::string field_path;           ///< sampled potential file for kind = "field"
};

struct RunConfig {
  std::string subcommand;
  GridConfig grid;
  double alpha = 1.0;
  SchattenIndex q = SchattenIndex::infinity();
  int rank = 1;          ///< GNS rank cap
  int particles = 1;     ///< trapped N
  double coupling = 0.0; ///< trapped K; 0 with k_fraction > 0 means k_fraction K_est
  double k_fraction = 0.0;
  double mass = 1.0;
  PotentialConfig potential;
  LadderConfig ladder;
  std::vector<double> betas;  ///< empty means the default duality grid

  double tolerance = 1e-5;
  int max_iterations = 3000;
  int restarts = 2;
  std::uint64_t seed = 1;
  double cells_per_epsilon = 3.0;
  int threads = 1;

  std::string input;          ///< verify/fit: directory of a previous run
  std::filesystem::path output;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a config document; unknown keys are rejected by name.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Default output root: $FERMIGNS_OUT or ./fermigns_out.
std::filesystem::path default_output_root();

}  // namespace fermigns
