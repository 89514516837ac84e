#pragma once

#include <filesystem>

#include "json.hpp"

#include "fermigns/state.hpp"

namespace fermigns {

/// A stored density operator and the free-form metadata saved with it.
struct StoredOperator {
  DensityOperator gamma;
  nlohmann::json manifest;
};

/// Writes orbital_000.fld, ... and manifest.json into `dir` (created if
/// needed). `extra` is merged into the manifest (multipliers, alpha, q, ...).
void write_density_operator(const std::filesystem::path& dir, const DensityOperator& gamma,
                            const nlohmann::json& extra = nlohmann::json::object());

StoredOperator read_density_operator(const std::filesystem::path& dir);

}  // namespace fermigns
