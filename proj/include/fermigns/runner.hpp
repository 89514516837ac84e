#pragma once

#include <ostream>

#include "json.hpp"

#include "fermigns/config.hpp"

namespace fermigns {

/// Exit statuses of run().
enum ExitStatus : int { kExitOk = 0, kExitConfig = 1, kExitPartial = 2 };

/// Executes the pipeline named by cfg.subcommand and writes its artifacts
/// into cfg.output (default_output_root()/subcommand when empty):
/// config.json (resolved config), result.json ({config, inputs, result})
/// and pipeline specific files. Progress goes to `log`. Returns
/// kExitPartial when the run finished without converging or a check failed.
/// Configuration and input errors propagate as exceptions.
int run(const RunConfig& cfg, std::ostream& log);

/// Same, but maps library exceptions to kExitConfig with a message on `log`.
int run_guarded(const RunConfig& cfg, std::ostream& log);

/// The `result` payload of result.json, without writing anything. Used by
/// run() and by determinism checks.
nlohmann::json run_payload(const RunConfig& cfg, std::ostream& log, int& status);

}  // namespace fermigns
