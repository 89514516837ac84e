#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fermigns/config.hpp"
#include "fermigns/error.hpp"
#include "fermigns/runner.hpp"

namespace {

using nlohmann::json;

/// Command-line values that override the config file when given.
struct Overrides {
  std::string config_file;
  std::optional<double> alpha, coupling, k_fraction, mass, box_length, tolerance, cells;
  std::optional<std::string> q, output, potential_field;
  std::optional<int> rank, particles, points, restarts, max_iterations, threads, count;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> couplings, betas;
  std::optional<std::string> input;
};

void add_common(CLI::App& sub, Overrides& o) {
  sub.add_option("-c,--config", o.config_file, "JSON config file; flags override its values");
  sub.add_option("--alpha", o.alpha, "Riesz exponent alpha in (0, 2)");
  sub.add_option("--q", o.q, "Schatten exponent q >= 1 or inf");
  sub.add_option("--rank", o.rank, "GNS rank cap");
  sub.add_option("--N,--particles", o.particles, "number of trapped particles");
  sub.add_option("--K,--coupling", o.coupling, "trapped coupling K");
  sub.add_option("--k-fraction", o.k_fraction, "coupling as a multiple of the GNS estimate");
  sub.add_option("--mass", o.mass, "mass m of the kinetic operator");
  sub.add_option("--L", o.box_length, "box length");
  sub.add_option("--n", o.points, "grid points per axis");
  sub.add_option("--tol", o.tolerance, "solver tolerance");
  sub.add_option("--max-iter", o.max_iterations, "iteration limit");
  sub.add_option("--restarts", o.restarts, "seeded restarts");
  sub.add_option("--seed", o.seed, "random seed");
  sub.add_option("--cells-per-epsilon", o.cells, "sweep resolution target");
  sub.add_option("--ladder-count", o.count, "number of sweep couplings");
  sub.add_option("--couplings", o.couplings, "explicit sweep couplings");
  sub.add_option("--betas", o.betas, "duality beta grid");
  sub.add_option("--potential-field", o.potential_field, "sampled potential field file");
  sub.add_option("--threads", o.threads, "worker threads");
  sub.add_option("-o,--out", o.output, "output directory");
}

json load_document(const Overrides& o) {
  json doc = json::object();
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw fermigns::ConfigError("config: cannot open " + o.config_file);
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw fermigns::ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
  }
  auto set = [&doc](const json::json_pointer& ptr, const auto& value) {
    if (value) doc[ptr] = *value;
  };
  set("/alpha"_json_pointer, o.alpha);
  set("/coupling"_json_pointer, o.coupling);
  set("/k_fraction"_json_pointer, o.k_fraction);
  set("/mass"_json_pointer, o.mass);
  set("/grid/L"_json_pointer, o.box_length);
  set("/grid/n"_json_pointer, o.points);
  set("/rank"_json_pointer, o.rank);
  set("/particles"_json_pointer, o.particles);
  set("/solver/tolerance"_json_pointer, o.tolerance);
  set("/solver/max_iterations"_json_pointer, o.max_iterations);
  set("/solver/restarts"_json_pointer, o.restarts);
  set("/solver/seed"_json_pointer, o.seed);
  set("/solver/cells_per_epsilon"_json_pointer, o.cells);
  set("/solver/threads"_json_pointer, o.threads);
  set("/ladder/count"_json_pointer, o.count);
  set("/ladder/couplings"_json_pointer, o.couplings);
  set("/betas"_json_pointer, o.betas);
  set("/output"_json_pointer, o.output);
  set("/input"_json_pointer, o.input);
  if (o.q) doc["q"] = *o.q;
  if (o.potential_field) {
    doc["potential"]["kind"] = "field";
    doc["potential"]["field"] = *o.potential_field;
  }
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for fermionic Gagliardo-Nirenberg-Sobolev inequalities"};
  app.require_subcommand(1);
  Overrides o;
  const char* names[][2] = {
      {"gns", "optimize the GNS ratio"},
      {"lt", "Lieb-Thirring spectra and the duality product"},
      {"trapped", "minimize the trapped Hartree-Fock functional"},
      {"sweep", "trapped minimizers along a coupling ladder and the blow-up fit"},
      {"fit", "refit a stored sweep"},
      {"verify", "identity checks on a stored density operator"},
      {"oracle", "closed-form Gaussian checks"},
  };
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(*sub, o);
    if (std::string(name) == "verify" || std::string(name) == "fit" || std::string(name) == "lt") {
      sub->add_option("input", o.input, "directory of a previous run");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fermigns::kExitConfig;
  }
  try {
    json doc = load_document(o);
    doc["subcommand"] = app.get_subcommands().front()->get_name();
    const fermigns::RunConfig cfg = fermigns::config_from_json(doc);
    return fermigns::run_guarded(cfg, std::cerr);
  } catch (const fermigns::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fermigns::kExitConfig;
  }
}
