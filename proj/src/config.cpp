#include "fermigns/config.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

#include "fermigns/error.hpp"

namespace fermigns {

namespace {

using nlohmann::json;

const std::set<std::string> kSubcommands{"gns", "lt", "trapped", "sweep", "fit", "verify", "oracle"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + key + ": unknown key");
  }
}

template <class T>
void read(const json& obj, const char* key, T& into, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + key + ": wrong type");
  }
}

std::array<double, 3> read_point(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(field + ": expected three numbers");
  std::array<double, 3> p{};
  for (int a = 0; a < 3; ++a) {
    if (!v[a].is_number()) throw ConfigError(field + ": expected three numbers");
    p[a] = v[a].get<double>();
  }
  return p;
}

SchattenIndex read_q(const json& v) {
  if (v.is_number()) {
    const double q = v.get<double>();
    if (!(q >= 1.0)) throw ConfigError("q: must be >= 1 or \"inf\", got " + v.dump());
    return SchattenIndex(q);
  }
  if (v.is_string()) {
    try {
      return SchattenIndex::parse(v.get<std::string>());
    } catch (const ConfigError&) {
      throw ConfigError("q: must be >= 1 or \"inf\", got " + v.dump());
    }
  }
  throw ConfigError("q: must be a number or \"inf\"");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void RunConfig::validate() const {
  require(kSubcommands.count(subcommand) == 1, "subcommand: unknown '" + subcommand + "'");
  require(grid.box_length > 0.0 && std::isfinite(grid.box_length), "grid.L: must be positive");
  require(grid.points >= 4 && grid.points % 2 == 0, "grid.n: must be even and >= 4");
  require(alpha > 0.0 && alpha < 2.0, "alpha: must lie in (0, 2)");
  if (alpha < 1.0) {
    require(!q.is_infinite() && q.value() <= (2.0 - alpha) / (1.0 - alpha) + 1e-12,
            "q: must not exceed (2 - alpha)/(1 - alpha) when alpha < 1");
  }
  require(rank >= 1, "rank: must be >= 1");
  require(particles >= 1, "particles: must be >= 1");
  require(coupling >= 0.0, "coupling: must be >= 0");
  require(k_fraction >= 0.0, "k_fraction: must be >= 0");
  require(mass >= 0.0, "mass: must be >= 0");
  require(potential.kind == "polynomial" || potential.kind == "field", "potential.kind: polynomial or field");
  if (potential.kind == "polynomial") {
    require(!potential.zeros.empty(), "potential.zeros: at least one zero");
    for (const auto& z : potential.zeros) {
      require(z.exponent > 0.0 && z.exponent < 1.0, "potential.zeros.exponent: must lie in (0, 1)");
    }
    require(potential.prefactor > 0.0, "potential.prefactor: must be positive");
  } else {
    require(!potential.field_path.empty(), "potential.field: path required");
  }
  require(ladder.count >= 2, "ladder.count: must be >= 2");
  require(ladder.gap > 0.0 && ladder.gap < 1.0, "ladder.gap: must lie in (0, 1)");
  require(ladder.end > 0.0 && ladder.end <= ladder.gap, "ladder.end: must lie in (0, gap]");
  for (double k : ladder.couplings) require(k >= 0.0, "ladder.couplings: must be >= 0");
  for (double b : betas) require(b > 0.0, "betas: must be positive");
  require(tolerance > 0.0, "solver.tolerance: must be positive");
  require(max_iterations >= 1, "solver.max_iterations: must be >= 1");
  require(restarts >= 0, "solver.restarts: must be >= 0");
  require(cells_per_epsilon > 0.0, "solver.cells_per_epsilon: must be positive");
  require(threads >= 1, "solver.threads: must be >= 1");
  if (subcommand == "verify" || subcommand == "fit") require(!input.empty(), "input: directory required");
}

RunConfig config_from_json(const json& doc) {
  reject_unknown(doc,
                 {"subcommand", "grid", "alpha", "q", "rank", "particles", "coupling", "k_fraction", "mass",
                  "potential", "ladder", "betas", "solver", "input", "output"},
                 "");
  RunConfig c;
  read(doc, "subcommand", c.subcommand, "");
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    reject_unknown(g, {"L", "n", "center"}, "grid.");
    read(g, "L", c.grid.box_length, "grid.");
    read(g, "n", c.grid.points, "grid.");
    if (g.contains("center")) c.grid.center = read_point(g["center"], "grid.center");
  }
  read(doc, "alpha", c.alpha, "");
  if (doc.contains("q")) c.q = read_q(doc["q"]);
  read(doc, "rank", c.rank, "");
  read(doc, "particles", c.particles, "");
  read(doc, "coupling", c.coupling, "");
  read(doc, "k_fraction", c.k_fraction, "");
  read(doc, "mass", c.mass, "");
  if (doc.contains("potential")) {
    const json& p = doc["potential"];
    reject_unknown(p, {"kind", "zeros", "prefactor", "field"}, "potential.");
    read(p, "kind", c.potential.kind, "potential.");
    read(p, "prefactor", c.potential.prefactor, "potential.");
    read(p, "field", c.potential.field_path, "potential.");
    if (p.contains("zeros")) {
      if (!p["zeros"].is_array()) throw ConfigError("potential.zeros: expected an array");
      c.potential.zeros.clear();
      for (const auto& z : p["zeros"]) {
        reject_unknown(z, {"point", "exponent"}, "potential.zeros.");
        PotentialZero pz;
        if (z.contains("point")) pz.point = read_point(z["point"], "potential.zeros.point");
        read(z, "exponent", pz.exponent, "potential.zeros.");
        c.potential.zeros.push_back(pz);
      }
    }
  }
  if (doc.contains("ladder")) {
    const json& l = doc["ladder"];
    reject_unknown(l, {"couplings", "count", "gap", "end"}, "ladder.");
    read(l, "couplings", c.ladder.couplings, "ladder.");
    read(l, "count", c.ladder.count, "ladder.");
    read(l, "gap", c.ladder.gap, "ladder.");
    read(l, "end", c.ladder.end, "ladder.");
  }
  read(doc, "betas", c.betas, "");
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    reject_unknown(s, {"tolerance", "max_iterations", "restarts", "seed", "cells_per_epsilon", "threads"},
                   "solver.");
    read(s, "tolerance", c.tolerance, "solver.");
    read(s, "max_iterations", c.max_iterations, "solver.");
    read(s, "restarts", c.restarts, "solver.");
    read(s, "seed", c.seed, "solver.");
    read(s, "cells_per_epsilon", c.cells_per_epsilon, "solver.");
    read(s, "threads", c.threads, "solver.");
  }
  read(doc, "input", c.input, "");
  std::string out;
  read(doc, "output", out, "");
  if (!out.empty()) c.output = out;
  return c;
}

json config_to_json(const RunConfig& c) {
  json zeros = json::array();
  for (const auto& z : c.potential.zeros) zeros.push_back({{"point", z.point}, {"exponent", z.exponent}});
  json q = c.q.is_infinite() ? json("inf") : json(c.q.value());
  return {
      {"subcommand", c.subcommand},
      {"grid", {{"L", c.grid.box_length}, {"n", c.grid.points}, {"center", c.grid.center}}},
      {"alpha", c.alpha},
      {"q", q},
      {"rank", c.rank},
      {"particles", c.particles},
      {"coupling", c.coupling},
      {"k_fraction", c.k_fraction},
      {"mass", c.mass},
      {"potential",
       {{"kind", c.potential.kind}, {"zeros", zeros}, {"prefactor", c.potential.prefactor},
        {"field", c.potential.field_path}}},
      {"ladder", {{"couplings", c.ladder.couplings}, {"count", c.ladder.count}, {"gap", c.ladder.gap},
                  {"end", c.ladder.end}}},
      {"betas", c.betas},
      {"solver",
       {{"tolerance", c.tolerance}, {"max_iterations", c.max_iterations}, {"restarts", c.restarts},
        {"seed", c.seed}, {"cells_per_epsilon", c.cells_per_epsilon}, {"threads", c.threads}}},
      {"input", c.input},
      {"output", c.output.string()},
  };
}

std::filesystem::path default_output_root() {
  if (const char* env = std::getenv("FERMIGNS_OUT"); env != nullptr && *env != '\0') return env;
  return "fermigns_out";
}

}  // namespace fermigns
