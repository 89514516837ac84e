#include "fermigns/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "fermigns/blowup.hpp"
#include "fermigns/diagnostics.hpp"
#include "fermigns/error.hpp"
#include "fermigns/field_io.hpp"
#include "fermigns/gns.hpp"
#include "fermigns/lieb_thirring.hpp"
#include "fermigns/riesz.hpp"
#include "fermigns/state_io.hpp"
#include "fermigns/trapped.hpp"

namespace fermigns {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Files produced by a pipeline besides result.json and config.json.
struct Artifacts {
  std::vector<std::pair<std::string, DensityOperator>> operators;  ///< subdirectory, state, manifest extra
  std::vector<json> operator_extras;
  std::vector<std::pair<std::string, std::string>> texts;  ///< file name, contents
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json to_json(const IdentityReport& r) {
  return {{"name", r.name},         {"lhs", r.lhs},   {"rhs", r.rhs},         {"residual", r.residual},
          {"tolerance", r.tolerance}, {"pass", r.pass}, {"skipped", r.skipped}, {"note", r.note}};
}

json to_json(const DecayFit& f) {
  return {{"exponent", f.exponent}, {"r_min", f.r_min},       {"r_max", f.r_max},
          {"r_squared", f.r_squared}, {"shells", f.shells},   {"reliable", f.reliable},
          {"power_law", f.power_law}, {"note", f.note}};
}

json to_json(const PowerFit& f) {
  return {{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"r_squared", f.r_squared}};
}

json to_json(const std::array<double, 3>& p) { return json::array({p[0], p[1], p[2]}); }

Grid config_grid(const RunConfig& cfg) { return make_grid(cfg.grid.box_length, cfg.grid.points, cfg.grid.center); }

GnsProblem gns_problem(const RunConfig& cfg, double alpha, const SchattenIndex& q, int rank) {
  GnsProblem pb;
  pb.alpha = alpha;
  pb.q = q;
  pb.rank_cap = rank;
  pb.grid = config_grid(cfg);
  pb.controls.restarts = std::max(1, cfg.restarts);
  pb.controls.max_iterations = cfg.max_iterations;
  pb.controls.tolerance = cfg.tolerance;
  pb.controls.seed = cfg.seed;
  return pb;
}

GnsResult solve_gns(const GnsProblem& pb, std::ostream& log) {
  GnsProblem local = pb;
  local.controls.on_log = [&log](const GnsLogEntry& e) {
    if (e.event.empty()) return;
    log << "  gns restart " << e.restart << " iter " << e.iteration << " ratio " << std::setprecision(10)
        << e.ratio << " residual " << std::setprecision(3) << e.residual << " " << e.event << '\n';
  };
  Stopwatch sw;
  GnsResult res = optimize_gns(local);
  log << "gns: K_est = " << std::setprecision(10) << res.k_est << " rank " << res.rank
      << (res.converged ? " converged" : " NOT converged") << " in " << std::setprecision(3) << sw.seconds()
      << " s\n";
  return res;
}

json gns_identities(const DensityOperator& gamma, const std::vector<double>& mu, double alpha) {
  json ids = json::array();
  ids.push_back(to_json(virial_check(gamma, alpha)));
  ids.push_back(to_json(pohozaev_trace(gamma, mu, alpha)));
  for (const auto& r : pohozaev_per_orbital(gamma, mu, alpha)) ids.push_back(to_json(r));
  return ids;
}

bool all_pass(const json& reports) {
  for (const auto& r : reports) {
    if (!r["skipped"].get<bool>() && !r["pass"].get<bool>()) return false;
  }
  return true;
}

json gns_json(const GnsResult& g, double alpha, const SchattenIndex& q) {
  double max_res = 0.0;
  for (double r : g.residuals) max_res = std::max(max_res, r);
  return {{"alpha", alpha},
          {"q", q.is_infinite() ? json("inf") : json(q.value())},
          {"k_est", g.k_est},
          {"rank", g.rank},
          {"converged", g.converged},
          {"multipliers", g.multipliers},
          {"residuals", g.residuals},
          {"max_residual", max_res},
          {"weights", g.optimizer.weights},
          {"restart_ratios", g.restart_ratios},
          {"max_imag", g.max_imag}};
}

json gns_manifest(const GnsResult& g, double alpha, const SchattenIndex& q) {
  return {{"kind", "gns_optimizer"},
          {"alpha", alpha},
          {"q", q.is_infinite() ? json("inf") : json(q.value())},
          {"k_est", g.k_est},
          {"multipliers", g.multipliers}};
}

/// Accepts either an operator directory or a run directory holding `optimizer/`.
fs::path operator_dir(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json") && fs::exists(dir / "optimizer" / "manifest.json")) return dir / "optimizer";
  return dir;
}

/// A GNS result rebuilt from a stored optimizer directory.
GnsResult stored_gns(const fs::path& dir) {
  const auto stored = read_density_operator(dir);
  GnsResult g;
  g.optimizer = stored.gamma;
  g.rank = stored.gamma.rank();
  g.k_est = stored.manifest.value("k_est", 0.0);
  g.multipliers = stored.manifest.value("multipliers", std::vector<double>{});
  g.converged = true;
  return g;
}

PotentialSpec make_potential(const RunConfig& cfg, json& inputs) {
  if (cfg.potential.kind == "polynomial") {
    return PotentialSpec::polynomial(cfg.potential.zeros, cfg.potential.prefactor);
  }
  Field v = read_field(cfg.potential.field_path);
  inputs["potential_field"] = {{"path", cfg.potential.field_path}, {"content_hash", content_hash(v)}};
  return PotentialSpec::sampled(std::move(v));
}

TrappedProblem trapped_problem(const RunConfig& cfg, const PotentialSpec& pot, double coupling) {
  TrappedProblem pb;
  pb.particles = cfg.particles;
  pb.coupling = coupling;
  pb.mass = cfg.mass;
  pb.potential = pot;
  pb.grid = pot.form == PotentialSpec::Form::sampled ? pot.samples.grid() : config_grid(cfg);
  pb.controls.restarts = cfg.restarts;
  pb.controls.seed = cfg.seed;
  pb.controls.max_iterations = cfg.max_iterations;
  pb.controls.tolerance = std::max(cfg.tolerance, 1e-7);
  return pb;
}

std::array<double, 3> probe_center(const PotentialSpec& pot, const Grid& grid) {
  if (pot.form == PotentialSpec::Form::polynomial_zeros) return pot.selected_zeros().front();
  // Sampled potentials: the grid point where V is smallest.
  std::size_t best = 0;
  for (std::size_t i = 1; i < pot.samples.size(); ++i) {
    if (pot.samples[i].real() < pot.samples[best].real()) best = i;
  }
  const int n = grid.points();
  const int ix = static_cast<int>(best / (static_cast<std::size_t>(n) * n));
  const int iy = static_cast<int>((best / n) % n);
  const int iz = static_cast<int>(best % n);
  return {grid.coordinate(0, ix), grid.coordinate(1, iy), grid.coordinate(2, iz)};
}

json pipeline_gns(const RunConfig& cfg, std::ostream& log, Artifacts& art, int& status) {
  const GnsResult g = solve_gns(gns_problem(cfg, cfg.alpha, cfg.q, cfg.rank), log);
  json out = gns_json(g, cfg.alpha, cfg.q);
  out["identities"] = gns_identities(g.optimizer, g.multipliers, cfg.alpha);
  out["gns_ratio"] = gns_ratio(g.optimizer, cfg.alpha, cfg.q);
  art.operators.emplace_back("optimizer", g.optimizer);
  art.operator_extras.push_back(gns_manifest(g, cfg.alpha, cfg.q));
  status = g.converged ? kExitOk : kExitPartial;
  return out;
}

json pipeline_lt(const RunConfig& cfg, std::ostream& log, Artifacts& art, int& status, json& inputs) {
  GnsResult g;
  if (!cfg.input.empty()) {
    const fs::path dir = operator_dir(cfg.input);
    g = stored_gns(dir);
    inputs["optimizer"] = read_density_operator(dir).manifest.value("content_hash", "");
  } else {
    g = solve_gns(gns_problem(cfg, cfg.alpha, cfg.q, cfg.rank), log);
    art.operators.emplace_back("optimizer", g.optimizer);
    art.operator_extras.push_back(gns_manifest(g, cfg.alpha, cfg.q));
  }
  const auto betas = cfg.betas.empty() ? default_beta_grid(cfg.alpha) : cfg.betas;
  EigenControls eigen;
  eigen.seed = cfg.seed;
  Stopwatch sw;
  const DualityReport rep = duality_check(g, cfg.alpha, cfg.q, betas, eigen);
  log << "lt: best product " << std::setprecision(8) << rep.best_product << " target " << rep.target << " in "
      << std::setprecision(3) << sw.seconds() << " s\n";
  json rows = json::array();
  double worst = 0.0;
  for (const auto& r : rep.rows) {
    rows.push_back({{"beta", r.beta},
                    {"eigenvalues", r.eigenvalues},
                    {"l_lower", r.l_lower},
                    {"product", r.product},
                    {"max_residual", r.max_residual}});
    worst = std::max(worst, r.max_residual);
  }
  status = g.converged && worst <= 1e-6 ? kExitOk : kExitPartial;
  return {{"k_est", g.k_est},
          {"exponent", duality_exponent(cfg.alpha, cfg.q)},
          {"rows", rows},
          {"best_product", rep.best_product},
          {"best_beta", rep.best_beta},
          {"target", rep.target},
          {"saturation", rep.saturation},
          {"relative_gap", rep.relative_gap},
          {"max_residual", worst}};
}

json pipeline_trapped(const RunConfig& cfg, std::ostream& log, Artifacts& art, int& status, json& inputs) {
  const PotentialSpec pot = make_potential(cfg, inputs);
  std::optional<GnsResult> g;
  double coupling = cfg.coupling;
  if (cfg.k_fraction > 0.0) {
    g = solve_gns(gns_problem(cfg, 1.0, SchattenIndex::infinity(), cfg.particles), log);
    coupling = cfg.k_fraction * g->k_est;
  }
  const TrappedProblem pb = trapped_problem(cfg, pot, coupling);
  Stopwatch sw;
  const TrappedResult r = minimize_trapped(pb);
  log << "trapped: K = " << std::setprecision(8) << coupling << " E = " << r.energy << " rank " << r.rank()
      << (r.converged ? " converged" : "") << (r.unbounded ? " unbounded" : "") << " in " << std::setprecision(3)
      << sw.seconds() << " s\n";
  json out = {{"coupling", coupling},
              {"energy", r.energy},
              {"rank", r.rank()},
              {"multipliers", r.multipliers},
              {"epsilon", r.epsilon},
              {"residual", r.residual},
              {"aufbau_verified", r.aufbau_verified},
              {"complement_lowest", r.complement_lowest},
              {"converged", r.converged},
              {"unbounded", r.unbounded},
              {"restart_energies", r.restart_energies}};
  if (g) out["k_est"] = g->k_est;
  bool ok = r.converged && !r.unbounded;
  if (g && (r.unbounded || coupling >= g->k_est)) {
    const DivergenceReport d = divergence_probe(pb, g->optimizer.frame, probe_center(pot, pb.grid));
    out["divergence_probe"] = {{"unbounded", d.unbounded},
                               {"trials", d.trials},
                               {"energy_at_unit_scale", d.energy_at_unit_scale},
                               {"min_energy", d.min_energy},
                               {"min_scale", d.min_scale},
                               {"interior_minimum", d.interior_minimum}};
    ok = d.unbounded;
  }
  if (!r.unbounded && r.rank() > 0) {
    art.operators.emplace_back("minimizer", DensityOperator(r.frame, std::vector<double>(r.rank(), 1.0)));
    art.operator_extras.push_back({{"kind", "trapped_minimizer"}, {"coupling", coupling}, {"energy", r.energy}});
  }
  status = ok ? kExitOk : kExitPartial;
  return out;
}

std::vector<double> ladder(const RunConfig& cfg, double k_ref) {
  if (!cfg.ladder.couplings.empty()) return cfg.ladder.couplings;
  std::vector<double> ks;
  const int n = cfg.ladder.count;
  for (int j = 0; j < n; ++j) {
    const double gap = cfg.ladder.gap * std::pow(cfg.ladder.end / cfg.ladder.gap, static_cast<double>(j) / (n - 1));
    ks.push_back(k_ref * (1.0 - gap));
  }
  return ks;
}

json records_json(const std::vector<SweepRecord>& recs) {
  json out = json::array();
  for (const auto& r : recs) {
    out.push_back({{"coupling", r.coupling},
                   {"energy", r.energy},
                   {"epsilon", r.epsilon},
                   {"rank", r.rank},
                   {"multipliers", r.multipliers},
                   {"center", to_json(r.center)},
                   {"box_length", r.box_length},
                   {"spacing", r.spacing},
                   {"converged", r.converged},
                   {"aufbau_verified", r.aufbau_verified}});
  }
  return out;
}

std::vector<SweepRecord> records_from_json(const json& arr) {
  std::vector<SweepRecord> recs;
  for (const auto& j : arr) {
    SweepRecord r{};
    r.coupling = j.at("coupling").get<double>();
    r.energy = j.at("energy").get<double>();
    r.epsilon = j.at("epsilon").get<double>();
    r.rank = j.at("rank").get<std::size_t>();
    r.multipliers = j.at("multipliers").get<std::vector<double>>();
    r.center = j.at("center").get<std::array<double, 3>>();
    r.box_length = j.at("box_length").get<double>();
    r.spacing = j.at("spacing").get<double>();
    r.converged = j.at("converged").get<bool>();
    r.aufbau_verified = j.at("aufbau_verified").get<bool>();
    recs.push_back(std::move(r));
  }
  return recs;
}

std::string sweep_csv(const std::vector<SweepRecord>& recs) {
  std::ostringstream os;
  os << "K,E,epsilon,rank,z_x,z_y,z_z,box_length,converged,aufbau\n";
  os << std::setprecision(17);
  for (const auto& r : recs) {
    os << r.coupling << ',' << r.energy << ',' << r.epsilon << ',' << r.rank << ',' << r.center[0] << ','
       << r.center[1] << ',' << r.center[2] << ',' << r.box_length << ',' << (r.converged ? 1 : 0) << ','
       << (r.aufbau_verified ? 1 : 0) << '\n';
  }
  return os.str();
}

json fit_json(const BlowupFit& f) {
  return {{"k_infinity", f.k_infinity},
          {"k_estimate", f.k_estimate},
          {"energy", to_json(f.energy)},
          {"epsilon", to_json(f.epsilon)},
          {"expected_energy_exponent", f.expected_energy_exponent},
          {"expected_epsilon_exponent", f.expected_epsilon_exponent},
          {"predicted_energy_prefactor", f.predicted_energy_prefactor},
          {"predicted_epsilon_prefactor", f.predicted_epsilon_prefactor},
          {"kappa_bar", f.kappa_bar},
          {"kappa_argmin", to_json(f.kappa_argmin)},
          {"iota", f.iota},
          {"interaction", f.interaction},
          {"reliable", f.reliable},
          {"limit_point", to_json(f.limit_point)},
          {"center_distance", f.center_distance},
          {"scaled_offset", to_json(f.scaled_offset)},
          {"records_used", f.records_used}};
}

json try_fit(const std::vector<SweepRecord>& recs, const PotentialSpec& pot, const GnsResult& g, bool& ok,
             std::ostream& log) {
  ok = false;
  if (pot.form != PotentialSpec::Form::polynomial_zeros) return {{"skipped", "sampled potential"}};
  try {
    const BlowupFit f = fit_blowup(recs, pot, g);
    log << "fit: e_E = " << std::setprecision(4) << f.energy.exponent << " e_eps = " << f.epsilon.exponent
        << " K_inf = " << std::setprecision(8) << f.k_infinity << '\n';
    ok = f.reliable;
    return fit_json(f);
  } catch (const InputError& e) {
    return {{"skipped", e.what()}};
  }
}

json pipeline_sweep(const RunConfig& cfg, std::ostream& log, Artifacts& art, int& status, json& inputs) {
  const PotentialSpec pot = make_potential(cfg, inputs);
  const GnsResult g = solve_gns(gns_problem(cfg, 1.0, SchattenIndex::infinity(), cfg.particles), log);
  art.operators.emplace_back("gns", g.optimizer);
  art.operator_extras.push_back(gns_manifest(g, 1.0, SchattenIndex::infinity()));
  const auto ks = ladder(cfg, g.k_est);
  const TrappedProblem base = trapped_problem(cfg, pot, 0.0);

  SweepOptions opt;
  opt.cells_per_epsilon = cfg.cells_per_epsilon;
  opt.k_reference = g.k_est;
  opt.profile = g.optimizer.frame;
  if (pot.form == PotentialSpec::Form::polynomial_zeros && ks.front() < g.k_est) {
    const BlowupConstants bc = blowup_constants(g, pot);
    opt.initial_epsilon = bc.epsilon_prefactor * std::pow(g.k_est - ks.front(), 1.0 / (bc.p + 1.0));
  } else {
    opt.adaptive_box = false;
    opt.profile.reset();
  }
  Stopwatch sw;
  opt.on_record = [&](const SweepRecord& r) {
    log << "  K = " << std::setprecision(8) << r.coupling << " E = " << r.energy << " eps = " << r.epsilon
        << " rank " << r.rank << (r.converged ? "" : " NOT converged") << " at " << std::setprecision(4)
        << sw.seconds() << " s\n";
  };
  const auto recs = sweep_k(base, ks, opt);
  log << "sweep: " << recs.size() << " points in " << std::setprecision(4) << sw.seconds() << " s\n";
  bool all_converged = true;
  for (const auto& r : recs) all_converged = all_converged && r.converged;

  art.texts.emplace_back("sweep.csv", sweep_csv(recs));
  art.texts.emplace_back("records.json", records_json(recs).dump(2) + "\n");
  bool fit_ok = false;
  json fit = try_fit(recs, pot, g, fit_ok, log);
  art.texts.emplace_back("fit.json", fit.dump(2) + "\n");
  status = all_converged && fit_ok ? kExitOk : kExitPartial;
  return {{"k_est", g.k_est}, {"couplings", ks}, {"records", records_json(recs)}, {"fit", fit}};
}

json pipeline_fit(const RunConfig& cfg, std::ostream& log, int& status, json& inputs) {
  const fs::path dir = cfg.input;
  std::ifstream rin(dir / "records.json");
  std::ifstream cin(dir / "config.json");
  if (!rin || !cin) throw InputError("fit: " + dir.string() + " lacks records.json or config.json");
  json recs_doc, cfg_doc;
  try {
    rin >> recs_doc;
    cin >> cfg_doc;
  } catch (const json::exception& e) {
    throw InputError(std::string("fit: malformed input: ") + e.what());
  }
  const RunConfig sweep_cfg = config_from_json(cfg_doc);
  const PotentialSpec pot = make_potential(sweep_cfg, inputs);
  const GnsResult g = stored_gns(dir / "gns");
  inputs["gns"] = read_density_operator(dir / "gns").manifest.value("content_hash", "");
  bool ok = false;
  json fit = try_fit(records_from_json(recs_doc), pot, g, ok, log);
  status = ok ? kExitOk : kExitPartial;
  return fit;
}

json pipeline_verify(const RunConfig& cfg, std::ostream& log, int& status, json& inputs) {
  const fs::path dir = operator_dir(cfg.input);
  const StoredOperator stored = read_density_operator(dir);
  inputs["operator"] = {{"path", dir.string()}, {"content_hash", stored.manifest.value("content_hash", "")}};
  const double alpha = stored.manifest.value("alpha", cfg.alpha);
  const ElReport el = euler_lagrange(stored.gamma, alpha);
  json ids = gns_identities(el.gamma, el.multipliers, alpha);

  const Field rho = density(el.gamma);
  const DecayFit orbital = decay_fit(el.gamma.frame[0]);
  const DecayFit hartree = decay_fit(riesz_convolve(rho, alpha));
  json decay = {{"orbital", to_json(orbital)}, {"hartree_potential", to_json(hartree)}};
  // Tail claims are made only where the decay theory applies.
  if (alpha <= 1.0) {
    decay["orbital"]["expected_range"] = {-4.5, -3.5};
    decay["orbital"]["pass"] = orbital.reliable && orbital.exponent >= -4.5 && orbital.exponent <= -3.5;
  }
  if (alpha == 1.0) {
    decay["hartree_potential"]["expected_range"] = {-1.3, -0.8};
    decay["hartree_potential"]["pass"] = hartree.reliable && hartree.exponent >= -1.3 && hartree.exponent <= -0.8;
  }
  const bool ok = all_pass(ids);
  log << "verify: " << ids.size() << " identity reports, " << (ok ? "all pass" : "some fail") << '\n';
  status = ok ? kExitOk : kExitPartial;
  return {{"alpha", alpha}, {"multipliers", el.multipliers}, {"residuals", el.residuals}, {"identities", ids},
          {"decay", decay}};
}

json pipeline_oracle(const RunConfig& cfg, std::ostream& log, int& status) {
  json reports = json::array();
  for (const auto& r : oracle_suite(config_grid(cfg))) reports.push_back(to_json(r));
  const bool ok = all_pass(reports);
  log << "oracle: " << (ok ? "all pass" : "some fail") << '\n';
  status = ok ? kExitOk : kExitPartial;
  return {{"reports", reports}};
}

json dispatch(const RunConfig& cfg, std::ostream& log, Artifacts& art, int& status, json& inputs) {
  const std::string& s = cfg.subcommand;
  if (s == "gns") return pipeline_gns(cfg, log, art, status);
  if (s == "lt") return pipeline_lt(cfg, log, art, status, inputs);
  if (s == "trapped") return pipeline_trapped(cfg, log, art, status, inputs);
  if (s == "sweep") return pipeline_sweep(cfg, log, art, status, inputs);
  if (s == "fit") return pipeline_fit(cfg, log, status, inputs);
  if (s == "verify") return pipeline_verify(cfg, log, status, inputs);
  if (s == "oracle") return pipeline_oracle(cfg, log, status);
  throw ConfigError("subcommand: unknown '" + s + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

}  // namespace

json run_payload(const RunConfig& cfg, std::ostream& log, int& status) {
  cfg.validate();
  Artifacts art;
  json inputs = json::object();
  json result = dispatch(cfg, log, art, status, inputs);
  return {{"config", config_to_json(cfg)}, {"inputs", inputs}, {"result", result}};
}

int run(const RunConfig& cfg_in, std::ostream& log) {
  RunConfig cfg = cfg_in;
  cfg.validate();
  if (cfg.output.empty()) cfg.output = default_output_root() / cfg.subcommand;
  Artifacts art;
  json inputs = json::object();
  int status = kExitOk;
  json result = dispatch(cfg, log, art, status, inputs);
  fs::create_directories(cfg.output);
  const json resolved = config_to_json(cfg);

  write_text(cfg.output / "config.json", resolved.dump(2) + "\n");
  json doc = {{"config", resolved}, {"inputs", inputs}, {"result", result}, {"status", status}};
  write_text(cfg.output / "result.json", doc.dump(2) + "\n");
  for (std::size_t i = 0; i < art.operators.size(); ++i) {
    json extra = art.operator_extras[i];
    extra["config"] = resolved;
    write_density_operator(cfg.output / art.operators[i].first, art.operators[i].second, extra);
  }
  for (const auto& [name, text] : art.texts) write_text(cfg.output / name, text);
  log << "wrote " << cfg.output.string() << '\n';
  return status;
}

int run_guarded(const RunConfig& cfg, std::ostream& log) {
  try {
    return run(cfg, log);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace fermigns
