#include "fermigns/trapped.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fermigns/error.hpp"
#include "fermigns/frame_descent.hpp"
#include "fermigns/riesz.hpp"
#include "fermigns/spectral.hpp"

namespace fermigns {

void TrappedProblem::validate() const {
  if (particles < 1) throw ConfigError("N must be at least 1");
  if (!(coupling > 0.0) || !std::isfinite(coupling)) throw ConfigError("K must be positive");
  if (!(mass >= 0.0)) throw ConfigError("m must be nonnegative");
  potential.validate();
  if (potential.form == PotentialSpec::Form::sampled) require_same_grid(potential.samples.grid(), grid, "trapped problem");
  if (controls.max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (!(controls.tolerance > 0.0)) throw ConfigError("tol must be positive");
  if (controls.restarts < 1) throw ConfigError("restarts must be at least 1");
}

namespace {

LocalHamiltonian one_body(const TrappedProblem& pb, const Grid& grid) {
  return LocalHamiltonian{grid, KineticSpec{pb.mass, false}, pb.potential.sample(grid)};
}

FrameObjective trapped_objective(const TrappedProblem& pb, const Grid& grid, std::size_t rank) {
  FrameObjective obj;
  obj.quadratic = one_body(pb, grid);
  obj.weights.assign(rank, 1.0);
  obj.alpha = 1.0;
  const double k = pb.coupling;
  obj.outer = [k](const std::vector<double>& q, double d, std::vector<double>& dq, double& dd) {
    dq.assign(q.size(), 1.0);
    dd = -k;
    return std::accumulate(q.begin(), q.end(), 0.0) - k * d;
  };
  return obj;
}

struct RitzFrame {
  Block u;
  std::vector<double> mu;
  std::vector<double> self;  ///< D(|u_i|^2)
  std::vector<double> potential;  ///< V - 2 K W
};

RitzFrame ritz(const TrappedProblem& pb, const LocalHamiltonian& h0, Block u) {
  const Field rho = density(u, std::vector<double>(u.size(), 1.0));
  const Field w = riesz_convolve(rho, 1.0);
  RitzFrame out;
  out.potential = h0.potential;
  for (std::size_t p = 0; p < w.size(); ++p) out.potential[p] -= 2.0 * pb.coupling * w[p].real();
  const LocalHamiltonian hv{h0.grid, h0.kinetic, out.potential};
  Block hu;
  for (const auto& f : u) hu.push_back(hv.apply(f));
  Eigen::MatrixXcd m = gram(u, hu);
  m = 0.5 * (m + m.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  out.u = combine(u, es.eigenvectors());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.mu.push_back(es.eigenvalues()(i));
  for (const auto& f : out.u) {
    Field r(f.grid(), FieldTag::density);
    for (std::size_t p = 0; p < f.size(); ++p) r[p] = std::norm(f[p]);
    out.self.push_back(hartree_energy(r, r, 1.0));
  }
  return out;
}

double massless_trace(const Block& u) {
  double t = 0.0;
  for (const auto& f : u) t += kinetic_form(f);
  return t;
}

TrappedResult run_once(const TrappedProblem& pb, Block u) {
  const Grid& grid = pb.grid;
  const LocalHamiltonian h0 = one_body(pb, grid);
  TrappedResult res;
  DescentControls dc;
  dc.max_iterations = pb.controls.max_iterations;
  dc.tolerance = pb.controls.tolerance;
  RitzFrame rf;
  while (true) {
    const FrameObjective obj = trapped_objective(pb, grid, u.size());
    const auto desc = minimize_frame(obj, std::move(u), dc);
    res.energy = desc.point.f;
    res.residual = desc.residual;
    res.converged = desc.converged;
    if (res.energy < pb.controls.energy_floor) {
      res.unbounded = true;
      res.frame = OrthoFrame::adopt(desc.point.u, 1e-6);
      res.epsilon = 1.0 / massless_trace(desc.point.u);
      return res;
    }
    rf = ritz(pb, h0, desc.point.u);
    u = rf.u;
    // Removing u_i changes the energy by -(mu_i + K D(|u_i|^2)).
    std::size_t worst = u.size();
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (rf.mu[i] > -pb.coupling * rf.self[i] && (worst == u.size() || rf.mu[i] > rf.mu[worst])) worst = i;
    }
    if (worst == u.size() || u.size() == 1) break;
    u.erase(u.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  res.frame = OrthoFrame::adopt(u, 1e-7);
  res.multipliers = rf.mu;
  res.epsilon = 1.0 / massless_trace(u);

  // Aufbau: the frame must span the lowest eigenvectors of H_V.
  const std::size_t r = u.size();
  const LocalHamiltonian hv{grid, h0.kinetic, rf.potential};
  EigenControls ec = pb.controls.eigen;
  ec.tolerance = std::max(ec.tolerance, 1e-7);
  const auto eig = lowest_eigenpairs(hv, static_cast<int>(r + 1), ec, u);
  bool ok = eig.converged || *std::max_element(eig.residuals.begin(), eig.residuals.end()) < 1e-5;
  const double scale = std::max(1.0, std::abs(rf.mu.back()));
  for (std::size_t i = 0; i < r; ++i) ok = ok && std::abs(eig.values[i] - rf.mu[i]) <= 1e-5 * scale;
  Block lowest(eig.vectors.begin(), eig.vectors.begin() + static_cast<std::ptrdiff_t>(r));
  const Eigen::MatrixXcd overlap = gram(u, lowest);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(overlap);
  ok = ok && svd.singularValues().minCoeff() > 1.0 - 1e-4;
  res.complement_lowest = eig.values[r];
  ok = ok && res.complement_lowest >= rf.mu.back() - 1e-6;
  if (static_cast<int>(r) < pb.particles) ok = ok && res.complement_lowest > 0.0;
  res.aufbau_verified = ok;
  return res;
}

Block start_frame(const TrappedProblem& pb, int restart) {
  const LocalHamiltonian h0 = one_body(pb, pb.grid);
  EigenControls ec = pb.controls.eigen;
  ec.tolerance = 1e-4;
  auto eig = lowest_eigenpairs(h0, pb.particles, ec);
  Block u = eig.vectors;
  if (restart > 0) {
    const auto noise = smooth_start_block(pb.grid, pb.particles, pb.controls.seed * 7919ULL + static_cast<std::uint64_t>(restart),
                                          pb.grid.box_length() / 12.0);
    for (std::size_t i = 0; i < u.size(); ++i) axpy(pb.controls.perturbation / norm(noise[i]), noise[i], u[i]);
  }
  return loewdin_orthonormalize(std::move(u)).orbitals();
}

}  // namespace

double hf_energy(const OrthoFrame& frame, const TrappedProblem& pb) {
  require_same_grid(frame.grid(), pb.grid, "hf_energy");
  const LocalHamiltonian h0 = one_body(pb, pb.grid);
  double e = 0.0;
  for (const auto& f : frame.orbitals()) e += h0.expectation(f);
  const Field rho = density(frame.orbitals(), std::vector<double>(frame.rank(), 1.0));
  return e - pb.coupling * hartree_energy(rho, rho, 1.0);
}

TrappedResult minimize_trapped(const TrappedProblem& pb, const std::optional<Block>& start) {
  pb.validate();
  TrappedResult best;
  best.energy = std::numeric_limits<double>::infinity();
  std::vector<double> energies;
  const int runs = start ? 1 : pb.controls.restarts;
  for (int r = 0; r < runs; ++r) {
    Block u;
    if (start) {
      if (start->empty() || static_cast<int>(start->size()) > pb.particles) throw ConfigError("start frame rank must be in [1, N]");
      for (const auto& f : *start) require_same_grid(f.grid(), pb.grid, "minimize_trapped start");
      u = loewdin_orthonormalize(*start).orbitals();
    } else {
      u = start_frame(pb, r);
    }
    TrappedResult res = run_once(pb, std::move(u));
    energies.push_back(res.energy);
    if (res.energy < best.energy) best = std::move(res);
    if (best.unbounded) break;
  }
  best.restart_energies = std::move(energies);
  return best;
}

std::array<double, 3> blowup_center(const Field& rho) {
  const Grid& g = rho.grid();
  const int n = g.points();
  std::array<double, 3> c = density_centroid(rho);
  for (int a = 0; a < 3; ++a) c[a] += g.center()[a];
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<std::pair<double, double>> radial;
    radial.reserve(rho.size());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const double x = g.coordinate(0, i) - c[0], y = g.coordinate(1, j) - c[1], z = g.coordinate(2, k) - c[2];
          const double m = rho[g.flat(i, j, k)].real();
          radial.emplace_back(x * x + y * y + z * z, m);
          total += m;
        }
      }
    }
    std::sort(radial.begin(), radial.end());
    double acc = 0.0, r2 = 0.0;
    for (const auto& [d2, m] : radial) {
      acc += m;
      r2 = d2;
      if (acc >= 0.5 * total) break;
    }
    std::array<double, 3> s{0.0, 0.0, 0.0};
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const double x = g.coordinate(0, i), y = g.coordinate(1, j), z = g.coordinate(2, k);
          const double d2 = (x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]) + (z - c[2]) * (z - c[2]);
          if (d2 > r2) continue;
          const double m = rho[g.flat(i, j, k)].real();
          s[0] += m * x;
          s[1] += m * y;
          s[2] += m * z;
          mass += m;
        }
      }
    }
    if (!(mass > 0.0)) break;
    for (int a = 0; a < 3; ++a) c[a] = s[a] / mass;
  }
  return c;
}

DivergenceReport divergence_probe(const TrappedProblem& pb, const OrthoFrame& gns_frame,
                                  const std::array<double, 3>& x0, double ratio, int j_min, int j_max,
                                  int max_trials) {
  if (!(ratio > 1.0)) throw ConfigError("divergence_probe: ratio must exceed 1");
  DivergenceReport rep;
  const Grid& g0 = gns_frame.grid();
  auto energy_at = [&](double scale) {
    const Grid g = g0.rescaled(1.0 / scale).recentered(x0);
    Block u;
    for (const auto& f : gns_frame.orbitals()) u.push_back((std::pow(scale, 1.5)) * f.reinterpreted(g));
    TrappedProblem local = pb;
    local.grid = g;
    return hf_energy(OrthoFrame::adopt(std::move(u), 1e-6), local);
  };
  rep.energy_at_unit_scale = energy_at(1.0);
  const double floor = -1e3 * std::abs(rep.energy_at_unit_scale);
  for (int j = j_min; rep.trials < max_trials; ++j) {
    const double s = std::pow(ratio, j);
    const double e = j == 0 ? rep.energy_at_unit_scale : energy_at(s);
    rep.trajectory.push_back({s, e});
    ++rep.trials;
    if (e < floor) {
      rep.unbounded = true;
      break;
    }
    if (j >= j_max && e >= rep.trajectory.front().energy) break;
    if (j >= j_max && rep.trajectory.size() > 2 && e > rep.trajectory[rep.trajectory.size() - 2].energy) break;
  }
  std::size_t imin = 0;
  for (std::size_t i = 1; i < rep.trajectory.size(); ++i) {
    if (rep.trajectory[i].energy < rep.trajectory[imin].energy) imin = i;
  }
  rep.min_energy = rep.trajectory[imin].energy;
  rep.min_scale = rep.trajectory[imin].scale;
  rep.interior_minimum = !rep.unbounded && imin > 0 && imin + 1 < rep.trajectory.size();
  return rep;
}

std::vector<SweepRecord> sweep_k(const TrappedProblem& base, const std::vector<double>& ks, const SweepOptions& opt) {
  for (std::size_t i = 1; i < ks.size(); ++i) {
    if (ks[i] < ks[i - 1]) throw ConfigError("sweep couplings must be nondecreasing");
  }
  const int n = base.grid.points();
  const bool predict = opt.k_reference > 0.0 && base.potential.form == PotentialSpec::Form::polynomial_zeros;
  const double p = predict ? base.potential.leading_exponent() : 0.0;
  std::vector<SweepRecord> out;
  std::optional<Block> warm;
  Grid grid = base.grid;
  if (opt.adaptive_box && opt.initial_epsilon > 0.0) {
    grid = make_grid(n * opt.initial_epsilon / opt.cells_per_epsilon, n, base.grid.center());
  }
  std::optional<Block> profile;
  if (opt.profile) {
    if (static_cast<int>(opt.profile->rank()) > base.particles) throw ConfigError("sweep profile exceeds N");
    Block b;
    for (const auto& f : opt.profile->orbitals()) b.push_back(f.grid().points() == n ? f : resample(f, n));
    if (opt.initial_epsilon > 0.0) {
      double t = 0.0;
      for (const auto& f : b) t += kinetic_form(f);
      // A coarse profile sits near the lattice-collapse barrier; spread it to
      // the target resolution first.
      const double cells = 1.0 / (t * b.front().grid().spacing());
      if (cells < opt.cells_per_epsilon / 1.05) {
        for (auto& f : b) f = dilate(f, opt.cells_per_epsilon / cells);
        t = 0.0;
        for (const auto& f : b) t += kinetic_form(f);
      }
      // Pick the first box so that the reinterpreted profile has the expected epsilon.
      grid = make_grid(t * b.front().grid().box_length() * opt.initial_epsilon, n, base.grid.center());
    }
    profile = b;
    warm = std::move(b);
  }
  // A solve counts only when it converged to a state resolved by the grid and
  // well inside the box. On a box only a few epsilon wide, states spread over
  // the whole box have almost no periodic kinetic energy and win on energy.
  auto acceptable = [&](const TrappedResult& r, const Grid& g) {
    if (r.unbounded || !r.converged) return false;
    if (!opt.adaptive_box) return true;
    return r.epsilon >= g.spacing() && r.epsilon <= g.box_length() / 6.0;
  };
  // The box prediction and the warm start follow the last accepted point.
  std::optional<std::size_t> last_ok;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    TrappedProblem pb = base;
    pb.coupling = ks[j];
    if (opt.adaptive_box && last_ok) {
      const auto& prev = out[*last_ok];
      double eps = prev.epsilon;
      if (predict && opt.k_reference > ks[j] && opt.k_reference > prev.coupling) {
        eps *= std::pow((opt.k_reference - ks[j]) / (opt.k_reference - prev.coupling), 1.0 / (p + 1.0));
      }
      grid = make_grid(n * eps / opt.cells_per_epsilon, n, prev.center);
    }
    auto solve = [&](const Grid& g, const std::optional<Block>& start) {
      pb.grid = g;
      std::optional<Block> s;
      if (start) {
        Block moved;
        for (const auto& f : *start) moved.push_back(f.reinterpreted(g));
        s = std::move(moved);
      }
      return minimize_trapped(pb, s);
    };
    TrappedResult res = solve(grid, warm);
    const bool periodic = opt.cold_every > 0 && j % static_cast<std::size_t>(opt.cold_every) == 0;
    if (warm && (periodic || (profile && !acceptable(res, grid)))) {
      // On an adapted box the one-body ground state fills the box, so the
      // cold start there is the profile at the predicted scale.
      TrappedResult cold = solve(grid, opt.adaptive_box ? profile : std::nullopt);
      const bool cold_ok = acceptable(cold, grid), warm_ok = acceptable(res, grid);
      if ((cold_ok && !warm_ok) || (cold_ok == warm_ok && cold.energy < res.energy)) res = std::move(cold);
    }
    // Re-solve on a corrected box when the resolution drifted.
    for (int pass = 0; opt.adaptive_box && pass < 3 && acceptable(res, grid); ++pass) {
      const double cells = res.epsilon / grid.spacing();
      if (std::abs(cells / opt.cells_per_epsilon - 1.0) <= 0.2) break;
      const Field rho = density(res.frame.orbitals(), std::vector<double>(res.rank(), 1.0));
      const Grid next = make_grid(n * res.epsilon / opt.cells_per_epsilon, n, blowup_center(rho));
      TrappedResult again = solve(next, res.frame.orbitals());
      if (!acceptable(again, next)) break;
      res = std::move(again);
      grid = next;
    }
    SweepRecord rec;
    rec.coupling = ks[j];
    rec.energy = res.energy;
    rec.epsilon = res.epsilon;
    rec.rank = res.rank();
    rec.multipliers = res.multipliers;
    rec.center = blowup_center(density(res.frame.orbitals(), std::vector<double>(res.rank(), 1.0)));
    rec.box_length = grid.box_length();
    rec.spacing = grid.spacing();
    rec.converged = acceptable(res, grid);
    rec.aufbau_verified = res.aufbau_verified;
    rec.frame = res.frame;
    if (rec.converged || !opt.adaptive_box) {
      warm = res.frame.orbitals();
      last_ok = j;
    }
    if (opt.on_record) opt.on_record(rec);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace fermigns
