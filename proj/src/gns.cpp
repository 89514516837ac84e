#include "fermigns/gns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fermigns/error.hpp"
#include "fermigns/riesz.hpp"
#include "fermigns/spectral.hpp"

namespace fermigns {

void GnsProblem::validate() const {
  validate_riesz_exponent(alpha);
  if (rank_cap < 1) throw ConfigError("rank_cap must be at least 1");
  if (alpha < 1.0 && !q.is_infinite()) {
    const double qmax = (2.0 - alpha) / (1.0 - alpha);
    if (q.value() > qmax + 1e-12) {
      throw ConfigError("q must not exceed (2 - alpha)/(1 - alpha) = " + std::to_string(qmax));
    }
  }
  if (alpha < 1.0 && q.is_infinite()) {
    throw ConfigError("q = inf is only admissible for alpha >= 1");
  }
  if (controls.restarts < 1) throw ConfigError("restarts must be at least 1");
  if (controls.max_iterations < 1 || controls.sweep_iterations < 1) {
    throw ConfigError("iteration limits must be positive");
  }
  if (!(controls.tolerance > 0.0)) throw ConfigError("tol must be positive");
}

double gns_ratio(const DensityOperator& gamma, double alpha, const SchattenIndex& q) {
  validate_riesz_exponent(alpha);
  if (!(gamma.trace() > 0.0)) throw DegenerateInputError("gns_ratio of the zero operator");
  const Field rho = density(gamma);
  const double d = hartree_energy(rho, rho, alpha);
  if (!(d > 0.0)) throw DegenerateInputError("zero interaction energy");
  const double s = schatten_norm(gamma, q);
  const double t = trace_kinetic(gamma);
  return std::pow(s, (2.0 - alpha) / alpha) * t / std::pow(d, 1.0 / alpha);
}

Field mean_field_operator_apply(const DensityOperator& gamma, double alpha, const Field& v) {
  Field out = apply_fractional_kinetic(v);
  if (gamma.trace() == 0.0) return out;
  const Field w = riesz_convolve(density(gamma), alpha);
  const double c = 2.0 / alpha;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * w[i].real() * v[i];
  return out;
}

WeightUpdate weight_update(const std::vector<double>& mu, double alpha, const SchattenIndex& q) {
  validate_riesz_exponent(alpha);
  WeightUpdate out;
  out.weights.assign(mu.size(), 0.0);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] >= -1e-10) {
      out.drop.push_back(i);
    } else {
      keep.push_back(i);
    }
  }
  if (keep.empty()) return out;
  const double lead = (2.0 - alpha) / alpha;
  // q = 1 has no closed form; uniform weights are used there, as for q = inf.
  if (q.is_infinite() || q.value() == 1.0) {
    double s = 0.0;
    for (auto i : keep) s += std::abs(mu[i]);
    for (auto i : keep) out.weights[i] = lead / s;
    return out;
  }
  const double qq = q.value();
  double s = 0.0;
  for (auto i : keep) s += std::pow(std::abs(mu[i]), qq / (qq - 1.0));
  for (auto i : keep) out.weights[i] = lead / s * std::pow(std::abs(mu[i]), 1.0 / (qq - 1.0));
  return out;
}

DensityOperator normalize_virial(const DensityOperator& gamma, double alpha) {
  const double t = trace_kinetic(gamma);
  const Field rho = density(gamma);
  const double d = hartree_energy(rho, rho, alpha);
  if (!(d > 0.0)) throw DegenerateInputError("zero interaction energy");
  DensityOperator out = gamma;
  for (auto& k : out.weights) k *= t / d;
  return out;
}

ElReport euler_lagrange(const DensityOperator& gamma_in, double alpha) {
  ElReport rep;
  DensityOperator gamma = normalize_virial(gamma_in, alpha);
  const Field w = riesz_convolve(density(gamma), alpha);
  const double c = 2.0 / alpha;
  auto apply_h = [&](const Field& v) {
    Field out = apply_fractional_kinetic(v);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * w[i].real() * v[i];
    return out;
  };
  Block u = gamma.frame.orbitals();
  Block hu;
  for (const auto& f : u) hu.push_back(apply_h(f));
  const std::size_t r = u.size();
  // Rotate within clusters of equal weight to the Ritz basis of H.
  std::vector<bool> done(r, false);
  for (std::size_t i = 0; i < r; ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> cluster;
    for (std::size_t j = i; j < r; ++j) {
      if (!done[j] && std::abs(gamma.weights[j] - gamma.weights[i]) <= 1e-9 * std::abs(gamma.weights[i])) {
        cluster.push_back(j);
        done[j] = true;
      }
    }
    if (cluster.size() < 2) continue;
    Block cu, chu;
    for (auto j : cluster) {
      cu.push_back(u[j]);
      chu.push_back(hu[j]);
    }
    Eigen::MatrixXcd m = gram(cu, chu);
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const Block ru = combine(cu, es.eigenvectors());
    const Block rhu = combine(chu, es.eigenvectors());
    for (std::size_t a = 0; a < cluster.size(); ++a) {
      u[cluster[a]] = ru[a];
      hu[cluster[a]] = rhu[a];
    }
  }
  for (std::size_t i = 0; i < r; ++i) {
    const double mu = inner(u[i], hu[i]).real();
    Field res = hu[i];
    axpy(-mu, u[i], res);
    rep.multipliers.push_back(mu);
    rep.residuals.push_back(norm(res));
    for (std::size_t j = 0; j < r; ++j) {
      if (j != i) rep.max_offdiagonal = std::max(rep.max_offdiagonal, std::abs(inner(u[j], hu[i])));
    }
  }
  // Order by multiplier.
  std::vector<std::size_t> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rep.multipliers[a] < rep.multipliers[b]; });
  Block su;
  std::vector<double> sk, smu, sres;
  for (auto i : order) {
    su.push_back(u[i]);
    sk.push_back(gamma.weights[i]);
    smu.push_back(rep.multipliers[i]);
    sres.push_back(rep.residuals[i]);
  }
  rep.gamma = DensityOperator(OrthoFrame::adopt(std::move(su), 1e-7), std::move(sk));
  rep.multipliers = std::move(smu);
  rep.residuals = std::move(sres);
  return rep;
}

namespace {

double log_ratio_outer(double alpha, const SchattenIndex& q, const std::vector<double>& k,
                       const std::vector<double>& qv, double d, std::vector<double>& dq, double& dd) {
  double t = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) t += k[i] * qv[i];
  for (std::size_t i = 0; i < k.size(); ++i) dq[i] = k[i] / t;
  dd = -1.0 / (alpha * d);
  return (2.0 - alpha) / alpha * std::log(schatten_norm(k, q)) + std::log(t) - std::log(d) / alpha;
}

FrameObjective gns_objective(const GnsProblem& pb, const Grid& grid, std::vector<double> k) {
  FrameObjective obj;
  obj.quadratic = LocalHamiltonian{grid, {}, {}};
  obj.weights = std::move(k);
  obj.alpha = pb.alpha;
  const double alpha = pb.alpha;
  const SchattenIndex q = pb.q;
  const std::vector<double> weights = obj.weights;
  obj.outer = [alpha, q, weights](const std::vector<double>& qv, double d, std::vector<double>& dq, double& dd) {
    return log_ratio_outer(alpha, q, weights, qv, d, dq, dd);
  };
  return obj;
}

/// Ratio of a fixed frame as a function of the weights, from the kinetic
/// forms t_i and the pair interactions d_ij.
struct ReducedWeights {
  double alpha;
  SchattenIndex q;
  std::vector<double> t;
  Eigen::MatrixXd d;

  double ratio(const std::vector<double>& k) const {
    double tk = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) tk += k[i] * t[i];
    const Eigen::Map<const Eigen::VectorXd> kv(k.data(), static_cast<Eigen::Index>(k.size()));
    const double dk = kv.dot(d * kv);
    return std::pow(schatten_norm(k, q), (2.0 - alpha) / alpha) * tk / std::pow(dk, 1.0 / alpha);
  }

  std::vector<double> multipliers(const std::vector<double>& k) const {
    double tk = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) tk += k[i] * t[i];
    const Eigen::Map<const Eigen::VectorXd> kv(k.data(), static_cast<Eigen::Index>(k.size()));
    const Eigen::VectorXd dk = d * kv;
    const double scale = tk / kv.dot(dk);
    std::vector<double> mu(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) mu[i] = t[i] - 2.0 / alpha * scale * dk(static_cast<Eigen::Index>(i));
    return mu;
  }
};

ReducedWeights reduce(const Block& u, double alpha, const SchattenIndex& q) {
  ReducedWeights rw{alpha, q, {}, {}};
  const auto r = static_cast<Eigen::Index>(u.size());
  rw.d.resize(r, r);
  std::vector<Field> dens, pots;
  for (const auto& f : u) {
    rw.t.push_back(kinetic_form(f));
    Field rho(f.grid(), FieldTag::density);
    for (std::size_t p = 0; p < f.size(); ++p) rho[p] = std::norm(f[p]);
    pots.push_back(riesz_convolve(rho, alpha));
    dens.push_back(std::move(rho));
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      double acc = 0.0;
      const auto& w = pots[static_cast<std::size_t>(i)];
      const auto& rho = dens[static_cast<std::size_t>(j)];
      for (std::size_t p = 0; p < w.size(); ++p) acc += w[p].real() * rho[p].real();
      rw.d(i, j) = acc * u.front().grid().cell_volume();
    }
  }
  rw.d = 0.5 * (rw.d + rw.d.transpose()).eval();
  return rw;
}

/// Damped fixed-point iteration of weight_update on the reduced model. Never
/// returns weights with a larger ratio than `k`.
std::vector<double> weight_step(const ReducedWeights& rw, std::vector<double> k) {
  double best = rw.ratio(k);
  for (int it = 0; it < 400; ++it) {
    const auto upd = weight_update(rw.multipliers(k), rw.alpha, rw.q);
    if (!upd.drop.empty()) break;
    std::vector<double> cand = upd.weights;
    const double s0 = std::accumulate(k.begin(), k.end(), 0.0);
    const double s1 = std::accumulate(cand.begin(), cand.end(), 0.0);
    for (auto& v : cand) v *= s0 / s1;
    double theta = 1.0;
    bool moved = false;
    for (int b = 0; b < 30; ++b) {
      std::vector<double> trial(k.size());
      for (std::size_t i = 0; i < k.size(); ++i) trial[i] = std::pow(k[i], 1.0 - theta) * std::pow(cand[i], theta);
      const double r = rw.ratio(trial);
      if (r <= best) {
        double change = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) change = std::max(change, std::abs(trial[i] - k[i]) / k[i]);
        k = trial;
        best = r;
        moved = change > 1e-13;
        break;
      }
      theta *= 0.5;
    }
    if (!moved) break;
  }
  return k;
}

Block initial_frame(const Grid& grid, int rank, std::uint64_t seed, double width) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Block out;
  const auto& c0 = grid.center();
  for (int j = 0; j < rank; ++j) {
    struct Bump {
      double c[3], w, a, tilt[3];
    };
    std::vector<Bump> bumps(2);
    for (auto& b : bumps) {
      for (int a = 0; a < 3; ++a) b.c[a] = c0[a] + 0.5 * width * nd(rng);
      b.w = width * (0.8 + 0.4 * ud(rng));
      b.a = 0.5 + 0.5 * ud(rng);
      for (auto& t : b.tilt) t = nd(rng) / width;
    }
    out.push_back(Field::sample(grid, [&](double x, double y, double z) {
      double v = 0.0;
      for (const auto& b : bumps) {
        const double dx = x - b.c[0], dy = y - b.c[1], dz = z - b.c[2];
        const double e = std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * b.w * b.w));
        v += b.a * e * (1.0 + (j > 0 ? 1.0 : 0.2) * (b.tilt[0] * dx + b.tilt[1] * dy + b.tilt[2] * dz));
      }
      return cplx(v, 0.0);
    }, FieldTag::orbital));
  }
  return loewdin_orthonormalize(std::move(out)).orbitals();
}

struct RestartOutcome {
  DensityOperator gamma;
  ElReport el;
  double ratio = std::numeric_limits<double>::infinity();
  bool converged = false;
};

/// Derivative of f along the dilation u -> e^{-3 tau/2} u(e^{-tau} x), taken
/// at a point that is stationary for fixed S = sum_i k_i q_i. There the
/// tangent gradient is c grad S, and S scales like e^{-tau}, so the slope is
/// -c S. This avoids the commutator error of x . grad on the lattice.
double dilation_slope(const FrameObjective& obj, const FramePoint& p) {
  const Block pg = project_tangent(p.u, frame_gradient(obj, p));
  Block gs;
  double s = 0.0;
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    gs.push_back((2.0 * obj.weights[i]) * p.au[i]);
    s += obj.weights[i] * p.q[i];
  }
  gs = project_tangent(p.u, gs);
  const double c = block_inner(gs, pg) / block_inner(gs, gs);
  return -c * s;
}

RestartOutcome run_restart(const GnsProblem& pb, Block u, std::vector<double> k, int restart,
                           std::vector<GnsLogEntry>& log) {
  const auto& ctl = pb.controls;
  const bool equal_weights = pb.q.is_infinite() || pb.q.value() == 1.0;
  RestartOutcome out;
  auto emit = [&](GnsLogEntry e) {
    if (ctl.on_log) ctl.on_log(e);
    log.push_back(std::move(e));
  };
  int used = 0;
  std::vector<double> last_k;
  // Scale search: the discrete ratio is not exactly dilation invariant, and
  // its critical point is a maximum along the dilation orbit. The shape is
  // relaxed at fixed kinetic scale and the scale is moved by secant steps on
  // the dilation derivative.
  double tau = 0.0;
  std::vector<std::pair<double, double>> slopes;
  double curvature = 0.0;
  // Shape relaxation is only as tight as the current scale error warrants.
  double shape_tolerance = std::max(1e-4, 0.3 * ctl.tolerance);
  while (true) {
    FrameObjective obj = gns_objective(pb, u.front().grid(), k);
    obj.fix_scale = true;
    DescentControls dc;
    dc.max_iterations = std::min(ctl.sweep_iterations, std::max(1, ctl.max_iterations - used));
    dc.tolerance = shape_tolerance;
    dc.recenter = true;
    const auto desc = minimize_frame(obj, std::move(u), dc);
    used += std::max(1, desc.iterations);
    for (const auto& s : desc.log) {
      if (s.iteration % 10 == 0 || !s.event.empty()) {
        emit({restart, used - desc.iterations + s.iteration, std::exp(s.f), s.residual, s.event});
      }
    }
    u = desc.point.u;
    if (!equal_weights && u.size() > 1) {
      const auto rw = reduce(u, pb.alpha, pb.q);
      k = weight_step(rw, k);
    }
    DensityOperator gamma(OrthoFrame::adopt(u, 1e-7), k);
    out.el = euler_lagrange(gamma, pb.alpha);
    out.gamma = out.el.gamma;
    k = out.gamma.weights;
    u = out.gamma.frame.orbitals();

    // Rank step: orbitals that are not bound are removed.
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (out.el.multipliers[i] < -1e-6) keep.push_back(i);
    }
    if (keep.empty()) throw DegenerateInputError("every multiplier became nonnegative");
    if (keep.size() < u.size()) {
      Block ku;
      std::vector<double> kk;
      for (auto i : keep) {
        ku.push_back(u[i]);
        kk.push_back(k[i]);
      }
      emit({restart, used, 0.0, 0.0, "rank drop to " + std::to_string(keep.size())});
      u = std::move(ku);
      k = std::move(kk);
      last_k.clear();
      slopes.clear();
      curvature = 0.0;
      if (used >= ctl.max_iterations) break;
      continue;
    }
    const double worst = *std::max_element(out.el.residuals.begin(), out.el.residuals.end());
    double kchange = last_k.size() == k.size() ? 0.0 : 1.0;
    if (last_k.size() == k.size()) {
      const double s0 = std::accumulate(last_k.begin(), last_k.end(), 0.0);
      const double s1 = std::accumulate(k.begin(), k.end(), 0.0);
      for (std::size_t i = 0; i < k.size(); ++i) kchange = std::max(kchange, std::abs(k[i] / s1 - last_k[i] / s0));
    }
    last_k = k;
    shape_tolerance = std::clamp(0.1 * worst, 0.3 * ctl.tolerance, std::max(1e-4, 0.3 * ctl.tolerance));
    emit({restart, used, gns_ratio(out.gamma, pb.alpha, pb.q), worst, "sweep"});
    if (worst <= ctl.tolerance && (equal_weights || u.size() == 1 || kchange < 1e-7)) {
      out.converged = true;
      break;
    }
    if (used >= ctl.max_iterations) break;

    const FrameObjective here = gns_objective(pb, u.front().grid(), k);
    const double g = dilation_slope(here, evaluate_frame(here, u));
    if (!slopes.empty()) {
      const auto [t0, g0] = slopes.back();
      if (std::abs(tau - t0) > 1e-3) {
        const double c = (g - g0) / (tau - t0);
        if (c < 0.0 && std::isfinite(c)) curvature = c;
      }
    }
    slopes.emplace_back(tau, g);
    double step = curvature < 0.0 ? -g / curvature : 0.1 * (g > 0.0 ? 1.0 : -1.0);
    step = std::clamp(step, -0.3, 0.3);
    if (std::abs(step) > 1e-12) {
      Block moved;
      for (const auto& f : u) moved.push_back(dilate(f, std::exp(step)));
      u = loewdin_orthonormalize(std::move(moved)).orbitals();
      tau += step;
      emit({restart, used, 0.0, g, "dilate " + std::to_string(step)});
    }
  }
  out.ratio = gns_ratio(out.gamma, pb.alpha, pb.q);
  return out;
}

}  // namespace

GnsResult optimize_gns(const GnsProblem& pb, const std::optional<DensityOperator>& start) {
  pb.validate();
  GnsResult res;
  RestartOutcome best;
  const int runs = start ? 1 : pb.controls.restarts;
  for (int r = 0; r < runs; ++r) {
    Block u;
    std::vector<double> k;
    if (start) {
      require_same_grid(start->grid(), pb.grid, "optimize_gns start");
      u = start->frame.orbitals();
      k = start->weights;
      if (static_cast<int>(u.size()) > pb.rank_cap) throw ConfigError("start operator exceeds rank_cap");
    } else {
      const double width = pb.controls.init_width > 0.0 ? pb.controls.init_width : 2.5 * pb.grid.spacing();
      u = initial_frame(pb.grid, pb.rank_cap, pb.controls.seed * 1000003ULL + static_cast<std::uint64_t>(r), width);
      k.assign(u.size(), 1.0);
    }
    RestartOutcome o;
    try {
      o = run_restart(pb, std::move(u), std::move(k), r, res.log);
    } catch (const DegenerateInputError& e) {
      res.log.push_back({r, 0, 0.0, 0.0, std::string("restart abandoned: ") + e.what()});
      res.restart_ratios.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    res.restart_ratios.push_back(o.ratio);
    if (o.ratio < best.ratio) best = std::move(o);
  }
  if (!std::isfinite(best.ratio)) throw DegenerateInputError("every restart collapsed");
  res.optimizer = best.gamma;
  res.multipliers = best.el.multipliers;
  res.residuals = best.el.residuals;
  res.rank = best.gamma.rank();
  res.converged = best.converged;
  res.k_est = gns_ratio(res.optimizer, pb.alpha, pb.q);
  for (const auto& u : res.optimizer.frame.orbitals()) res.max_imag = std::max(res.max_imag, u.max_abs_imag());
  return res;
}

MonotonicityReport monotonicity_check(const GnsResult& rank_n, const GnsResult& rank_2n, double tolerance) {
  MonotonicityReport rep;
  rep.k_n = rank_n.k_est;
  rep.k_2n = rank_2n.k_est;
  rep.gap = rep.k_n - rep.k_2n;
  rep.weak_holds = rep.k_2n <= rep.k_n + tolerance;
  rep.strict_gap = rep.gap > tolerance;
  return rep;
}

}  // namespace fermigns
