#include "fermigns/frame_descent.hpp"

#include <algorithm>
#include <cmath>

#include "fermigns/error.hpp"
#include "fermigns/riesz.hpp"
#include "fermigns/spectral.hpp"
#include "fermigns/state.hpp"

namespace fermigns {

namespace {

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

/// Fills rho, w, d, f and the partials from u and q.
void finish_point(const FrameObjective& obj, FramePoint& p) {
  p.rho = density(p.u, obj.weights);
  p.w = riesz_convolve(p.rho, obj.alpha);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.rho.size(); ++i) acc += p.w[i].real() * p.rho[i].real();
  p.d = acc * p.rho.grid().cell_volume();
  if (!(p.d > 0.0)) throw DegenerateInputError("interaction energy vanished");
  p.dq.assign(p.q.size(), 0.0);
  p.f = obj.outer(p.q, p.d, p.dq, p.dd);
}

}  // namespace

FramePoint evaluate_frame(const FrameObjective& obj, Block u) {
  FramePoint p;
  p.u = std::move(u);
  for (const auto& f : p.u) {
    p.au.push_back(obj.quadratic.apply(f));
    p.q.push_back(inner(f, p.au.back()).real());
  }
  finish_point(obj, p);
  return p;
}

Block frame_gradient(const FrameObjective& obj, const FramePoint& p) {
  Block g;
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    Field gi = (2.0 * p.dq[i]) * p.au[i];
    const double c = 4.0 * p.dd * obj.weights[i];
    auto gv = gi.values();
    const auto uv = p.u[i].values();
    for (std::size_t x = 0; x < gv.size(); ++x) gv[x] += c * p.w[x].real() * uv[x];
    g.push_back(std::move(gi));
  }
  return g;
}

Block project_tangent(const Block& u, const Block& g) {
  const Eigen::MatrixXcd s = hermitian_part(gram(u, g));
  Block out = g;
  add_combination(out, u, -s);
  return out;
}

double scaled_gradient_residual(const FramePoint& p, const Block& projected) {
  double worst = 0.0;
  for (std::size_t i = 0; i < projected.size(); ++i) {
    if (p.dq[i] == 0.0) continue;
    worst = std::max(worst, norm(projected[i]) / (2.0 * std::abs(p.dq[i])));
  }
  return worst;
}

std::array<double, 3> density_centroid(const Field& rho) {
  const Grid& g = rho.grid();
  const int n = g.points();
  std::array<double, 3> m{0, 0, 0};
  double mass = 0.0;
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const double r = rho[g.flat(ix, iy, iz)].real();
        mass += r;
        m[0] += r * (g.coordinate(0, ix) - g.center()[0]);
        m[1] += r * (g.coordinate(1, iy) - g.center()[1]);
        m[2] += r * (g.coordinate(2, iz) - g.center()[2]);
      }
  if (mass > 0.0) {
    for (auto& v : m) v /= mass;
  }
  return m;
}

namespace {

struct Preconditioner {
  const LocalHamiltonian* h;
  double shift;
  std::vector<double> scale;  ///< per column

  Block apply(const Block& g) const {
    Block out;
    for (std::size_t i = 0; i < g.size(); ++i) {
      Field z = h->precondition(g[i], shift);
      z *= scale[i];
      out.push_back(std::move(z));
    }
    return out;
  }
};

Preconditioner make_preconditioner(const FrameObjective& obj, const FramePoint& p, const Block& g) {
  Preconditioner m{&obj.quadratic, 0.0, {}};
  // One-body eigenvalue estimates lambda_i = <u_i, G_i> / (2 dF/dq_i).
  double lowest = 0.0, largest = 0.0;
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    const double c = 2.0 * p.dq[i];
    const double lam = c != 0.0 ? inner(p.u[i], g[i]).real() / c : 0.0;
    lowest = std::min(lowest, lam);
    largest = std::max(largest, std::abs(lam));
    m.scale.push_back(c != 0.0 ? 1.0 / std::abs(c) : 0.0);
  }
  m.shift = -lowest + 0.2 * largest + 1e-8;
  return m;
}

/// Line-search geometry along U + t D followed by Loewdin: every quadratic
/// form follows from small matrices, only the density needs the grid.
struct SearchLine {
  const FramePoint* p;
  Block dir;
  Block adir;
  Eigen::MatrixXcd uau, uad, dad, dd;

  SearchLine(const FrameObjective& obj, const FramePoint& point, Block d) : p(&point), dir(std::move(d)) {
    for (const auto& f : dir) adir.push_back(obj.quadratic.apply(f));
    uau = gram(p->u, p->au);
    uad = gram(p->u, adir);
    dad = gram(dir, adir);
    dd = gram(dir);
  }

  FramePoint at(const FrameObjective& obj, double t) const {
    const auto r = static_cast<Eigen::Index>(dir.size());
    const Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(r, r) + t * t * dd + t * hermitian_part(gram(p->u, dir)) * 2.0;
    const Eigen::MatrixXcd c = inverse_sqrt_gram(hermitian_part(s));
    const Eigen::MatrixXcd m = uau + t * (uad + uad.adjoint()) + t * t * dad;
    const Eigen::MatrixXcd qm = c.adjoint() * m * c;
    FramePoint out;
    Block raw = p->u;
    block_axpy(t, dir, raw);
    out.u = combine(raw, c);
    Block araw = p->au;
    block_axpy(t, adir, araw);
    out.au = combine(araw, c);
    for (Eigen::Index i = 0; i < r; ++i) out.q.push_back(qm(i, i).real());
    finish_point(obj, out);
    return out;
  }
};

}  // namespace

namespace {

/// Tangent gradient of sum_i k_i <u_i, A u_i>.
Block scale_gradient(const FrameObjective& obj, const FramePoint& p) {
  Block g;
  for (std::size_t i = 0; i < p.u.size(); ++i) g.push_back((2.0 * obj.weights[i]) * p.au[i]);
  return project_tangent(p.u, g);
}

/// Removes the component of `v` along `c` (Euclidean).
void remove_component(Block& v, const Block& c) {
  const double cc = block_inner(c, c);
  if (cc > 0.0) block_axpy(-block_inner(c, v) / cc, c, v);
}

}  // namespace

DescentResult minimize_frame(const FrameObjective& obj, Block start, const DescentControls& controls) {
  if (obj.weights.size() != start.size()) throw InputError("one weight per orbital is required");
  DescentResult res;
  FramePoint p = evaluate_frame(obj, loewdin_orthonormalize(std::move(start)).orbitals());
  ++res.evaluations;
  Block g = frame_gradient(obj, p);
  Block pg = project_tangent(p.u, g);
  Block cs;
  if (obj.fix_scale) {
    cs = scale_gradient(obj, p);
    remove_component(pg, cs);
  }
  double residual = scaled_gradient_residual(p, pg);
  Block z_old, pg_old, dir_old;
  double t_prev = 0.5;
  const double h = p.rho.grid().spacing();

  for (int it = 0;; ++it) {
    res.iterations = it;
    if (residual <= controls.tolerance) {
      res.converged = true;
      break;
    }
    if (it >= controls.max_iterations) break;

    const Preconditioner m = make_preconditioner(obj, p, g);
    const Block z = project_tangent(p.u, m.apply(pg));
    Block dir;
    double beta = 0.0;
    if (!z_old.empty()) {
      const Block zt = project_tangent(p.u, z_old);
      const Block dt = project_tangent(p.u, dir_old);
      Block diff = z;
      block_axpy(-1.0, zt, diff);
      const double den = block_inner(pg_old, z_old);
      beta = den > 0.0 ? std::max(0.0, block_inner(pg, diff) / den) : 0.0;
      dir = z;
      for (auto& f : dir) f *= -1.0;
      block_axpy(beta, dt, dir);
    } else {
      dir = z;
      for (auto& f : dir) f *= -1.0;
    }
    Block mcs;
    if (obj.fix_scale) {
      mcs = project_tangent(p.u, m.apply(cs));
      const double den = block_inner(cs, mcs);
      if (den > 0.0) block_axpy(-block_inner(cs, dir) / den, mcs, dir);
    }
    double slope = block_inner(g, dir);
    if (!(slope < 0.0)) {
      dir = z;
      for (auto& f : dir) f *= -1.0;
      if (obj.fix_scale) {
        const double den = block_inner(cs, mcs);
        if (den > 0.0) block_axpy(-block_inner(cs, dir) / den, mcs, dir);
      }
      slope = block_inner(g, dir);
      beta = 0.0;
    }
    if (!(slope < 0.0)) break;

    const SearchLine line(obj, p, dir);
    double t = std::min(4.0, 2.0 * t_prev);
    FramePoint trial;
    bool accepted = false;
    const double slack = controls.noise * std::max(1.0, std::abs(p.f));
    for (int ls = 0; ls < 30; ++ls) {
      trial = line.at(obj, t);
      ++res.evaluations;
      if (trial.f <= p.f + controls.armijo * t * slope + slack) {
        accepted = true;
        break;
      }
      const double denom = 2.0 * (trial.f - p.f - slope * t);
      double t_new = denom > 0.0 ? -slope * t * t / denom : 0.5 * t;
      t = std::clamp(t_new, 0.1 * t, 0.5 * t);
    }
    if (!accepted) {
      res.log.push_back({it, p.f, residual, 0.0, "line search failed"});
      if (z_old.empty()) break;
      z_old.clear();
      continue;
    }
    t_prev = t;
    p = std::move(trial);
    std::string event;
    if (controls.refresh_every > 0 && it % controls.refresh_every == controls.refresh_every - 1) {
      p = evaluate_frame(obj, loewdin_orthonormalize(std::move(p.u)).orbitals());
      ++res.evaluations;
      event = "refresh";
    }
    bool reset = false;
    if (controls.recenter) {
      const auto c = density_centroid(p.rho);
      if (std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]) > 0.25 * h) {
        Block moved;
        for (const auto& f : p.u) moved.push_back(translate(f, {-c[0], -c[1], -c[2]}));
        p = evaluate_frame(obj, loewdin_orthonormalize(std::move(moved)).orbitals());
        ++res.evaluations;
        event = "recenter";
        reset = true;
      }
    }
    g = frame_gradient(obj, p);
    pg_old = std::move(pg);
    pg = project_tangent(p.u, g);
    if (obj.fix_scale) {
      cs = scale_gradient(obj, p);
      remove_component(pg, cs);
    }
    residual = scaled_gradient_residual(p, pg);
    res.log.push_back({it, p.f, residual, t, event});
    if (reset) {
      z_old.clear();
      dir_old.clear();
    } else {
      z_old = z;
      dir_old = std::move(dir);
    }
  }
  res.residual = residual;
  res.point = std::move(p);
  return res;
}

}  // namespace fermigns
