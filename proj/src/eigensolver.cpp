#include "fermigns/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fermigns/error.hpp"
#include "fermigns/spectral.hpp"
#include "fermigns/state.hpp"

namespace fermigns {

Field LocalHamiltonian::apply(const Field& u) const {
  Field out = apply_fractional_kinetic(u, kinetic);
  if (!potential.empty()) {
    auto o = out.values();
    const auto v = u.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += potential[i] * v[i];
  }
  return out;
}

Field LocalHamiltonian::precondition(const Field& r, double shift) const {
  return apply_radial_multiplier(r, [&](double xi2) { return 1.0 / (kinetic.symbol(std::sqrt(xi2)) + shift); });
}

double LocalHamiltonian::expectation(const Field& u) const { return inner(u, apply(u)).real(); }

Block smooth_start_block(const Grid& grid, int count, std::uint64_t seed, double width) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto& c = grid.center();
  Block out;
  for (int j = 0; j < count; ++j) {
    const int kind = j % 10;
    const double s = width * (1.0 + 0.25 * (j / 10));
    const double a = 0.05 * noise(rng), b = 0.05 * noise(rng), d = 0.05 * noise(rng);
    out.push_back(Field::sample(grid, [&](double x, double y, double z) {
      x -= c[0];
      y -= c[1];
      z -= c[2];
      const double g = std::exp(-(x * x + y * y + z * z) / (2.0 * s * s));
      double p = 1.0;
      switch (kind) {
        case 1: p = z; break;
        case 2: p = x; break;
        case 3: p = y; break;
        case 4: p = x * y; break;
        case 5: p = y * z; break;
        case 6: p = z * x; break;
        case 7: p = x * x - y * y; break;
        case 8: p = 2 * z * z - x * x - y * y; break;
        case 9: p = (x * x + y * y + z * z) - 1.5 * s * s; break;
        default: break;
      }
      return cplx(g * (p + a * x + b * y + d * z), 0.0);
    }, FieldTag::orbital));
  }
  return out;
}

namespace {

void project_out(Field& w, const Block& basis) {
  for (const auto& d : basis) axpy(-inner(d, w), d, w);
}

}  // namespace

EigenResult lowest_eigenpairs(const LocalHamiltonian& h, int count, const EigenControls& controls,
                              const Block& guess, const Block& deflate) {
  if (count < 1) throw ConfigError("eigenpair count must be positive");
  const int b = count + std::max(0, controls.guard_vectors);
  if (static_cast<std::size_t>(b) + deflate.size() >= h.grid.size()) {
    throw ConfigError("requested more eigenpairs than grid points");
  }
  Block x;
  for (int j = 0; j < b && j < static_cast<int>(guess.size()); ++j) x.push_back(guess[static_cast<std::size_t>(j)]);
  if (static_cast<int>(x.size()) < b) {
    auto extra = smooth_start_block(h.grid, b, controls.seed, h.grid.box_length() / 10.0);
    for (std::size_t j = x.size(); j < static_cast<std::size_t>(b); ++j) x.push_back(extra[j]);
  }
  for (auto& f : x) project_out(f, deflate);
  x = loewdin_orthonormalize(std::move(x)).orbitals();

  Block hx;
  for (const auto& f : x) hx.push_back(h.apply(f));
  Block p, hp;
  EigenResult res;
  std::vector<double> theta(static_cast<std::size_t>(b));
  std::vector<double> rnorm(static_cast<std::size_t>(b));

  // Initial Rayleigh-Ritz on X alone.
  {
    Eigen::MatrixXcd a = gram(x, hx);
    a = 0.5 * (a + a.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    x = combine(x, es.eigenvectors());
    hx = combine(hx, es.eigenvectors());
  }

  for (int it = 0; it <= controls.max_iterations; ++it) {
    res.iterations = it;
    Block r;
    std::vector<int> active;
    for (int j = 0; j < b; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      theta[uj] = inner(x[uj], hx[uj]).real();
      Field rj = hx[uj];
      axpy(-theta[uj], x[uj], rj);
      rnorm[uj] = norm(rj);
      if (rnorm[uj] > controls.tolerance) {
        active.push_back(j);
        r.push_back(std::move(rj));
      }
    }
    const bool done = std::none_of(active.begin(), active.end(), [count](int j) { return j < count; });
    if (done || it == controls.max_iterations) {
      res.converged = done;
      break;
    }
    const double shift = std::max(0.05, -theta.front());
    Block w, hw;
    for (auto& rj : r) {
      Field wj = h.precondition(rj, shift);
      project_out(wj, deflate);
      const double nw = norm(wj);
      if (nw > 0.0) wj *= 1.0 / nw;
      hw.push_back(h.apply(wj));
      w.push_back(std::move(wj));
    }
    // Basis [X, W, P] with unit-norm columns.
    Block s = x, hs = hx;
    for (std::size_t j = 0; j < w.size(); ++j) {
      s.push_back(w[j]);
      hs.push_back(hw[j]);
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double np = norm(p[j]);
      if (np == 0.0) continue;
      s.push_back((1.0 / np) * p[j]);
      hs.push_back((1.0 / np) * hp[j]);
    }
    Eigen::MatrixXcd m = gram(s);
    Eigen::MatrixXcd a = gram(s, hs);
    a = 0.5 * (a + a.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ms(m);
    const double top = ms.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < ms.eigenvalues().size(); ++i) {
      if (ms.eigenvalues()(i) > 1e-10 * top) keep.push_back(i);
    }
    Eigen::MatrixXcd q(m.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
      q.col(static_cast<Eigen::Index>(i)) =
          ms.eigenvectors().col(keep[i]) / std::sqrt(ms.eigenvalues()(keep[i]));
    }
    if (q.cols() < b) throw Error("LOBPCG basis collapsed below the block size");
    Eigen::MatrixXcd ar = q.adjoint() * a * q;
    ar = 0.5 * (ar + ar.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ar);
    const Eigen::MatrixXcd y = q * es.eigenvectors().leftCols(b);
    // New search directions: the part of the update outside X.
    const Eigen::Index nx = b;
    Eigen::MatrixXcd yrest = y.bottomRows(y.rows() - nx);
    Block rest(s.begin() + nx, s.end());
    Block hrest(hs.begin() + nx, hs.end());
    p = combine(rest, yrest);
    hp = combine(hrest, yrest);
    x = combine(s, y);
    hx = combine(hs, y);
    // Refresh H X exactly now and then to stop drift in the recurrences.
    if (it % 20 == 19) {
      x = loewdin_orthonormalize(std::move(x)).orbitals();
      for (std::size_t j = 0; j < x.size(); ++j) hx[j] = h.apply(x[j]);
    }
  }

  // Final exact residuals for the requested pairs.
  for (int j = 0; j < count; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    Field hu = h.apply(x[uj]);
    const double lam = inner(x[uj], hu).real();
    axpy(-lam, x[uj], hu);
    res.values.push_back(lam);
    res.residuals.push_back(norm(hu));
    res.vectors.push_back(x[uj]);
  }
  res.converged = res.converged &&
                  std::all_of(res.residuals.begin(), res.residuals.end(),
                              [&](double r) { return r <= controls.tolerance * 1.5; });
  return res;
}

}  // namespace fermigns
