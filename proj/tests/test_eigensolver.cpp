#include "doctest.h"

#include <cmath>

#include "fermigns/eigensolver.hpp"
#include "fermigns/state.hpp"

using namespace fermigns;

namespace {

LocalHamiltonian well(const Grid& g, double depth, double width, KineticSpec spec = {}) {
  LocalHamiltonian h{g, spec, {}};
  h.potential.resize(g.size());
  const int n = g.points();
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy)
      for (int iz = 0; iz < n; ++iz) {
        const double x = g.coordinate(0, ix), y = g.coordinate(1, iy), z = g.coordinate(2, iz);
        h.potential[g.flat(ix, iy, iz)] = -depth * std::exp(-(x * x + 0.8 * y * y + 1.3 * z * z) / (width * width));
      }
  return h;
}

/// Dense diagonalization of the same discrete operator, built column by column.
Eigen::VectorXd dense_spectrum(const LocalHamiltonian& h) {
  const auto size = static_cast<Eigen::Index>(h.grid.size());
  Eigen::MatrixXcd m(size, size);
  for (Eigen::Index j = 0; j < size; ++j) {
    Field e(h.grid);
    e[static_cast<std::size_t>(j)] = 1.0;
    const Field he = h.apply(e);
    for (Eigen::Index i = 0; i < size; ++i) m(i, j) = he[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("LOBPCG agrees with dense diagonalization on a small grid") {
  const Grid g = make_grid(6, 8);
  const auto h = well(g, 3.0, 1.2);
  const auto dense = dense_spectrum(h);
  const auto res = lowest_eigenpairs(h, 4);
  CHECK(res.converged);
  for (int j = 0; j < 4; ++j) {
    CHECK(res.values[static_cast<std::size_t>(j)] == doctest::Approx(dense(j)).epsilon(1e-9));
    CHECK(res.residuals[static_cast<std::size_t>(j)] <= 1e-6);
  }
  const auto gm = gram(res.vectors);
  CHECK((gm - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("deflation returns the next eigenpairs") {
  const Grid g = make_grid(6, 8);
  const auto h = well(g, 3.0, 1.2, {1.0, false});
  const auto dense = dense_spectrum(h);
  const auto first = lowest_eigenpairs(h, 2);
  const auto next = lowest_eigenpairs(h, 2, {}, {}, first.vectors);
  CHECK(next.converged);
  CHECK(next.values[0] == doctest::Approx(dense(2)).epsilon(1e-8));
  CHECK(next.values[1] == doctest::Approx(dense(3)).epsilon(1e-8));
}

TEST_CASE("free operator on a mid-size grid") {
  const Grid g = make_grid(16, 32);
  const auto h = well(g, 2.0, 2.0);
  const auto res = lowest_eigenpairs(h, 3);
  CHECK(res.converged);
  CHECK(res.values[0] < res.values[1]);
  for (double r : res.residuals) CHECK(r <= 1e-6);
  MESSAGE("iterations " << res.iterations << " lowest " << res.values[0]);
}
