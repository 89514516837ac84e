#include "doctest.h"

#include <cmath>

#include "fermigns/blowup.hpp"
#include "fermigns/error.hpp"
#include "fermigns/riesz.hpp"
#include "fermigns/trapped.hpp"

using namespace fermigns;

namespace {

constexpr double kKineticGaussian = 1.1283791670955126;  // 2 / sqrt(pi)

Field gaussian(const Grid& g, double width, std::array<double, 3> c = {0, 0, 0}) {
  const double a = std::pow(M_PI * width * width, -0.75);
  return Field::sample(g, [&](double x, double y, double z) {
    const double r2 = (x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]) + (z - c[2]) * (z - c[2]);
    return cplx(a * std::exp(-r2 / (2 * width * width)), 0.0);
  }, FieldTag::orbital);
}

TrappedProblem sqrt_trap(const Grid& g, int n, double k) {
  TrappedProblem pb;
  pb.particles = n;
  pb.coupling = k;
  pb.mass = 1.0;
  pb.potential = PotentialSpec::polynomial({PotentialZero{{0, 0, 0}, 0.5}});
  pb.grid = g;
  return pb;
}

}  // namespace

TEST_CASE("potential zero structure") {
  auto one = PotentialSpec::polynomial({PotentialZero{{0, 0, 0}, 0.5}});
  CHECK(one.leading_exponent() == 0.5);
  CHECK(one.iota_min() == doctest::Approx(1.0));
  CHECK(one.value({0.0, 0.0, 4.0}) == doctest::Approx(2.0));

  auto two = PotentialSpec::polynomial({PotentialZero{{-1, 0, 0}, 0.5}, PotentialZero{{1, 0, 0}, 0.5}}, 3.0);
  const auto io = two.iota();
  CHECK(io[0] == doctest::Approx(3.0 * std::sqrt(2.0)));
  CHECK(io[1] == doctest::Approx(3.0 * std::sqrt(2.0)));
  CHECK(two.selected_zeros().size() == 2);

  auto mixed = PotentialSpec::polynomial({PotentialZero{{-1, 0, 0}, 0.5}, PotentialZero{{1, 0, 0}, 0.3}});
  CHECK(mixed.iota()[0] == doctest::Approx(std::pow(2.0, 0.3)));
  CHECK(std::isinf(mixed.iota()[1]));
  REQUIRE(mixed.selected_zeros().size() == 1);
  CHECK(mixed.selected_zeros()[0][0] == -1.0);

  // Smaller iota wins: a steeper prefactor near the second zero.
  auto uneven = PotentialSpec::polynomial({PotentialZero{{-1, 0, 0}, 0.5}, PotentialZero{{3, 0, 0}, 0.5}});
  CHECK(uneven.iota()[0] == doctest::Approx(2.0));
  CHECK(uneven.iota()[1] == doctest::Approx(2.0));

  CHECK_THROWS_AS(PotentialSpec::polynomial({PotentialZero{{0, 0, 0}, 1.0}}).validate(), ConfigError);
  CHECK_THROWS_AS(PotentialSpec::polynomial({PotentialZero{{0, 0, 0}, 0.0}}).validate(), ConfigError);
  CHECK_THROWS_AS(PotentialSpec::polynomial({PotentialZero{{0, 0, 0}, 0.5}}, -1.0).validate(), ConfigError);
}

TEST_CASE("sampled potentials must trap") {
  const Grid g = make_grid(8.0, 16);
  const Field steep = Field::sample(g, [](double x, double y, double z) { return cplx(std::expm1(x * x + y * y + z * z), 0.0); });
  CHECK_NOTHROW(PotentialSpec::sampled(steep).validate());
  // The rule is strict: a harmonic well on this box does not qualify.
  const Field harmonic = Field::sample(g, [](double x, double y, double z) { return cplx(x * x + y * y + z * z, 0.0); });
  CHECK_THROWS_AS(PotentialSpec::sampled(harmonic).validate(), InputError);
  const Field flat = Field::sample(g, [](double, double, double) { return cplx(1.0, 0.0); });
  CHECK_THROWS_AS(PotentialSpec::sampled(flat).validate(), InputError);
  const Field negative = Field::sample(g, [](double x, double, double) { return cplx(x, 0.0); });
  CHECK_THROWS_AS(PotentialSpec::sampled(negative).validate(), InputError);
}

TEST_CASE("functional on fixed frames") {
  const Grid g = make_grid(16.0, 48);
  TrappedProblem pb;
  pb.mass = 0.0;
  pb.coupling = 1e-300;
  pb.potential = PotentialSpec::sampled(Field(g, FieldTag::potential));
  pb.grid = g;
  const OrthoFrame single = loewdin_orthonormalize({gaussian(g, 1.0)});
  CHECK(hf_energy(single, pb) == doctest::Approx(kKineticGaussian).epsilon(1e-3));

  // K = 0 separates over orbitals.
  const OrthoFrame pair = loewdin_orthonormalize({gaussian(g, 1.0, {-3, 0, 0}), gaussian(g, 1.2, {3, 0, 0})});
  TrappedProblem one = pb;
  double sum = 0.0;
  for (const auto& f : pair.orbitals()) sum += hf_energy(OrthoFrame::adopt({f}), one);
  CHECK(hf_energy(pair, pb) == doctest::Approx(sum).epsilon(1e-12));

  double prev = hf_energy(pair, pb);
  for (double k : {0.1, 0.2, 0.4}) {
    pb.coupling = k;
    const double e = hf_energy(pair, pb);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("small coupling gives a rank-one Aufbau ground state") {
  const Grid g = make_grid(12.0, 32);
  TrappedProblem pb = sqrt_trap(g, 2, 0.05);
  pb.controls.restarts = 2;
  const auto res = minimize_trapped(pb);
  CHECK(res.converged);
  CHECK(res.rank() == 1);
  CHECK(res.aufbau_verified);
  REQUIRE(res.restart_energies.size() == 2);
  CHECK(std::abs(res.restart_energies[0] - res.restart_energies[1]) < 1e-6);
  CHECK(res.epsilon * trace_kinetic(DensityOperator(res.frame, {1.0})) == doctest::Approx(1.0));
}

TEST_CASE("vanishing coupling reproduces the one-body ground state") {
  const Grid g = make_grid(12.0, 32);
  TrappedProblem pb = sqrt_trap(g, 1, 1e-12);
  const auto res = minimize_trapped(pb);
  const LocalHamiltonian h0{g, KineticSpec{1.0, false}, pb.potential.sample(g)};
  const auto eig = lowest_eigenpairs(h0, 1);
  CHECK(res.energy == doctest::Approx(eig.values[0]).epsilon(1e-8));
}

TEST_CASE("blow-up center of a translated bump") {
  const Grid g = make_grid(16.0, 32);
  const Field u = gaussian(g, 1.0, {1.0, -0.5, 0.25});
  Field rho(g, FieldTag::density);
  for (std::size_t i = 0; i < u.size(); ++i) rho[i] = std::norm(u[i]);
  const auto c = blowup_center(rho);
  CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(c[1] == doctest::Approx(-0.5).epsilon(1e-3));
  CHECK(c[2] == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("kappa bar of Gaussian densities") {
  const Grid g = make_grid(12.0, 48);
  auto rho_of = [&](std::array<double, 3> c) {
    const Field u = gaussian(g, 1.0, c);
    Field rho(g, FieldTag::density);
    for (std::size_t i = 0; i < u.size(); ++i) rho[i] = std::norm(u[i]);
    return rho;
  };
  const auto k0 = compute_kappa_bar(rho_of({0, 0, 0}), 0.5);
  for (double v : k0.argmin) CHECK(std::abs(v) < g.spacing());
  // E|X|^{1/2} for X with variance 1/2 per axis: Gamma(7/4)/Gamma(3/2).
  // The cusp of |x|^{1/2} limits the lattice sum to a few parts in 1e3.
  CHECK(k0.value == doctest::Approx(std::tgamma(1.75) / std::tgamma(1.5)).epsilon(5e-3));
  const auto k1 = compute_kappa_bar(rho_of({1.0, 0.5, 0}), 0.5);
  CHECK(k1.value == doctest::Approx(k0.value).epsilon(1e-6));
  CHECK(k1.argmin[0] == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(k1.argmin[1] == doctest::Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("power-law fit") {
  std::vector<double> x, y;
  for (int i = 0; i < 8; ++i) {
    x.push_back(std::pow(0.5, i));
    y.push_back(3.0 * std::pow(x.back(), 2.0 / 3.0));
  }
  const auto f = fit_power_law(x, y);
  CHECK(f.exponent == doctest::Approx(2.0 / 3.0));
  CHECK(f.prefactor == doctest::Approx(3.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("divergence probe on a concentrated trial family") {
  const Grid g = make_grid(12.0, 32);
  const OrthoFrame frame = loewdin_orthonormalize({gaussian(g, 1.0)});
  const double t = kinetic_form(frame[0]);
  const Field rho = density(DensityOperator(frame, {1.0}));
  const double d = hartree_energy(rho, rho, 1.0);
  TrappedProblem pb = sqrt_trap(g, 1, 1.05 * t / d);
  const auto above = divergence_probe(pb, frame, {0, 0, 0});
  CHECK(above.unbounded);
  CHECK(above.trials <= 1000);
  for (std::size_t i = 0; i < above.trajectory.size(); ++i) {
    if (above.trajectory[i].scale == 1.0) CHECK(above.trajectory[i].energy == doctest::Approx(hf_energy(frame, pb)));
  }
  pb.coupling = 0.5 * t / d;
  const auto below = divergence_probe(pb, frame, {0, 0, 0});
  CHECK_FALSE(below.unbounded);
  CHECK(below.interior_minimum);
}
