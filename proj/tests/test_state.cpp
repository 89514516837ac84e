#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "fermigns/error.hpp"
#include "fermigns/field_io.hpp"
#include "fermigns/spectral.hpp"
#include "fermigns/state.hpp"
#include "fermigns/state_io.hpp"

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

Block random_block(const Grid& g, int r, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Block out;
  for (int j = 0; j < r; ++j) {
    const double c[3] = {nd(rng), nd(rng), nd(rng)};
    const double w = 1.0 + 0.3 * std::abs(nd(rng));
    const double a = nd(rng), b = nd(rng);
    out.push_back(Field::sample(g, [&](double x, double y, double z) {
      const double r2 = (x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]) + (z - c[2]) * (z - c[2]);
      return std::exp(-r2 / (2 * w * w)) * cplx(1.0 + a * x, b * z);
    }));
  }
  return out;
}

}  // namespace

TEST_CASE("Schatten index parsing") {
  CHECK(SchattenIndex::parse("inf").is_infinite());
  CHECK(SchattenIndex::parse("2").value() == 2.0);
  CHECK(SchattenIndex::parse("2").dual() == 2.0);
  CHECK(SchattenIndex::parse("inf").dual() == 1.0);
  CHECK_THROWS_AS(SchattenIndex::parse("0.5"), ConfigError);
  CHECK_THROWS_AS(SchattenIndex::parse("two"), ConfigError);
}

TEST_CASE("Schatten norms") {
  const std::vector<double> ones(5, 1.0);
  CHECK(schatten_norm(ones, SchattenIndex::infinity()) == 1.0);
  CHECK(schatten_norm(ones, SchattenIndex(1.0)) == doctest::Approx(5.0));
  CHECK(schatten_norm(std::vector<double>{3, 4}, SchattenIndex(2.0)) == doctest::Approx(5.0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(0.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> k{ud(rng), ud(rng), ud(rng)};
    const double q = 1.0 + 4.0 * ud(rng);
    CHECK(schatten_norm(k, SchattenIndex::infinity()) <= schatten_norm(k, SchattenIndex(q)) + 1e-14);
    CHECK(schatten_norm(k, SchattenIndex(q)) <= schatten_norm(k, SchattenIndex(1.0)) + 1e-14);
  }
}

TEST_CASE("Loewdin orthonormalization") {
  const Grid g = make_grid(16, 32);
  SUBCASE("orthonormal input is unchanged") {
    const Field u = gaussian(g, 1.2);
    Field v = partial_derivative(u, 2);
    v *= 1.0 / norm(v);
    const auto f = loewdin_orthonormalize({u, v});
    CHECK(norm(f[0] - u) < 1e-10);
    CHECK(norm(f[1] - v) < 1e-10);
  }
  SUBCASE("identical vectors are rejected") {
    const Field u = gaussian(g, 1.2);
    CHECK_THROWS_AS(loewdin_orthonormalize({u, u}), DegeneracyError);
    try {
      loewdin_orthonormalize({u, u});
    } catch (const DegeneracyError& e) {
      CHECK(std::abs(e.smallest_eigenvalue()) < 1e-10);
    }
  }
  SUBCASE("overlapping Gaussians against the 2x2 closed form") {
    for (double d : {3.0, 1.5, 0.6}) {
      const Field a = gaussian(g, 1.0, {d / 2, 0, 0});
      const Field b = gaussian(g, 1.0, {-d / 2, 0, 0});
      const double s = inner(a, b).real();
      const auto f = loewdin_orthonormalize({a, b});
      const auto gm = gram(f.orbitals());
      CHECK((gm - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
      // [[1,s],[s,1]]^{-1/2} has diagonal (p + m)/2 and off-diagonal (p - m)/2
      // with p = 1/sqrt(1+s), m = 1/sqrt(1-s).
      const double p = 1.0 / std::sqrt(1.0 + s), m = 1.0 / std::sqrt(1.0 - s);
      const Field expect = 0.5 * (p + m) * a + 0.5 * (p - m) * b;
      CHECK(norm(f[0] - expect) < 1e-10);
    }
  }
}

TEST_CASE("density and traces") {
  const Grid g = make_grid(24, 48);
  const Field u = gaussian(g, 1.0);
  const DensityOperator one(OrthoFrame::adopt({u}), {2.0});
  CHECK(integral(density(one)) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(trace_kinetic(DensityOperator(OrthoFrame::adopt({u}), {1.0})) ==
        doctest::Approx(kKineticGaussian).epsilon(1e-3));
  CHECK(trace_kinetic(one) == doctest::Approx(2.0 * trace_kinetic(DensityOperator(OrthoFrame::adopt({u}), {1.0}))));
  const DensityOperator zero(OrthoFrame::adopt({u}), {0.0});
  CHECK(norm(density(zero)) == 0.0);
  CHECK(trace_kinetic(zero) == 0.0);

  const Field a = gaussian(g, 0.7, {5, 0, 0});
  const Field b = gaussian(g, 0.7, {-5, 0, 0});
  const auto frame = loewdin_orthonormalize({a, b});
  const Field rho = density(DensityOperator(frame, {1.0, 1.0}));
  double peak = 0.0, peak_a = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    peak = std::max(peak, rho[i].real());
    peak_a = std::max(peak_a, std::norm(a[i]));
  }
  CHECK(peak == doctest::Approx(peak_a).epsilon(1e-8));

  const Field v = Field::sample(g, [](double x, double, double) { return cplx(x * x, 0.0); });
  CHECK(trace_potential(one, v) == doctest::Approx(2.0 * 0.5).epsilon(1e-6));
}

TEST_CASE("unitary mixing and Hoffmann-Ostenhof sanity") {
  const Grid g = make_grid(16, 32);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    const int r = 1 + t % 3;
    const auto frame = loewdin_orthonormalize(random_block(g, r, rng));
    std::vector<double> k(static_cast<std::size_t>(r));
    for (auto& w : k) w = std::abs(nd(rng)) + 0.1;
    const DensityOperator gamma(frame, k);
    const Field rho = density(gamma);
    Field root(g);
    for (std::size_t i = 0; i < rho.size(); ++i) root[i] = std::sqrt(std::max(0.0, rho[i].real()));
    CHECK(trace_kinetic(gamma) >= kinetic_form(root) - 1e-6);

    if (t < 10) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(r, r);
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
      const Eigen::MatrixXcd u = qr.householderQ();
      const double kk = k.front();
      const DensityOperator eq(frame, std::vector<double>(static_cast<std::size_t>(r), kk));
      const DensityOperator mixed(OrthoFrame::adopt(combine(frame.orbitals(), u)),
                                  std::vector<double>(static_cast<std::size_t>(r), kk));
      CHECK(norm(density(eq) - density(mixed)) < 1e-9);
      CHECK(trace_kinetic(eq) == doctest::Approx(trace_kinetic(mixed)).epsilon(1e-9));
    }
  }
}

TEST_CASE("field and operator round trip") {
  const Grid g = make_grid(10, 8, {0.5, 0.0, -0.5});
  const Field u = gaussian(g, 1.0);
  const auto dir = std::filesystem::temp_directory_path() / "fermigns_state_io";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_field(dir / "u.fld", u, "unit test");
  const Field back = read_field(dir / "u.fld");
  CHECK(back.grid() == g);
  CHECK(norm(back - u) == 0.0);
  CHECK(back.tag() == FieldTag::orbital);
  CHECK(std::filesystem::file_size(dir / "u.fld") == 64 + 16 * g.size());

  const DensityOperator gamma(OrthoFrame::adopt({(1.0 / norm(u)) * u}), {0.75});
  write_density_operator(dir / "op", gamma, {{"alpha", 1.0}, {"q", "inf"}});
  const auto stored = read_density_operator(dir / "op");
  CHECK(stored.gamma.weights == gamma.weights);
  CHECK(stored.manifest["alpha"] == 1.0);
  CHECK(norm(stored.gamma.frame[0] - gamma.frame[0]) == 0.0);
  CHECK_THROWS_AS(read_field(dir / "op" / "manifest.json"), InputError);
  std::filesystem::remove_all(dir);
}
