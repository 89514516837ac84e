#include "fermigns/lieb_thirring.hpp"

#include <algorithm>
#include <cmath>

#include "fermigns/error.hpp"
#include "fermigns/riesz.hpp"

namespace fermigns {

void LtProblem::validate() const {
  validate_riesz_exponent(alpha);
  if (!(qprime >= 1.0)) throw ConfigError("qprime must be >= 1");
  if (eig_cap < 1) throw ConfigError("eig_cap must be at least 1");
  if (potential.size() == 0) throw ConfigError("potential is missing");
}

double riesz_mean(const std::vector<double>& eigenvalues, double qprime) {
  double acc = 0.0;
  for (double l : eigenvalues) acc += std::pow(std::abs(l), qprime);
  return acc;
}

double lt_rhs(const Field& potential, double alpha, double qprime) {
  Field neg(potential.grid(), FieldTag::density);
  bool any = false;
  for (std::size_t i = 0; i < neg.size(); ++i) {
    const double v = potential[i].real();
    if (v < 0.0) {
      neg[i] = -v;
      any = true;
    }
  }
  if (!any) throw DegenerateInputError("V_- vanishes identically");
  const double inner_integral = hartree_energy(neg, neg, alpha);
  return std::pow(inner_integral, qprime / (2.0 - alpha));
}

LtResult negative_spectrum(const LtProblem& pb, const Block& guess) {
  pb.validate();
  LtResult res;
  const Grid& g = pb.potential.grid();
  LocalHamiltonian h{g, {}, riesz_kernel(g, pb.alpha).convolve(pb.potential.real_part())};
  const auto eig = lowest_eigenpairs(h, pb.eig_cap, pb.eigen, guess);
  res.converged = eig.converged;
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    if (eig.values[i] < -1e-8) {
      res.eigenvalues.push_back(eig.values[i]);
      res.residuals.push_back(eig.residuals[i]);
      res.eigenvectors.push_back(eig.vectors[i]);
    }
  }
  res.riesz_mean = riesz_mean(res.eigenvalues, pb.qprime);
  try {
    res.rhs = lt_rhs(pb.potential, pb.alpha, pb.qprime);
    res.l_lower = res.riesz_mean / res.rhs;
  } catch (const DegenerateInputError&) {
    res.degenerate = true;
  }
  return res;
}

double duality_exponent(double alpha, const SchattenIndex& q) {
  if (q.is_infinite()) return (2.0 - alpha) / alpha;
  return (2.0 - alpha) * (q.value() - 1.0) / (alpha * q.value());
}

double duality_target(double alpha) {
  return 0.5 * alpha * std::pow(0.5 * (2.0 - alpha), (2.0 - alpha) / alpha);
}

std::vector<double> default_beta_grid(double alpha) {
  std::vector<double> out;
  for (int j = -10; j <= 9; ++j) out.push_back(2.0 / alpha * std::pow(1.05, j));
  return out;
}

DualityReport duality_check(const GnsResult& gns, double alpha, const SchattenIndex& q,
                            const std::vector<double>& betas, const EigenControls& eigen) {
  if (q.is_infinite() == false && q.value() == 1.0) throw ConfigError("duality needs q > 1");
  DualityReport rep;
  rep.target = duality_target(alpha);
  const Field rho = density(gns.optimizer);
  const double exponent = duality_exponent(alpha, q);
  Block guess = gns.optimizer.frame.orbitals();
  for (double beta : betas) {
    if (!(beta > 0.0)) throw ConfigError("beta values must be positive");
    LtProblem pb;
    pb.potential = (-beta) * rho;
    pb.alpha = alpha;
    pb.qprime = q.dual();
    pb.eig_cap = static_cast<int>(gns.optimizer.frame.rank());
    pb.eigen = eigen;
    const auto lt = negative_spectrum(pb, guess);
    DualityRow row{beta, lt.eigenvalues, lt.l_lower, 0.0, 0.0};
    for (double r : lt.residuals) row.max_residual = std::max(row.max_residual, r);
    row.product = lt.l_lower > 0.0 ? gns.k_est * std::pow(lt.l_lower, exponent) : 0.0;
    if (row.product > rep.best_product) {
      rep.best_product = row.product;
      rep.best_beta = beta;
    }
    rep.rows.push_back(std::move(row));
  }
  rep.saturation = rep.best_product / rep.target;
  rep.relative_gap = std::abs(rep.best_product - rep.target) / rep.target;
  return rep;
}

}  // namespace fermigns
