#pragma once

#include <vector>

#include "fermigns/eigensolver.hpp"
#include "fermigns/gns.hpp"

namespace fermigns {

/// Negative spectrum of sqrt(-Lap) + (V * |x|^{-alpha}).
struct LtProblem {
  Field potential;          ///< V, real, any sign
  double alpha = 1.0;
  double qprime = 1.0;      ///< dual exponent q / (q - 1)
  int eig_cap = 1;
  EigenControls eigen;

  void validate() const;
};

struct LtResult {
  std::vector<double> eigenvalues;  ///< strictly below -1e-8, ascending
  std::vector<double> residuals;
  Block eigenvectors;
  double riesz_mean = 0.0;
  double rhs = 0.0;
  double l_lower = 0.0;
  bool degenerate = false;  ///< V_- vanishes, the ratio is undefined
  bool converged = false;
};

/// sum_n |lambda_n|^{q'}.
double riesz_mean(const std::vector<double>& eigenvalues, double qprime);

/// (int (V_- * |x|^{-alpha}) V_-)^{q'/(2 - alpha)}; DegenerateInputError if V_- = 0.
double lt_rhs(const Field& potential, double alpha, double qprime);

LtResult negative_spectrum(const LtProblem& problem, const Block& guess = {});

/// Exponent (2 - alpha)(q - 1)/(alpha q) of the Lieb-Thirring constant in the
/// duality product; (2 - alpha)/alpha for q = inf.
double duality_exponent(double alpha, const SchattenIndex& q);
/// (alpha/2)((2 - alpha)/2)^{(2 - alpha)/alpha}.
double duality_target(double alpha);

struct DualityRow {
  double beta;
  std::vector<double> eigenvalues;
  double l_lower;
  double product;
  double max_residual;
};

struct DualityReport {
  std::vector<DualityRow> rows;
  double best_product = 0.0;
  double best_beta = 0.0;
  double target = 0.0;
  double saturation = 0.0;  ///< best_product / target
  double relative_gap = 0.0;
};

/// beta_* (2/alpha) times 1.05^j for j = -10..9.
std::vector<double> default_beta_grid(double alpha);

/// Scans V = -beta rho_gamma over the optimizer of a GNS run.
DualityReport duality_check(const GnsResult& gns, double alpha, const SchattenIndex& q,
                            const std::vector<double>& betas, const EigenControls& eigen = {});

}  // namespace fermigns
