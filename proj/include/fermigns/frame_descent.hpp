#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fermigns/eigensolver.hpp"

namespace fermigns {

/// Objective f(U) = F(q, D) over orthonormal frames U = (u_1..u_R), where
/// q_i = <u_i, A u_i> for a local Hamiltonian A and
/// D = int (rho * |x|^{-alpha}) rho with rho = sum_i k_i |u_i|^2.
struct FrameObjective {
  LocalHamiltonian quadratic;
  std::vector<double> weights;
  double alpha = 1.0;
  /// Returns F and fills dF/dq_i and dF/dD.
  std::function<double(const std::vector<double>& q, double d, std::vector<double>& dq, double& dd)> outer;
  /// Keeps sum_i k_i q_i fixed to first order. Used for scale-invariant
  /// objectives, whose flat dilation direction otherwise lets the state
  /// drift to the grid or box scale.
  bool fix_scale = false;
};

/// Everything known about the objective at one frame.
struct FramePoint {
  Block u;
  Block au;                ///< A u_i
  std::vector<double> q;   ///< <u_i, A u_i>
  Field rho;
  Field w;                 ///< rho * |x|^{-alpha}
  double d = 0.0;
  double f = 0.0;
  std::vector<double> dq;
  double dd = 0.0;
};

/// f and all intermediate quantities at an orthonormal frame.
FramePoint evaluate_frame(const FrameObjective& obj, Block u);

/// Euclidean gradient G_i = 2 dF/dq_i A u_i + 4 dF/dD k_i w u_i, so that
/// df = Re sum_i <G_i, du_i>.
Block frame_gradient(const FrameObjective& obj, const FramePoint& p);

/// G - U sym(U^H G).
Block project_tangent(const Block& u, const Block& g);

/// max_i ||P G_i|| / (2 dF/dq_i): the residual of the one-body equations
/// A u_i + (2 dF/dD / dF/dq_i) k_i w u_i = sum_j u_j Lambda_ji.
double scaled_gradient_residual(const FramePoint& p, const Block& projected);

struct DescentControls {
  int max_iterations = 500;
  double tolerance = 1e-6;        ///< on scaled_gradient_residual
  double armijo = 1e-4;
  double noise = 1e-13;           ///< relative slack in the descent test
  int refresh_every = 25;         ///< exact recomputation of A U
  bool recenter = false;          ///< spectral recentering of the density
};

struct DescentStep {
  int iteration;
  double f;
  double residual;
  double step;
  std::string event;
};

struct DescentResult {
  FramePoint point;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
  std::vector<DescentStep> log;
};

/// Density centroid relative to the grid center.
std::array<double, 3> density_centroid(const Field& rho);

/// Preconditioned Riemannian Polak-Ribiere+ CG with Loewdin retraction and
/// Armijo backtracking. f never increases beyond the noise slack between
/// accepted iterates.
DescentResult minimize_frame(const FrameObjective& obj, Block start, const DescentControls& controls);

}  // namespace fermigns
