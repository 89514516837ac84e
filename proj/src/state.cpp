#include "fermigns/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fermigns/error.hpp"

namespace fermigns {

SchattenIndex::SchattenIndex(double q) : q_(q), infinite_(std::isinf(q)) {
  if (!(q >= 1.0)) throw ConfigError("q must be >= 1 or inf");
}

SchattenIndex SchattenIndex::infinity() { return SchattenIndex(std::numeric_limits<double>::infinity()); }

SchattenIndex SchattenIndex::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  std::size_t used = 0;
  double q = 0.0;
  try {
    q = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("q: cannot parse '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("q: cannot parse '" + text + "'");
  if (!(q >= 1.0)) throw ConfigError("q must be >= 1 or inf, got " + text);
  return SchattenIndex(q);
}

double SchattenIndex::value() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : q_;
}

double SchattenIndex::dual() const {
  if (infinite_) return 1.0;
  if (q_ == 1.0) return std::numeric_limits<double>::infinity();
  return q_ / (q_ - 1.0);
}

std::string SchattenIndex::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << q_;
  return os.str();
}

OrthoFrame OrthoFrame::adopt(Block orbitals, double tolerance) {
  if (orbitals.empty()) throw InputError("a frame needs at least one orbital");
  const auto g = gram(orbitals);
  const double dev = (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  if (dev > tolerance) {
    throw InputError("orbitals are not orthonormal (Gram deviation " + std::to_string(dev) + ")");
  }
  OrthoFrame f;
  f.orbitals_ = std::move(orbitals);
  return f;
}

DensityOperator::DensityOperator(OrthoFrame f, std::vector<double> k)
    : frame(std::move(f)), weights(std::move(k)) {
  if (weights.size() != frame.rank()) throw InputError("one weight per orbital is required");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("weights must be finite and nonnegative");
  }
}

std::size_t DensityOperator::rank() const {
  return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
}

double DensityOperator::trace() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

Eigen::MatrixXcd inverse_sqrt_gram(const Eigen::MatrixXcd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  const Eigen::VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() <= 1e-10) {
    std::ostringstream os;
    os << "orbitals are linearly dependent: smallest Gram eigenvalue " << lam.minCoeff();
    throw DegeneracyError(os.str(), lam.minCoeff());
  }
  const Eigen::VectorXd s = lam.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

OrthoFrame loewdin_orthonormalize(Block raw) {
  if (raw.empty()) throw InputError("a frame needs at least one orbital");
  for (const auto& f : raw) require_same_grid(raw.front().grid(), f.grid(), "loewdin_orthonormalize");
  const auto c = inverse_sqrt_gram(gram(raw));
  OrthoFrame out;
  out.orbitals_ = combine(raw, c);
  for (auto& u : out.orbitals_) u.set_tag(FieldTag::orbital);
  return out;
}

Field density(const Block& orbitals, std::span<const double> weights) {
  if (orbitals.empty()) throw InputError("density of an empty frame");
  Field rho(orbitals.front().grid(), FieldTag::density);
  auto r = rho.values();
  for (std::size_t i = 0; i < orbitals.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const auto u = orbitals[i].values();
    for (std::size_t p = 0; p < r.size(); ++p) r[p] += weights[i] * std::norm(u[p]);
  }
  return rho;
}

Field density(const DensityOperator& gamma) { return density(gamma.frame.orbitals(), gamma.weights); }

double schatten_norm(std::span<const double> weights, const SchattenIndex& q) {
  if (q.is_infinite()) {
    double m = 0.0;
    for (double w : weights) m = std::max(m, w);
    return m;
  }
  double acc = 0.0;
  for (double w : weights) acc += std::pow(w, q.value());
  return std::pow(acc, 1.0 / q.value());
}

double schatten_norm(const DensityOperator& gamma, const SchattenIndex& q) {
  return schatten_norm(gamma.weights, q);
}

std::vector<double> orbital_kinetic(const Block& orbitals, const KineticSpec& spec) {
  std::vector<double> out;
  out.reserve(orbitals.size());
  for (const auto& u : orbitals) out.push_back(kinetic_form(u, spec));
  return out;
}

double trace_kinetic(const DensityOperator& gamma, const KineticSpec& spec) {
  double t = 0.0;
  for (std::size_t i = 0; i < gamma.weights.size(); ++i) {
    if (gamma.weights[i] != 0.0) t += gamma.weights[i] * kinetic_form(gamma.frame[i], spec);
  }
  return t;
}

double trace_potential(const DensityOperator& gamma, const Field& potential) {
  require_same_grid(gamma.grid(), potential.grid(), "trace_potential");
  double t = 0.0;
  const auto v = potential.values();
  for (std::size_t i = 0; i < gamma.weights.size(); ++i) {
    if (gamma.weights[i] == 0.0) continue;
    const auto u = gamma.frame[i].values();
    double acc = 0.0;
    for (std::size_t p = 0; p < u.size(); ++p) acc += v[p].real() * std::norm(u[p]);
    t += gamma.weights[i] * acc * potential.grid().cell_volume();
  }
  return t;
}

}  // namespace fermigns
