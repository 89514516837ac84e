#include "fermigns/block.hpp"

#include "fermigns/error.hpp"

namespace fermigns {

Eigen::MatrixXcd gram(const Block& a, const Block& b) {
  Eigen::MatrixXcd g(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) g(i, j) = inner(a[i], b[j]);
  }
  return g;
}

Eigen::MatrixXcd gram(const Block& a) {
  const auto r = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXcd g(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    g(i, i) = inner(a[i], a[i]).real();
    for (Eigen::Index j = i + 1; j < r; ++j) {
      g(i, j) = inner(a[i], a[j]);
      g(j, i) = std::conj(g(i, j));
    }
  }
  return g;
}

Block combine(const Block& a, const Eigen::MatrixXcd& c) {
  if (static_cast<Eigen::Index>(a.size()) != c.rows()) throw InputError("combine: shape mismatch");
  Block out;
  out.reserve(static_cast<std::size_t>(c.cols()));
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    Field f(a.front().grid(), a.front().tag());
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      if (c(i, j) != cplx{0.0, 0.0}) axpy(c(i, j), a[i], f);
    }
    out.push_back(std::move(f));
  }
  return out;
}

void add_combination(Block& a, const Block& b, const Eigen::MatrixXcd& c) {
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      if (c(i, j) != cplx{0.0, 0.0}) axpy(c(i, j), b[i], a[j]);
    }
  }
}

double block_inner(const Block& a, const Block& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += inner(a[i], b[i]).real();
  return acc;
}

void block_axpy(double s, const Block& b, Block& a) {
  for (std::size_t i = 0; i < a.size(); ++i) axpy(s, b[i], a[i]);
}

}  // namespace fermigns
