#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fermigns/field.hpp"

namespace fermigns {

using Block = std::vector<Field>;

/// G(i, j) = <a_i, b_j>.
Eigen::MatrixXcd gram(const Block& a, const Block& b);
Eigen::MatrixXcd gram(const Block& a);

/// out_j = sum_i a_i c(i, j).
Block combine(const Block& a, const Eigen::MatrixXcd& c);

/// a_j += sum_i b_i c(i, j).
void add_combination(Block& a, const Block& b, const Eigen::MatrixXcd& c);

/// Re sum_i <a_i, b_i>.
double block_inner(const Block& a, const Block& b);

/// a_i += s b_i.
void block_axpy(double s, const Block& b, Block& a);

}  // namespace fermigns
